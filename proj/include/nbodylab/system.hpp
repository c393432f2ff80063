#ifndef NBODYLAB_SYSTEM_HPP
#define NBODYLAB_SYSTEM_HPP

#include <cstddef>
#include <vector>

#include "nbodylab/errors.hpp"
#include "nbodylab/vec3.hpp"

namespace nbodylab {

/// Masses plus the homogeneity exponent of the pair potential
/// U = -sum_{i<j} m_i m_j / r_ij^alpha.
class AlphaSystem {
public:
    AlphaSystem(std::vector<double> masses, double alpha);

    std::size_t size() const { return masses_.size(); }
    const std::vector<double>& masses() const { return masses_; }
    double mass(std::size_t i) const { return masses_[i]; }
    double alpha() const { return alpha_; }
    double total_mass() const { return total_mass_; }
    double min_mass() const { return min_mass_; }

private:
    std::vector<double> masses_;
    double alpha_;
    double total_mass_;
    double min_mass_;
};

/// Positions and velocities of N bodies plus the current time.
struct PhaseState {
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;
    double time = 0.0;

    std::size_t size() const { return positions.size(); }
};

/// Smallest pairwise distance of a configuration.
double min_pair_distance(const std::vector<Vec3>& positions);

/// Distance floor below which pair terms are considered numerically collided:
/// 1e-12 times the configuration scale sqrt(I/M). Collision *detection* is the
/// integrator's job; this floor only guards r^-(alpha+2) evaluations.
double collision_floor(const AlphaSystem& sys, const std::vector<Vec3>& positions);

/// Throws CollisionConfiguration when min_pair_distance is below the floor,
/// or when entries are not finite.
void require_valid_configuration(const AlphaSystem& sys, const std::vector<Vec3>& positions);

} // namespace nbodylab

#endif
