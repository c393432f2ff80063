#include "nbodylab/system.hpp"

#include <cmath>
#include <limits>

namespace nbodylab {

AlphaSystem::AlphaSystem(std::vector<double> masses, double alpha)
    : masses_(std::move(masses)), alpha_(alpha) {
    if (masses_.size() < 2)
        throw PreconditionViolated("AlphaSystem needs at least two bodies");
    if (!(alpha_ > 0.0) || !std::isfinite(alpha_))
        throw PreconditionViolated("alpha must be a positive finite real");
    total_mass_ = 0.0;
    min_mass_ = std::numeric_limits<double>::infinity();
    for (double m : masses_) {
        if (!(m > 0.0) || !std::isfinite(m))
            throw PreconditionViolated("every mass must be strictly positive and finite");
        total_mass_ += m;
        min_mass_ = std::min(min_mass_, m);
    }
}

double min_pair_distance(const std::vector<Vec3>& positions) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j)
            best = std::min(best, norm(positions[i] - positions[j]));
    return best;
}

double collision_floor(const AlphaSystem& sys, const std::vector<Vec3>& positions) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i)
        inertia += sys.mass(i) * norm2(positions[i]);
    return 1e-12 * std::sqrt(inertia / sys.total_mass());
}

void require_valid_configuration(const AlphaSystem& sys, const std::vector<Vec3>& positions) {
    if (positions.size() != sys.size())
        throw PreconditionViolated("configuration size does not match system size");
    for (const Vec3& p : positions)
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
            throw PreconditionViolated("non-finite position entry");
    const double floor = collision_floor(sys, positions);
    const double dmin = min_pair_distance(positions);
    if (!(dmin > floor))
        throw CollisionConfiguration("pairwise distance " + std::to_string(dmin) +
                                     " at or below collision floor");
}

} // namespace nbodylab
