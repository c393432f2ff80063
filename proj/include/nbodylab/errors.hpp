#ifndef NBODYLAB_ERRORS_HPP
#define NBODYLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nbodylab {

// Base for all library errors so callers can catch one type at the boundary.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A pairwise distance fell below the machine-safe floor.
struct CollisionConfiguration : Error {
    explicit CollisionConfiguration(const std::string& msg) : Error(msg) {}
};

struct ZeroAngularMomentum : Error {
    explicit ZeroAngularMomentum(const std::string& msg) : Error(msg) {}
};

struct PreconditionViolated : Error {
    explicit PreconditionViolated(const std::string& msg) : Error(msg) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

struct SingularJacobian : Error {
    double condition_estimate;
    SingularJacobian(const std::string& msg, double cond)
        : Error(msg), condition_estimate(cond) {}
};

struct AlphaOutOfRange : Error {
    explicit AlphaOutOfRange(const std::string& msg) : Error(msg) {}
};

struct MassNormalization : Error {
    explicit MassNormalization(const std::string& msg) : Error(msg) {}
};

struct InconsistentEnergy : Error {
    explicit InconsistentEnergy(const std::string& msg) : Error(msg) {}
};

struct NonPlanarConfiguration : Error {
    explicit NonPlanarConfiguration(const std::string& msg) : Error(msg) {}
};

struct PrimaryCollision : Error {
    explicit PrimaryCollision(const std::string& msg) : Error(msg) {}
};

// Step size fell below h_min while no pair was near collision.
struct StepUnderflow : Error {
    double t;
    StepUnderflow(const std::string& msg, double t_) : Error(msg), t(t_) {}
};

// A label sequence violated the proven transition diagram.
struct AutomatonViolation : Error {
    explicit AutomatonViolation(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace nbodylab

#endif
