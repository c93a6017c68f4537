#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nes {

/// Base error carrying a machine-readable kind tag. The CLI maps kinds to
/// its exit-code contract: domain/validation problems exit 2, numeric
/// failures (singularities, poles, non-convergence) exit 3.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Input outside the mathematical domain of an operation (e.g. rho >= 1).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& message) : Error("domain", message) {}
};

/// Light-cone or division singularity (|1 - sigma^2| below guard, zero denominators).
class SingularityError : public Error {
public:
    explicit SingularityError(const std::string& message) : Error("singularity", message) {}
};

/// Propagator evaluated exactly on its pole.
class PoleError : public Error {
public:
    explicit PoleError(const std::string& message) : Error("pole", message) {}
};

/// Coupling too strong for the first-order expansion (w * Theta >= 1).
class WeakCouplingError : public Error {
public:
    explicit WeakCouplingError(const std::string& message) : Error("weak_coupling", message) {}
};

/// Singular moment matrix where an inverse/adjugate is required.
class RankError : public Error {
public:
    explicit RankError(const std::string& message) : Error("rank", message) {}
};

/// Adaptive quadrature failed to reach the requested tolerance. Carries the
/// best estimate achieved so callers can inspect how far off it is.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& message, double achieved, double error_estimate)
        : Error("quadrature", message), achieved_(achieved), error_estimate_(error_estimate) {}

    double achieved() const noexcept { return achieved_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double achieved_;
    double error_estimate_;
};

}  // namespace nes
