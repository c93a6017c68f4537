#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <utility>

#include "nes/errors.hpp"

namespace nes {

/// Matrices/vectors of runtime dimension 2..4, stack-allocated.
template <class Scalar>
using MatrixD = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
template <class Scalar>
using VectorD = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, 4, 1>;

/// |1 - sigma^2| below this is treated as sitting on the light cone.
inline constexpr double kLightConeGuard = 1e-15;

enum class Branch { Subluminal, Superluminal };

/// Velocity ratio sigma = V/c tagged with its light-cone branch
/// (|sigma| < 1 subluminal, |sigma| > 1 superluminal).
template <class Scalar = double>
struct VelocityRatio {
    Scalar sigma{};
    Branch branch = Branch::Subluminal;
};

/// Boost normalization omega = |1 - sigma^2|^{-1/2}.
template <class Scalar>
Scalar omega_of(Scalar sigma) {
    const Scalar gap = std::abs(Scalar(1) - sigma * sigma);
    if (gap < Scalar(kLightConeGuard))
        throw SingularityError("velocity ratio on the light cone: |1 - sigma^2| < 1e-15");
    return Scalar(1) / std::sqrt(gap);
}

/// Non-orthogonal Euclidean metric. The time axis and one spatial axis meet
/// at angle arccos(rho); the realized (upper-index) matrix has
/// g00 = gjj = 1/lam, g0j = gj0 = rho/lam and identity elsewhere, det = 1.
///
/// dim 2 and 4 are the standard realizations; dim 3 uses the same pattern
/// with a single transverse axis (used by the fluctuation estimators).
template <class Scalar = double>
struct Metric {
    int dim = 4;
    int axis = 1;  ///< index of the skewed spatial coordinate, in [1, dim)
    Scalar rho{};
    Scalar lam{1};

    static Metric from_rho(Scalar rho, int axis = 1, int dim = 4) {
        if (!(rho >= Scalar(0) && rho < Scalar(1)))
            throw DomainError("metric parameter rho must lie in [0, 1)");
        if (dim < 2 || dim > 4) throw DomainError("metric dimension must be 2, 3 or 4");
        if (axis < 1 || axis >= dim) throw DomainError("metric axis must lie in [1, dim)");
        Metric g;
        g.dim = dim;
        g.axis = axis;
        g.rho = rho;
        g.lam = std::sqrt((Scalar(1) - rho) * (Scalar(1) + rho));
        return g;
    }

    /// Upper-index realization g^{mu nu}.
    MatrixD<Scalar> matrix() const {
        MatrixD<Scalar> g = MatrixD<Scalar>::Identity(dim, dim);
        g(0, 0) = g(axis, axis) = Scalar(1) / lam;
        g(0, axis) = g(axis, 0) = rho / lam;
        return g;
    }

    /// Lower-index form g_{mu nu} = inverse of matrix(); closed form since det = 1.
    MatrixD<Scalar> inverse_matrix() const {
        MatrixD<Scalar> g = MatrixD<Scalar>::Identity(dim, dim);
        g(0, 0) = g(axis, axis) = Scalar(1) / lam;
        g(0, axis) = g(axis, 0) = -rho / lam;
        return g;
    }
};

/// Axis-aligned boost. N00 = Njj = omega, N0j = Nj0 = -sigma*omega,
/// identity elsewhere; det = +1 subluminal, -1 superluminal.
template <class Scalar = double>
struct Boost {
    int dim = 4;
    int axis = 1;
    Scalar sigma{};
    Scalar omega{1};

    static Boost from_sigma(Scalar sigma, int axis = 1, int dim = 4) {
        if (dim < 2 || dim > 4) throw DomainError("boost dimension must be 2, 3 or 4");
        if (axis < 1 || axis >= dim) throw DomainError("boost axis must lie in [1, dim)");
        Boost n;
        n.dim = dim;
        n.axis = axis;
        n.sigma = sigma;
        n.omega = omega_of(sigma);
        return n;
    }

    MatrixD<Scalar> matrix() const {
        MatrixD<Scalar> n = MatrixD<Scalar>::Identity(dim, dim);
        n(0, 0) = n(axis, axis) = omega;
        n(0, axis) = n(axis, 0) = -sigma * omega;
        return n;
    }
};

template <class Scalar = double>
struct FourMomentum {
    Eigen::Vector4<Scalar> p;  ///< p0 = E/c in scaled units
    Scalar rest_mass{};
};

/// Metric parameters induced by a velocity ratio:
/// rho = 2 sigma / (1 + sigma^2), lam = |1 - sigma^2| / (1 + sigma^2).
/// rho carries the sign of sigma; the Metric type restricts itself to
/// rho in [0, 1), negative sigma belongs in the boost.
template <class Scalar>
std::pair<Scalar, Scalar> rho_from_sigma(Scalar sigma) {
    const Scalar denom = Scalar(1) + sigma * sigma;
    if (std::abs(Scalar(1) - sigma * sigma) < Scalar(kLightConeGuard))
        throw SingularityError("rho_from_sigma undefined on the light cone (sigma = +-1)");
    return {Scalar(2) * sigma / denom, std::abs(Scalar(1) - sigma * sigma) / denom};
}

/// Velocity ratio of a moving frame relative to a resting one:
/// sigma0 = rho / (1 + lam) subluminal, (1 + lam) / rho superluminal.
template <class Scalar>
VelocityRatio<Scalar> sigma0_from_rho(Scalar rho, Branch branch) {
    if (!(rho >= Scalar(0) && rho < Scalar(1)))
        throw DomainError("rho must lie in [0, 1)");
    const Scalar lam = std::sqrt((Scalar(1) - rho) * (Scalar(1) + rho));
    if (branch == Branch::Subluminal) return {rho / (Scalar(1) + lam), branch};
    if (rho == Scalar(0))
        throw SingularityError("superluminal velocity ratio undefined for rho = 0");
    return {(Scalar(1) + lam) / rho, branch};
}

template <class Scalar = double>
struct FrameVelocities {
    VelocityRatio<Scalar> sigma;                      ///< subluminal solution
    std::optional<VelocityRatio<Scalar>> sigma_hat;   ///< superluminal solution; absent when lam == lam'

    const VelocityRatio<Scalar>& superluminal() const {
        if (!sigma_hat)
            throw SingularityError("superluminal solution undefined: lam == lam'");
        return *sigma_hat;
    }
};

/// Velocity ratios between two moving frames with metric parameters rho_obs
/// (observer) and rho_part (particle):
///   sigma     = (rho' lam - rho lam') / (lam + lam')
///   sigma_hat = (rho' lam + rho lam') / (lam - lam')
/// The magnitudes |sigma| < 1 and |sigma_hat| > 1 are validated rather than
/// assumed.
template <class Scalar>
FrameVelocities<Scalar> sigma_between_frames(Scalar rho_obs, Scalar rho_part) {
    if (!(rho_obs >= Scalar(0) && rho_obs < Scalar(1)) ||
        !(rho_part >= Scalar(0) && rho_part < Scalar(1)))
        throw DomainError("frame parameters rho must lie in [0, 1)");
    const Scalar lam = std::sqrt((Scalar(1) - rho_obs) * (Scalar(1) + rho_obs));
    const Scalar lam_p = std::sqrt((Scalar(1) - rho_part) * (Scalar(1) + rho_part));

    FrameVelocities<Scalar> out;
    out.sigma = {(rho_part * lam - rho_obs * lam_p) / (lam + lam_p), Branch::Subluminal};
    if (std::abs(out.sigma.sigma) >= Scalar(1))
        throw SingularityError("subluminal solution violated |sigma| < 1");
    if (lam != lam_p) {
        VelocityRatio<Scalar> hat{(rho_part * lam + rho_obs * lam_p) / (lam - lam_p),
                                  Branch::Superluminal};
        if (std::abs(hat.sigma) <= Scalar(1))
            throw SingularityError("superluminal solution violated |sigma_hat| > 1");
        out.sigma_hat = hat;
    }
    return out;
}

/// Velocity addition. Subluminal: (s' - s) / (1 - s's); superluminal:
/// (1 - s's) / (s' - s).
template <class Scalar>
VelocityRatio<Scalar> compose_sigma(Scalar sigma_prime0, Scalar sigma0, Branch branch) {
    if (branch == Branch::Subluminal) {
        if (std::abs(sigma_prime0) >= Scalar(1) || std::abs(sigma0) >= Scalar(1))
            throw DomainError("subluminal composition requires |sigma| < 1 on both inputs");
        const Scalar denom = Scalar(1) - sigma_prime0 * sigma0;
        if (std::abs(denom) < Scalar(kLightConeGuard))
            throw SingularityError("velocity addition denominator vanished");
        return {(sigma_prime0 - sigma0) / denom, branch};
    }
    if (std::abs(sigma_prime0) <= Scalar(1) || std::abs(sigma0) <= Scalar(1))
        throw DomainError("superluminal composition requires |sigma| > 1 on both inputs");
    const Scalar denom = sigma_prime0 - sigma0;
    if (std::abs(denom) < Scalar(kLightConeGuard))
        throw SingularityError("velocity addition denominator vanished");
    return {(Scalar(1) - sigma_prime0 * sigma0) / denom, branch};
}

template <class Scalar, class Derived>
VectorD<Scalar> apply_boost(const Boost<Scalar>& n, const Eigen::MatrixBase<Derived>& x) {
    eigen_assert(x.size() == n.dim);
    return n.matrix() * x;
}

/// x . g . y with the upper-index realization.
template <class Scalar, class DX, class DY>
Scalar inner_product(const Metric<Scalar>& g, const Eigen::MatrixBase<DX>& x,
                     const Eigen::MatrixBase<DY>& y) {
    return x.dot(g.matrix() * y);
}

/// Squared length of the 2-vector (tau, x) under raw metric parameters;
/// accepts the signed rho produced by rho_from_sigma for negative sigma.
template <class Scalar>
Scalar length_squared(Scalar rho, Scalar lam, Scalar tau, Scalar x) {
    return (tau * tau + x * x + Scalar(2) * rho * tau * x) / lam;
}

/// Proper-time ratio dt_e/dt = sqrt(1 - sigma0^2) of a subluminal particle.
template <class Scalar>
Scalar eigenzeit_factor(Scalar sigma0) {
    if (!(std::abs(sigma0) < Scalar(1)))
        throw DomainError("eigenzeit factor requires |sigma0| < 1");
    return std::sqrt((Scalar(1) - sigma0) * (Scalar(1) + sigma0));
}

/// Total energy E = m0 c^2 * omega(sigma).
template <class Scalar>
Scalar energy_of(Scalar m0c2, Scalar sigma) {
    return m0c2 * omega_of(sigma);
}

/// Metric parameters of the frame attached to a particle of rest energy
/// m0c2 carrying total energy e: lam = m0^2 c^4 / (2 E^2 - m0^2 c^4).
template <class Scalar>
std::pair<Scalar, Scalar> lambda_of_energy(Scalar m0c2, Scalar e) {
    if (!(m0c2 > Scalar(0))) throw DomainError("rest energy must be positive");
    if (!(e >= m0c2)) throw DomainError("total energy below rest energy");
    const Scalar r = e / m0c2;
    const Scalar lam = Scalar(1) / (Scalar(2) * r * r - Scalar(1));
    // 1 - lam^2 evaluated as a product to keep rho accurate near lam ~ 1
    const Scalar rho = std::sqrt((Scalar(1) - lam) * (Scalar(1) + lam));
    return {rho, lam};
}

/// Scaled velocity u = omega * (1, ..., -sigma at axis, ...) with c = 1.
template <class Scalar>
Eigen::Vector4<Scalar> four_velocity(Scalar sigma, int axis = 1) {
    if (axis < 1 || axis > 3) throw DomainError("axis must lie in [1, 3]");
    const Scalar om = omega_of(sigma);
    Eigen::Vector4<Scalar> u = Eigen::Vector4<Scalar>::Zero();
    u(0) = om;
    u(axis) = -sigma * om;
    return u;
}

template <class Scalar>
FourMomentum<Scalar> four_momentum(Scalar m0, Scalar sigma, int axis = 1) {
    return {(m0 * four_velocity(sigma, axis)).eval(), m0};
}

/// Reference Lorentz transformation of orthogonal Minkowski space,
/// used as an oracle against the boost of the skewed metric.
template <class Scalar>
std::pair<Scalar, Scalar> oms_lorentz(Scalar beta, Scalar tau, Scalar x) {
    if (!(std::abs(beta) < Scalar(1)))
        throw DomainError("orthogonal-space boost requires |beta| < 1");
    const Scalar alpha = Scalar(1) / std::sqrt((Scalar(1) - beta) * (Scalar(1) + beta));
    return {alpha * (tau - beta * x), alpha * (x - beta * tau)};
}

}  // namespace nes
