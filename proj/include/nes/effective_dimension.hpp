#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "nes/constants.hpp"
#include "nes/errors.hpp"
#include "nes/kinematics.hpp"

namespace nes {

/// Trace-normalized eigenvalues of a 4-D metric; probabilities summing to 1.
template <class Scalar = double>
struct SpectrumWeights {
    Eigen::Array4<Scalar> weights;
};

/// Closed-form spectrum weights (1 +- rho)/[2(1 + lam)] and lam/[2(1 + lam)]
/// from raw metric parameters. The small weight is evaluated as
/// lam^2 / [(1 + rho) 2(1 + lam)] to stay accurate when rho approaches 1.
/// rho == 1 is accepted here: at extreme energies rho saturates to 1 in
/// floating point while lam stays positive, and the weights remain finite.
template <class Scalar>
SpectrumWeights<Scalar> spectrum_weights(Scalar rho, Scalar lam) {
    if (!(rho >= Scalar(0) && rho <= Scalar(1)))
        throw DomainError("spectrum weights need rho in [0, 1]");
    if (!(lam > Scalar(0) && lam <= Scalar(1)))
        throw DomainError("spectrum weights need lam in (0, 1]");
    const Scalar norm = Scalar(2) * (Scalar(1) + lam);
    SpectrumWeights<Scalar> w;
    w.weights(0) = (Scalar(1) + rho) / norm;
    w.weights(1) = lam * lam / ((Scalar(1) + rho) * norm);
    w.weights(2) = w.weights(3) = lam / norm;
    return w;
}

template <class Scalar>
SpectrumWeights<Scalar> normalized_eigenvalues(const Metric<Scalar>& g) {
    if (g.dim != 4) throw DomainError("spectrum weights are defined for 4-D metrics");
    return spectrum_weights(g.rho, g.lam);
}

/// Numeric route: eigenvalues of the realized matrix divided by its trace.
/// Cross-checks the closed form.
template <class Scalar>
SpectrumWeights<Scalar> normalized_eigenvalues_numeric(const Metric<Scalar>& g) {
    if (g.dim != 4) throw DomainError("spectrum weights are defined for 4-D metrics");
    const MatrixD<Scalar> m = g.matrix();
    Eigen::SelfAdjointEigenSolver<MatrixD<Scalar>> solver(m, Eigen::EigenvaluesOnly);
    Eigen::Array4<Scalar> ev;
    for (int i = 0; i < 4; ++i) ev(i) = solver.eigenvalues()(i);
    std::sort(ev.data(), ev.data() + 4, std::greater<Scalar>());
    // reorder descending [(1+rho)/lam, 1, 1, (1-rho)/lam] to the closed-form
    // labeling (largest, smallest, transverse, transverse)
    SpectrumWeights<Scalar> w;
    w.weights << ev(0), ev(3), ev(1), ev(2);
    w.weights /= m.trace();
    return w;
}

/// Effective dimension q = exp(-sum w ln w) with 0 ln 0 := 0.
/// Accepts any number of weights; uniform L weights give exactly L.
template <class Derived>
typename Derived::Scalar effective_dim(const Eigen::ArrayBase<Derived>& weights) {
    using Scalar = typename Derived::Scalar;
    Scalar entropy{};
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        const Scalar w = weights(i);
        if (w < Scalar(0)) throw DomainError("spectrum weights must be non-negative");
        if (w > Scalar(0)) entropy -= w * std::log(w);
    }
    return std::exp(entropy);
}

template <class Scalar>
Scalar effective_dim(const SpectrumWeights<Scalar>& w) {
    return effective_dim(w.weights);
}

struct EnergyState {
    double m0c2_gev{};
    double e_gev{};
};

/// q(E) through the smooth chain: energy -> (rho, lam) -> weights -> q.
inline double q_of_energy(const EnergyState& s) {
    const auto [rho, lam] = lambda_of_energy(s.m0c2_gev, s.e_gev);
    return effective_dim(spectrum_weights(rho, lam));
}

/// Jump regularization dimension: 4 below the Planck energy, 1 at and above it.
inline double q_jump(double e_gev, const PhysicalConstants& c = {}) {
    if (!(e_gev > 0)) throw DomainError("energy must be positive");
    return e_gev < c.planck_energy_gev ? 4.0 : 1.0;
}

/// Combinatorial oracle: Omega^{1/M} with Omega = M! / prod q_k!, evaluated
/// in log space. Converges to exp(-sum (q_k/M) ln(q_k/M)) for large M.
inline double multinomial_entropy_oracle(std::span<const long long> occupations) {
    if (occupations.empty()) throw DomainError("need at least one occupation number");
    long long m = 0;
    for (long long q : occupations) {
        if (q < 1) throw DomainError("occupation numbers must be >= 1");
        m += q;
    }
    double log_omega = std::lgamma(static_cast<double>(m) + 1.0);
    for (long long q : occupations) log_omega -= std::lgamma(static_cast<double>(q) + 1.0);
    return std::exp(log_omega / static_cast<double>(m));
}

enum class Panel { Left, Right };

struct Figure2Row {
    Panel panel;
    double sigma0;  ///< velocity ratio (subluminal left, superluminal right)
    double rho;
    double lam;
};

/// Metric parameters versus velocity ratio, one panel per branch.
/// Left: sigma0 in [0, 1 - 1e-6]; right: sigma_hat0 in [1 + 1e-6, sigma_max].
inline std::vector<Figure2Row> figure2_data(int n_points, double sigma_max) {
    constexpr double eps = 1e-6;
    if (n_points < 2) throw DomainError("figure2 needs at least 2 points per panel");
    if (!(sigma_max > 1 + 2 * eps))
        throw DomainError("sigma_max must exceed the right-panel lower bound 1 + 1e-6");
    std::vector<Figure2Row> rows;
    rows.reserve(2 * static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double s = (1.0 - eps) * i / (n_points - 1);
        const auto [rho, lam] = rho_from_sigma(s);
        rows.push_back({Panel::Left, s, rho, lam});
    }
    for (int i = 0; i < n_points; ++i) {
        const double s = (1.0 + eps) + (sigma_max - 1.0 - eps) * i / (n_points - 1);
        const auto [rho, lam] = rho_from_sigma(s);
        rows.push_back({Panel::Right, s, rho, lam});
    }
    return rows;
}

struct Figure3Row {
    double m0c2_gev;
    double e_over_ep;
    double q;
};

/// q(E) per rest mass, sampled log-uniformly in E/E_p. Energies below the
/// rest energy are clamped to it (a particle carries at least its rest
/// energy), so every curve starts at q = 4.
inline std::vector<Figure3Row> figure3_data(std::span<const double> masses_gev, int n_points,
                                            double ratio_lo, double ratio_hi,
                                            const PhysicalConstants& c = {}) {
    if (n_points < 2) throw DomainError("figure3 needs at least 2 points");
    if (!(ratio_lo > 0 && ratio_lo < ratio_hi)) throw DomainError("need 0 < ratio_lo < ratio_hi");
    for (double m : masses_gev)
        if (!(m > 0)) throw DomainError("masses must be positive");

    std::vector<Figure3Row> rows;
    rows.reserve(masses_gev.size() * static_cast<std::size_t>(n_points));
    const double log_step = std::log(ratio_hi / ratio_lo) / (n_points - 1);
    for (double m : masses_gev) {
        for (int i = 0; i < n_points; ++i) {
            const double ratio = ratio_lo * std::exp(log_step * i);
            const double e = std::max(ratio * c.planck_energy_gev, m);
            rows.push_back({m, ratio, q_of_energy({m, e})});
        }
    }
    return rows;
}

}  // namespace nes
