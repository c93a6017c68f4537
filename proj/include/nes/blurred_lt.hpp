#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "nes/errors.hpp"
#include "nes/kinematics.hpp"

namespace nes {

/// Generative model for metric-correlated coordinate fluctuations:
/// x ~ N(0, s^2 g_lower) in the observer frame, noise zeta ~ N(0, e^2 g'_lower)
/// independent of x, and x' = N x + zeta. The lower-index covariances are the
/// inverses of the realized metrics; this is the index placement under which
/// the inverse-form estimator recovers N exactly from population moments.
struct FluctuationModel {
    Metric<double> g;        ///< observer frame
    Metric<double> g_prime;  ///< particle frame
    Boost<double> n_true;
    double s2 = 1.0;
    double e2 = 0.0;
    std::uint64_t seed = 0;
    int dim = 4;

    /// Build from the two frame parameters; the boost comes from the
    /// two-frame velocity solution.
    static FluctuationModel from_frames(double rho_obs, double rho_part, double s2, double e2,
                                        std::uint64_t seed, int axis = 1, int dim = 4) {
        const auto sol = sigma_between_frames(rho_obs, rho_part);
        return make(rho_obs, rho_part, sol.sigma.sigma, s2, e2, seed, axis, dim);
    }

    /// Build from the observer frame and the relative velocity ratio; the
    /// particle frame parameter follows from the addition theorem.
    static FluctuationModel from_boost(double rho_obs, double sigma, double s2, double e2,
                                       std::uint64_t seed, int axis = 1, int dim = 4) {
        if (!(std::abs(sigma) < 1))
            throw DomainError("blurred-boost model requires a subluminal |sigma| < 1");
        const double sigma0 = sigma0_from_rho(rho_obs, Branch::Subluminal).sigma;
        const double sigma_prime0 = (sigma + sigma0) / (1.0 + sigma * sigma0);
        const double rho_part = rho_from_sigma(sigma_prime0).first;
        return make(rho_obs, rho_part, sigma, s2, e2, seed, axis, dim);
    }

    void validate() const {
        if (!(s2 > 0)) throw DomainError("fluctuation scale s2 must be positive");
        if (e2 < 0) throw DomainError("noise scale e2 must be non-negative");
        const MatrixD<double> n = n_true.matrix();
        const double residual =
            (g.matrix() - n * g_prime.matrix() * n).cwiseAbs().maxCoeff();
        if (!(residual < 1e-8))
            throw DomainError("model frames and boost violate the invariance relation");
    }

private:
    static FluctuationModel make(double rho_obs, double rho_part, double sigma, double s2,
                                 double e2, std::uint64_t seed, int axis, int dim) {
        FluctuationModel m;
        m.g = Metric<double>::from_rho(rho_obs, axis, dim);
        m.g_prime = Metric<double>::from_rho(rho_part, axis, dim);
        m.n_true = Boost<double>::from_sigma(sigma, axis, dim);
        m.s2 = s2;
        m.e2 = e2;
        m.seed = seed;
        m.dim = dim;
        m.validate();
        return m;
    }
};

struct MomentMatrix {
    MatrixD<double> cxx;   ///< <x x^T>
    MatrixD<double> cxpx;  ///< <x' x^T>
    long long n_samples = 0;
};

/// Sample second moments of a simulated ensemble. Raw pairs are reduced on
/// the fly; the moments are the sufficient statistics for every estimator.
struct FluctuationEnsemble {
    FluctuationModel model;
    long long n_samples = 0;
    MatrixD<double> cxx;    ///< <x x^T>
    MatrixD<double> cxpx;   ///< <x' x^T>
    MatrixD<double> cxpxp;  ///< <x' x'^T>
    MatrixD<double> cxz;    ///< <x zeta^T>, should vanish by independence

    MomentMatrix moments() const { return {cxx, cxpx, n_samples}; }
};

struct EstimatedTransform {
    MatrixD<double> n_hat;
    std::optional<double> max_abs_error;  ///< vs the known transform, when available
    std::optional<double> s_prime2_hat;
};

struct ResidualVarianceReport {
    int dim = 0;
    long long n_samples = 0;
    double s2 = 0;
    double e2_model = 0;
    double s_prime2_hat = 0;
    double trace_gprime_upper = 0;
    double e2_paper_relation = 0;    ///< s'^2 - s^2; exact only when Tr(g') = D
    double e2_derived_relation = 0;  ///< s'^2 - s^2 D / Tr(g'), from contracting the middle term
};

namespace detail {

/// Symmetric square root of an SPD matrix via its eigen-decomposition.
template <int D>
Eigen::Matrix<double, D, D> symmetric_sqrt(const Eigen::Matrix<double, D, D>& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, D, D>> solver(m);
    Eigen::Matrix<double, D, 1> ev = solver.eigenvalues();
    for (int i = 0; i < D; ++i) {
        if (ev(i) < -1e-12 * std::abs(ev(D - 1)))
            throw DomainError("fluctuation covariance is not positive definite");
        ev(i) = std::sqrt(std::max(ev(i), 0.0));
    }
    return solver.eigenvectors() * ev.asDiagonal() * solver.eigenvectors().transpose();
}

template <int D>
void sample_core(const FluctuationModel& model, long long n, int n_streams,
                 FluctuationEnsemble& out) {
    using Mat = Eigen::Matrix<double, D, D>;
    using Vec = Eigen::Matrix<double, D, 1>;
    const Mat n_true = model.n_true.matrix();
    const Mat lx = symmetric_sqrt<D>(Mat(model.s2 * model.g.inverse_matrix()));
    const bool with_noise = model.e2 > 0;
    const Mat lz = with_noise
                       ? symmetric_sqrt<D>(Mat(model.e2 * model.g_prime.inverse_matrix()))
                       : Mat::Zero();

    Mat cxx = Mat::Zero(), cxpx = Mat::Zero(), cxpxp = Mat::Zero(), cxz = Mat::Zero();
    std::normal_distribution<double> normal;
    for (int stream = 0; stream < n_streams; ++stream) {
        // splitmix-style offset keeps stream seeds distinct and reproducible
        std::mt19937_64 rng(model.seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(stream));
        normal.reset();
        const long long chunk = n / n_streams + (stream < n % n_streams ? 1 : 0);
        for (long long i = 0; i < chunk; ++i) {
            Vec z;
            for (int d = 0; d < D; ++d) z(d) = normal(rng);
            const Vec x = lx * z;
            Vec zeta = Vec::Zero();
            if (with_noise) {
                for (int d = 0; d < D; ++d) z(d) = normal(rng);
                zeta = lz * z;
            }
            const Vec xp = n_true * x + zeta;
            cxx.noalias() += x * x.transpose();
            cxpx.noalias() += xp * x.transpose();
            cxpxp.noalias() += xp * xp.transpose();
            cxz.noalias() += x * zeta.transpose();
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    out.cxx = cxx * inv_n;
    out.cxpx = cxpx * inv_n;
    out.cxpxp = cxpxp * inv_n;
    out.cxz = cxz * inv_n;
}

}  // namespace detail

/// Draw n sample pairs (x, x') and reduce them to second moments. The stream
/// count only partitions the deterministic random sequence; identical
/// (model, n, n_streams) always produce the identical ensemble.
inline FluctuationEnsemble sample_fluctuations(const FluctuationModel& model, long long n,
                                               int n_streams = 1) {
    if (n < 1) throw DomainError("need at least one sample");
    if (n_streams < 1 || n_streams > n) throw DomainError("invalid stream count");
    model.validate();

    FluctuationEnsemble ens;
    ens.model = model;
    ens.n_samples = n;
    switch (model.dim) {
        case 2: detail::sample_core<2>(model, n, n_streams, ens); break;
        case 3: detail::sample_core<3>(model, n, n_streams, ens); break;
        case 4: detail::sample_core<4>(model, n, n_streams, ens); break;
        default: throw DomainError("fluctuation dimension must be 2, 3 or 4");
    }
    return ens;
}

/// s'^2 estimate g'^{mu nu} <x'_mu x'_nu> / Tr(g'_upper).
inline double s_prime2_estimate(const FluctuationEnsemble& ens) {
    const MatrixD<double> gp = ens.model.g_prime.matrix();
    return (gp * ens.cxpxp).trace() / gp.trace();
}

/// Moment-based transform estimate N = s^{-2} <x' x^T> g_upper.
inline EstimatedTransform estimate_inverse_form(const FluctuationEnsemble& ens,
                                                const Metric<double>& g, double s2) {
    if (ens.n_samples < ens.model.dim)
        throw DomainError("need at least dim samples for a moment estimate");
    EstimatedTransform t;
    t.n_hat = ens.cxpx * g.matrix() / s2;
    t.max_abs_error = (t.n_hat - ens.model.n_true.matrix()).cwiseAbs().maxCoeff();
    t.s_prime2_hat = s_prime2_estimate(ens);
    return t;
}

/// Inverse-form estimate from raw moments, identifying s^2 g_lower with the
/// measured <x x^T>: N = <x' x^T> <x x^T>^{-1}.
inline EstimatedTransform estimate_inverse_form(const MomentMatrix& moments) {
    Eigen::FullPivLU<MatrixD<double>> lu(moments.cxx);
    if (!lu.isInvertible()) throw RankError("moment matrix <x x^T> is singular");
    EstimatedTransform t;
    t.n_hat = lu.solve(moments.cxpx.transpose()).transpose();
    return t;
}

/// Levi-Civita contraction Q^{ab} built from D - 1 copies of <x x^T>;
/// enumerates the D! non-zero index tuples of each symbol.
inline MatrixD<double> levi_civita_q(const MatrixD<double>& cxx, int dim) {
    if (dim < 2 || dim > 4) throw DomainError("Levi-Civita contraction needs dim 2, 3 or 4");

    // permutations of {0..dim-1} with parity signs
    std::vector<std::pair<std::array<int, 4>, int>> perms;
    std::array<int, 4> p{0, 1, 2, 3};
    do {
        int inversions = 0;
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j) inversions += p[i] > p[j];
        perms.push_back({p, inversions % 2 == 0 ? 1 : -1});
    } while (std::next_permutation(p.begin(), p.begin() + dim));

    MatrixD<double> q = MatrixD<double>::Zero(dim, dim);
    for (const auto& [left, sign_left] : perms) {
        for (const auto& [right, sign_right] : perms) {
            double term = sign_left * sign_right;
            for (int i = 1; i < dim; ++i) term *= cxx(left[i], right[i - 1]);
            q(left[0], right[dim - 1]) += term;
        }
    }
    return q;
}

/// Determinant/Levi-Civita estimate
/// N = (-1)^{D-1}/(D-1)! det^{-1}(<x x^T>) <x' x^T> Q.
/// Algebraically identical to the inverse form on the same moments.
inline EstimatedTransform estimate_adjugate_form(const MomentMatrix& moments, int dim) {
    if (dim < 2 || dim > 4) throw DomainError("adjugate estimate needs dim 2, 3 or 4");
    Eigen::FullPivLU<MatrixD<double>> lu(moments.cxx);
    if (!lu.isInvertible()) throw RankError("moment matrix <x x^T> is singular");

    double factorial = 1;
    for (int i = 2; i < dim; ++i) factorial *= i;
    const double prefactor = (dim % 2 == 0 ? -1.0 : 1.0) / factorial;

    EstimatedTransform t;
    t.n_hat = prefactor / lu.determinant() * moments.cxpx * levi_civita_q(moments.cxx, dim);
    return t;
}

/// Compares the sampled s'^2 against both closures of the variance relation:
/// the stated one (e^2 = s'^2 - s^2) and the one obtained by contracting the
/// middle term with the invariance relation (e^2 = s'^2 - s^2 D / Tr(g')).
/// They coincide exactly when Tr(g'_upper) = D, i.e. rho' = 0.
inline ResidualVarianceReport residual_variance_check(const FluctuationModel& model,
                                                      const FluctuationEnsemble& ens) {
    ResidualVarianceReport r;
    r.dim = model.dim;
    r.n_samples = ens.n_samples;
    r.s2 = model.s2;
    r.e2_model = model.e2;
    r.s_prime2_hat = s_prime2_estimate(ens);
    r.trace_gprime_upper = model.g_prime.matrix().trace();
    r.e2_paper_relation = r.s_prime2_hat - model.s2;
    r.e2_derived_relation = r.s_prime2_hat - model.s2 * model.dim / r.trace_gprime_upper;
    return r;
}

}  // namespace nes
