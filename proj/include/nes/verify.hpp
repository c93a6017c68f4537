#pragma once

#include <algorithm>
#include <cmath>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "nes/blurred_lt.hpp"
#include "nes/effective_dimension.hpp"
#include "nes/errors.hpp"
#include "nes/kinematics.hpp"
#include "nes/loop.hpp"

namespace nes {

/// One named invariant check. run() returns an empty string on success and a
/// human-readable residual report on failure; thrown errors become failures
/// tagged with the error kind.
struct Property {
    std::string name;
    std::function<std::string()> run;
};

struct PropertyResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

struct VerifyReport {
    std::vector<PropertyResult> results;

    bool all_passed() const {
        return std::all_of(results.begin(), results.end(),
                           [](const PropertyResult& r) { return r.pass; });
    }
};

namespace detail {

inline std::string strf(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    char buf[256];
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

}  // namespace detail

/// Runs every property whose name contains `filter` (all when empty).
inline VerifyReport run_properties(const std::vector<Property>& properties,
                                   std::string_view filter = {}) {
    VerifyReport report;
    for (const Property& p : properties) {
        if (!filter.empty() && p.name.find(filter) == std::string::npos) continue;
        PropertyResult r;
        r.name = p.name;
        const auto start = std::chrono::steady_clock::now();
        try {
            r.detail = p.run();
            r.pass = r.detail.empty();
        } catch (const Error& e) {
            r.pass = false;
            r.detail = detail::strf("error[%s]: %s", e.kind().c_str(), e.what());
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = detail::strf("error: %s", e.what());
        }
        r.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report.results.push_back(std::move(r));
    }
    return report;
}

inline void print_report(std::ostream& os, const VerifyReport& report, bool verbose = false) {
    std::size_t passed = 0;
    for (const PropertyResult& r : report.results) {
        os << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
        if (!r.pass) os << ": " << r.detail;
        if (verbose) os << detail::strf("  (%.0f ms)", 1e3 * r.seconds);
        os << '\n';
        passed += r.pass;
    }
    os << passed << '/' << report.results.size() << " properties passed\n";
}

/// The module invariant suites, seeded deterministically.
inline std::vector<Property> builtin_properties() {
    using detail::strf;
    std::vector<Property> props;

    // conditioning of the boosted quadratic form grows like 1/(1 - sigma^2);
    // the 1e-12 bound is meaningful for |sigma| <= 0.99 in double precision
    props.push_back({"kinematics.length_conservation", [] {
        std::mt19937_64 rng(101);
        std::uniform_real_distribution<double> usig(-0.99, 0.99), uval(-1.0, 1.0);
        double worst = 0;
        for (int i = 0; i < 2000; ++i) {
            const double sigma = usig(rng), tau = uval(rng), x = uval(rng);
            const auto [rho, lam] = rho_from_sigma(sigma);
            const auto n = Boost<double>::from_sigma(sigma, 1, 2);
            const Eigen::Vector2d v = apply_boost(n, Eigen::Vector2d(tau, x));
            const double lhs = tau * tau + x * x;
            const double rhs = length_squared(rho, lam, v(0), v(1));
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        }
        return worst < 1e-12 ? "" : strf("max residual %.3g >= 1e-12", worst);
    }});

    props.push_back({"kinematics.parameter_identity", [] {
        double worst = 0;
        for (int i = 0; i <= 500; ++i) {
            const double sigma = 0.002 * i;  // spans both branches, skips sigma = 1
            if (std::abs(1.0 - sigma * sigma) < 1e-3) continue;
            const auto [rho, lam] = rho_from_sigma(sigma);
            worst = std::max(worst, std::abs(rho * rho + lam * lam - 1.0));
        }
        for (int i = 0; i <= 500; ++i) {
            const double e = 1.0 + 0.1 * i;
            const auto [rho, lam] = lambda_of_energy(1.0, e);
            worst = std::max(worst, std::abs(rho * rho + lam * lam - 1.0));
        }
        return worst < 1e-12 ? "" : strf("max |rho^2 + lam^2 - 1| = %.3g", worst);
    }});

    props.push_back({"kinematics.metric_determinant", [] {
        double worst = 0;
        for (int dim : {2, 3, 4})
            for (int i = 0; i < 500; ++i) {
                const double rho = i / 500.0;
                const auto g = Metric<double>::from_rho(rho, 1, dim);
                worst = std::max(worst, std::abs(g.matrix().determinant() - 1.0));
            }
        return worst < 1e-12 ? "" : strf("max |det - 1| = %.3g", worst);
    }});

    props.push_back({"kinematics.velocity_roundtrip", [] {
        double worst = 0;
        for (int i = 1; i < 1000; ++i) {
            const double sub = i / 1000.0;
            const auto [rho_s, lam_s] = rho_from_sigma(sub);
            worst = std::max(worst,
                             std::abs(sigma0_from_rho(rho_s, Branch::Subluminal).sigma - sub));
            const double super = 1.0 + 0.1 * i;
            const auto [rho_h, lam_h] = rho_from_sigma(super);
            worst = std::max(
                worst, std::abs(sigma0_from_rho(rho_h, Branch::Superluminal).sigma - super) /
                           super);
        }
        return worst < 1e-12 ? "" : strf("max round-trip residual = %.3g", worst);
    }});

    props.push_back({"kinematics.invariance_relation", [] {
        std::mt19937_64 rng(202);
        std::uniform_real_distribution<double> uval(-1.0, 1.0);
        double worst = 0;
        for (int i = 0; i <= 40; ++i)
            for (int j = 0; j <= 40; ++j) {
                const double rho_obs = 0.95 * i / 40.0, rho_part = 0.95 * j / 40.0;
                const auto g = Metric<double>::from_rho(rho_obs);
                const auto gp = Metric<double>::from_rho(rho_part);
                const auto sol = sigma_between_frames(rho_obs, rho_part);
                const auto n = Boost<double>::from_sigma(sol.sigma.sigma).matrix();
                worst = std::max(
                    worst, (g.matrix() - n * gp.matrix() * n).cwiseAbs().maxCoeff());
                if (sol.sigma_hat) {
                    const auto nh = Boost<double>::from_sigma(sol.sigma_hat->sigma).matrix();
                    worst = std::max(
                        worst, (g.matrix() - nh * gp.matrix() * nh).cwiseAbs().maxCoeff());
                }
                // inner-product invariance for a random 4-vector
                const Eigen::Vector4d x(uval(rng), uval(rng), uval(rng), uval(rng));
                const Eigen::Vector4d xp = n * x;
                worst = std::max(worst, std::abs(inner_product(g, x, x) -
                                                 inner_product(gp, xp, xp)));
            }
        return worst < 1e-10 ? "" : strf("max invariance residual = %.3g", worst);
    }});

    props.push_back({"kinematics.velocity_composition", [] {
        std::mt19937_64 rng(303);
        std::uniform_real_distribution<double> usub(0.0, 0.99), usup(1.05, 20.0);
        double worst_sub = 0, worst_sup = 0;
        for (int i = 0; i < 1000; ++i) {
            const double s0 = usub(rng), sp0 = usub(rng);
            const auto sol =
                sigma_between_frames(rho_from_sigma(s0).first, rho_from_sigma(sp0).first);
            const double composed = compose_sigma(sp0, s0, Branch::Subluminal).sigma;
            worst_sub = std::max(worst_sub, std::abs(sol.sigma.sigma - composed));

            const double h0 = usup(rng), hp0 = usup(rng);
            if (std::abs(h0 - hp0) < 0.05) continue;  // near-equal frames amplify roundoff
            const auto hsol =
                sigma_between_frames(rho_from_sigma(h0).first, rho_from_sigma(hp0).first);
            if (!hsol.sigma_hat) continue;
            const double hcomposed = compose_sigma(hp0, h0, Branch::Superluminal).sigma;
            worst_sup = std::max(worst_sup, std::abs(hsol.sigma_hat->sigma - hcomposed) /
                                                std::abs(hcomposed));
        }
        if (worst_sub >= 1e-12) return strf("max subluminal residual = %.3g", worst_sub);
        return worst_sup < 1e-10 ? "" : strf("max superluminal residual = %.3g", worst_sup);
    }});

    props.push_back({"kinematics.mass_shell", [] {
        const double m0 = 1.7;
        double worst = 0;
        for (int axis : {1, 2, 3})
            for (int i = 1; i < 1000; ++i) {
                const double sigma = 0.98 * i / 1000.0;
                const auto [rho, lam] = rho_from_sigma(sigma);
                const auto g = Metric<double>::from_rho(rho, axis);
                const auto p = four_momentum(m0, sigma, axis);
                worst = std::max(worst, std::abs(inner_product(g, p.p, p.p) - m0 * m0) /
                                            (m0 * m0));
            }
        return worst < 1e-12 ? "" : strf("max mass-shell residual = %.3g", worst);
    }});

    props.push_back({"kinematics.eigenzeit_identity", [] {
        double worst = 0;
        for (int i = 0; i < 1000; ++i) {
            const double beta = 0.95 * i / 1000.0;
            const auto [rho, lam] = rho_from_sigma(beta);
            // ds^2 route with dx = -beta dtau, per unit dtau
            const double ds = std::sqrt(length_squared(rho, lam, 1.0, -beta));
            worst = std::max(worst, std::abs(ds - eigenzeit_factor(beta)));
        }
        return worst < 1e-14 ? "" : strf("max eigenzeit residual = %.3g", worst);
    }});

    props.push_back({"kinematics.oms_agreement", [] {
        std::mt19937_64 rng(404);
        std::uniform_real_distribution<double> uval(-2.0, 2.0);
        double worst = 0;
        for (int i = 0; i < 1000; ++i) {
            const double beta = -0.999 + 1.998 * i / 999.0;
            const double tau = uval(rng), x = uval(rng);
            const auto [tau_o, x_o] = oms_lorentz(beta, tau, x);
            const auto n = Boost<double>::from_sigma(beta, 1, 2);
            const Eigen::Vector2d v = apply_boost(n, Eigen::Vector2d(tau, x));
            worst = std::max(worst, std::abs(v(0) - tau_o) + std::abs(v(1) - x_o));
        }
        return worst < 1e-12 ? "" : strf("max oracle disagreement = %.3g", worst);
    }});

    props.push_back({"kinematics.positive_definiteness", [] {
        std::mt19937_64 rng(505);
        std::uniform_real_distribution<double> urho(0.0, 1.0 - 1e-9), uval(-1.0, 1.0);
        for (int i = 0; i < 10000; ++i) {
            const auto g = Metric<double>::from_rho(urho(rng));
            Eigen::Vector4d x(uval(rng), uval(rng), uval(rng), uval(rng));
            if (x.norm() == 0) continue;
            if (!(inner_product(g, x, x) > 0))
                return strf("non-positive length at draw %d", i);
        }
        return std::string{};
    }});

    props.push_back({"dimension.weights_sum", [] {
        double worst = 0;
        for (int i = 0; i < 1000; ++i) {
            const auto g = Metric<double>::from_rho(i / 1000.0);
            worst = std::max(worst,
                             std::abs(normalized_eigenvalues(g).weights.sum() - 1.0));
            worst = std::max(
                worst, std::abs(normalized_eigenvalues_numeric(g).weights.sum() - 1.0));
        }
        return worst < 1e-12 ? "" : strf("max |sum - 1| = %.3g", worst);
    }});

    props.push_back({"dimension.closed_form_vs_numeric", [] {
        double worst = 0;
        for (int i = 0; i < 1000; ++i) {
            const double rho = (1.0 - 1e-9) * i / 999.0;
            const auto g = Metric<double>::from_rho(rho);
            worst = std::max(worst, (normalized_eigenvalues(g).weights -
                                     normalized_eigenvalues_numeric(g).weights)
                                        .abs()
                                        .maxCoeff());
        }
        return worst < 1e-10 ? "" : strf("max closed-vs-numeric deviation = %.3g", worst);
    }});

    props.push_back({"dimension.q_bounds_and_monotone", [] {
        const double q0 = effective_dim(normalized_eigenvalues(Metric<double>::from_rho(0.0)));
        if (std::abs(q0 - 4.0) > 1e-12) return strf("q(rho=0) = %.15g != 4", q0);
        double prev = q0;
        for (int i = 1; i < 1000; ++i) {
            const double rho = (1.0 - 1e-9) * i / 999.0;
            const double q =
                effective_dim(normalized_eigenvalues(Metric<double>::from_rho(rho)));
            if (q < 1.0 - 1e-12 || q > 4.0 + 1e-12) return strf("q out of [1,4]: %.15g", q);
            if (q > prev + 1e-12) return strf("q not non-increasing at rho=%.6f", rho);
            prev = q;
        }
        return std::string{};
    }});

    props.push_back({"dimension.uniform_weights", [] {
        for (int l = 1; l <= 4; ++l) {
            Eigen::ArrayXd w = Eigen::ArrayXd::Constant(l, 1.0 / l);
            if (std::abs(effective_dim(w) - l) > 1e-12)
                return strf("effective_dim(uniform %d) != %d", l, l);
        }
        return std::string{};
    }});

    props.push_back({"dimension.multinomial_matches_entropy", [] {
        const std::vector<std::vector<long long>> occupations{
            {5000, 5000}, {4000, 3000, 2000, 1000}, {2500, 2500, 2500, 2500}, {9000, 1000}};
        for (const auto& occ : occupations) {
            const long long m =
                std::accumulate(occ.begin(), occ.end(), static_cast<long long>(0));
            Eigen::ArrayXd p(static_cast<Eigen::Index>(occ.size()));
            for (std::size_t i = 0; i < occ.size(); ++i)
                p(static_cast<Eigen::Index>(i)) = static_cast<double>(occ[i]) / m;
            const double oracle = multinomial_entropy_oracle(occ);
            const double smooth = effective_dim(p);
            if (std::abs(oracle / smooth - 1.0) > 0.01)
                return strf("oracle %.6g vs exp(entropy) %.6g beyond 1%%", oracle, smooth);
        }
        return std::string{};
    }});

    props.push_back({"loop.quadrature_vs_analytic", [] {
        const double pi = std::numbers::pi;
        for (double kstar : {2.0, 10.0, 1000.0}) {
            const auto r = dzero_quadrature(kstar);
            const double exact =
                (kstar * kstar / 2.0 + 0.5 * std::log(kstar * kstar - 1.0)) / (8.0 * pi * pi);
            if (std::abs(r.segment1.real() - exact) > 1e-6 * std::abs(exact))
                return detail::strf("segment-1 PV off at k*=%g", kstar);
            if (std::abs(r.segment1.imag() + 1.0 / (16.0 * pi)) > 1e-10)
                return detail::strf("segment-1 pole term off at k*=%g", kstar);
        }
        return std::string{};
    }});

    props.push_back({"loop.paper_imaginary_constant", [] {
        for (double kstar = 10.5; kstar < 1e18; kstar *= 7.0) {
            const auto r = dzero_paper_closed_form(kstar);
            if (std::abs(r.d0.imag() - 0.48) > 0.005)
                return detail::strf("Im = %.6g at k*=%g", r.d0.imag(), kstar);
        }
        return std::string{};
    }});

    props.push_back({"loop.modes_share_dominant_term", [] {
        for (double kstar = 100.0; kstar < 1e12; kstar *= 100.0) {
            const double re_paper = dzero_paper_closed_form(kstar).d0.real();
            const double re_plemelj = dzero_quadrature(kstar).d0.real();
            if (std::abs(re_paper - re_plemelj) / re_paper > 10.0 / kstar)
                return detail::strf("dominant-term mismatch at k*=%g", kstar);
        }
        return std::string{};
    }});

    props.push_back({"loop.mass_correction_consistency", [] {
        const auto at_zero = mass_correction(128.0, 0.0, DzeroMode::PaperClosedForm);
        if (at_zero.mu_star != 1.0 || at_zero.tau_l_s.has_value())
            return std::string("w = 0 must give mu* = 1 and no lifetime");
        double prev = 1.0;
        for (double w : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
            const auto mc = mass_correction(128.0, w, DzeroMode::PaperClosedForm);
            if (mc.mu_star <= prev) return std::string("mu* not increasing in w");
            if (std::abs(mc.mu_star * mc.mu_star - 1.0 - w * mc.theta_js) > 1e-12)
                return std::string("mu*^2 - 1 != w Theta");
            prev = mc.mu_star;
        }
        const auto rows = theta_table(kDefaultMassesGev);
        const double ref = rows[0].theta_js * rows[0].m0c2_gev * rows[0].m0c2_gev;
        for (const auto& row : rows)
            if (std::abs(row.theta_js * row.m0c2_gev * row.m0c2_gev / ref - 1.0) > 1e-10)
                return std::string("Theta * m^2 not constant across the mass table");
        return std::string{};
    }});

    props.push_back({"loop.surface_factor_coefficients", [] {
        const double pi = std::numbers::pi;
        if (std::abs(surface_factor(4.0) - 1.0 / (8.0 * pi * pi)) > 1e-15)
            return std::string("q=4 coefficient != 1/(8 pi^2)");
        if (std::abs(surface_factor(1.0) - 1.0 / pi) > 1e-15)
            return std::string("q=1 coefficient != 1/pi");
        if (std::abs(surface_factor(2.0) - 1.0 / (2.0 * pi)) > 1e-15)
            return std::string("q=2 coefficient != 1/(2 pi)");
        return std::string{};
    }});

    props.push_back({"blur.determinism", [] {
        const auto model = FluctuationModel::from_boost(0.2, 0.4, 1.0, 0.05, 7);
        const auto a = sample_fluctuations(model, 2000);
        const auto b = sample_fluctuations(model, 2000);
        const bool same = a.cxx == b.cxx && a.cxpx == b.cxpx && a.cxpxp == b.cxpxp;
        return same ? "" : "identical model and n gave different ensembles";
    }});

    props.push_back({"blur.exact_moment_recovery", [] {
        const auto model = FluctuationModel::from_boost(0.3, 0.5, 2.0, 0.0, 0);
        MomentMatrix pop;
        pop.cxx = model.s2 * model.g.inverse_matrix();
        pop.cxpx = model.n_true.matrix() * pop.cxx;
        pop.n_samples = 4;
        const MatrixD<double> truth = model.n_true.matrix();
        const double e_inv =
            (estimate_inverse_form(pop).n_hat - truth).cwiseAbs().maxCoeff();
        const double e_adj =
            (estimate_adjugate_form(pop, 4).n_hat - truth).cwiseAbs().maxCoeff();
        return (e_inv < 1e-12 && e_adj < 1e-12)
                   ? ""
                   : detail::strf("population-moment recovery errors %.3g / %.3g", e_inv, e_adj);
    }});

    props.push_back({"blur.adjugate_equals_inverse", [] {
        std::mt19937_64 rng(606);
        std::normal_distribution<double> normal;
        double worst = 0;
        for (int dim : {2, 3, 4})
            for (int rep = 0; rep < 25; ++rep) {
                MatrixD<double> a(dim, dim), c(dim, dim);
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j) a(i, j) = normal(rng);
                MomentMatrix m;
                m.cxx = a * a.transpose() + MatrixD<double>::Identity(dim, dim) * dim;
                m.cxpx = MatrixD<double>(dim, dim);
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j) m.cxpx(i, j) = normal(rng);
                m.n_samples = dim;
                worst = std::max(worst, (estimate_adjugate_form(m, dim).n_hat -
                                         estimate_inverse_form(m).n_hat)
                                            .cwiseAbs()
                                            .maxCoeff());
            }
        return worst < 1e-10 ? "" : detail::strf("max adjugate-vs-inverse gap = %.3g", worst);
    }});

    props.push_back({"blur.convergence_rate", [] {
        std::vector<double> ratios;
        for (std::uint64_t seed = 1; seed <= 12; ++seed) {
            const auto model = FluctuationModel::from_boost(0.0, 0.5, 1.0, 0.01, seed);
            const auto coarse = estimate_inverse_form(sample_fluctuations(model, 25000),
                                                      model.g, model.s2);
            const auto fine = estimate_inverse_form(sample_fluctuations(model, 100000),
                                                    model.g, model.s2);
            ratios.push_back(*coarse.max_abs_error / *fine.max_abs_error);
        }
        std::sort(ratios.begin(), ratios.end());
        const double median = 0.5 * (ratios[5] + ratios[6]);
        return (median > 1.3 && median < 3.0)
                   ? ""
                   : detail::strf("median error ratio %.3g outside [1.3, 3.0]", median);
    }});

    props.push_back({"blur.sample_covariance", [] {
        const long long n = 10000;
        int pass = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const auto model = FluctuationModel::from_boost(0.2, 0.3, 1.0, 0.0, seed);
            const auto ens = sample_fluctuations(model, n);
            const MatrixD<double> target = model.s2 * model.g.inverse_matrix();
            bool ok = true;
            for (int i = 0; i < 4 && ok; ++i)
                for (int j = 0; j < 4 && ok; ++j) {
                    const double se = std::sqrt(
                        (target(i, i) * target(j, j) + target(i, j) * target(i, j)) / n);
                    ok = std::abs(ens.cxx(i, j) - target(i, j)) < 4.0 * se;
                }
            pass += ok;
        }
        return pass >= 95 ? ""
                          : detail::strf("only %d/100 runs within 4 standard errors", pass);
    }});

    return props;
}

}  // namespace nes
