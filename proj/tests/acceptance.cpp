// Acceptance suite: one check per release criterion, each printing a
// [PASS]/[FAIL] line. Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nes/cli.hpp>
#include <nes/nes.hpp>

using namespace nes;

namespace {

constexpr double kPi = std::numbers::pi;

struct Criterion {
    int id;
    std::string summary;
    std::function<bool(std::string&)> run;
};

std::string format(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

bool within(double value, double lo, double hi) { return value >= lo && value <= hi; }

// --- criterion 5 helpers: each sub-suite returns its worst residual ---
// Draws stay at |sigma| <= 0.995: the identities condition like 1/(1-sigma^2)^2,
// so double precision supports the 1e-10 bound only away from the light cone.

double worst_length_conservation(int draws) {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> usig(-0.995, 0.995), uval(-1.0, 1.0);
    double worst = 0;
    for (int i = 0; i < draws; ++i) {
        const double sigma = usig(rng), tau = uval(rng), x = uval(rng);
        const auto [rho, lam] = rho_from_sigma(sigma);
        const Eigen::Vector2d v =
            apply_boost(Boost<double>::from_sigma(sigma, 1, 2), Eigen::Vector2d(tau, x));
        const double lhs = tau * tau + x * x;
        worst = std::max(worst, std::abs(lhs - length_squared(rho, lam, v(0), v(1))) /
                                    std::max(1.0, std::abs(lhs)));
    }
    return worst;
}

double worst_invariance_relation(int draws) {
    std::mt19937_64 rng(1002);
    std::uniform_real_distribution<double> urho(0.0, 0.999);
    double worst = 0;
    for (int i = 0; i < draws; ++i) {
        const double rho_obs = urho(rng), rho_part = urho(rng);
        const auto g = Metric<double>::from_rho(rho_obs);
        const auto gp = Metric<double>::from_rho(rho_part);
        const auto n = Boost<double>::from_sigma(
            sigma_between_frames(rho_obs, rho_part).sigma.sigma);
        worst = std::max(worst,
                         (g.matrix() - n.matrix() * gp.matrix() * n.matrix())
                             .cwiseAbs()
                             .maxCoeff());
    }
    return worst;
}

double worst_mass_shell(int draws) {
    std::mt19937_64 rng(1003);
    std::uniform_real_distribution<double> usig(1e-4, 0.995), umass(0.1, 10.0);
    double worst = 0;
    for (int i = 0; i < draws; ++i) {
        const double sigma = usig(rng), m0 = umass(rng);
        const auto p = four_momentum(m0, sigma);
        const auto g = Metric<double>::from_rho(rho_from_sigma(sigma).first);
        worst = std::max(worst,
                         std::abs(inner_product(g, p.p, p.p) - m0 * m0) / (m0 * m0));
    }
    return worst;
}

double worst_eigenzeit(int draws) {
    std::mt19937_64 rng(1004);
    std::uniform_real_distribution<double> ubeta(0.0, 0.995);
    double worst = 0;
    for (int i = 0; i < draws; ++i) {
        const double beta = ubeta(rng);
        const auto [rho, lam] = rho_from_sigma(beta);
        const double route = std::sqrt(length_squared(rho, lam, 1.0, -beta));
        worst = std::max(worst, std::abs(route - eigenzeit_factor(beta)));
    }
    return worst;
}

double worst_composition(int draws) {
    std::mt19937_64 rng(1005);
    std::uniform_real_distribution<double> usub(0.0, 0.995);
    double worst = 0;
    for (int i = 0; i < draws; ++i) {
        const double s0 = usub(rng), sp0 = usub(rng);
        const auto sol =
            sigma_between_frames(rho_from_sigma(s0).first, rho_from_sigma(sp0).first);
        worst = std::max(worst, std::abs(sol.sigma.sigma -
                                         compose_sigma(sp0, s0, Branch::Subluminal).sigma));
    }
    return worst;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria;

    criteria.push_back({1, "Theta for the 128 GeV scalar in [2.85e-3, 3.00e-3] Js", [](std::string& d) {
        const auto mc = mass_correction(128.0, 1.0, DzeroMode::PaperClosedForm);
        d = format("k* = %.6e, Theta = %.6e Js", mc.kstar, mc.theta_js);
        return within(mc.kstar, 9.374e16, 9.376e16) &&
               within(mc.theta_js, 2.85e-3, 3.00e-3);
    }});

    criteria.push_back({2, "mass scaling: electron/proton Theta and Higgs 1/Theta within 5%", [](std::string& d) {
        const std::vector<double> masses{128.0, 5.1e-4, 0.94};
        const auto rows = theta_table(masses);
        const double e_dev = std::abs(rows[1].theta_js / 1.8e8 - 1.0);
        const double p_dev = std::abs(rows[2].theta_js / 55.0 - 1.0);
        const double h_dev = std::abs(rows[0].theta_inv_per_js / 340.0 - 1.0);
        d = format("electron %.4g Js (%.2f%%), proton %.4g Js (%.2f%%), 1/Theta %.4g (%.2f%%)",
                   rows[1].theta_js, 100 * e_dev, rows[2].theta_js, 100 * p_dev,
                   rows[0].theta_inv_per_js, 100 * h_dev);
        return e_dev < 0.05 && p_dev < 0.05 && h_dev < 0.05;
    }});

    criteria.push_back({3, "paper-mode Im D(0) in [0.475, 0.485] for every k* > 10", [](std::string& d) {
        double lo = 1.0, hi = 0.0;
        for (double kstar = 10.0 + 1e-6; kstar < 1e18; kstar *= 1.37) {
            const double im = dzero_paper_closed_form(kstar).d0.imag();
            lo = std::min(lo, im);
            hi = std::max(hi, im);
        }
        d = format("Im range [%.6f, %.6f] over the k* sweep", lo, hi);
        return lo >= 0.475 && hi <= 0.485;
    }});

    criteria.push_back({4, "quadrature matches the analytic principal value and pole term", [](std::string& d) {
        double worst_re = 0, worst_im = 0;
        for (double kstar : {2.0, 10.0, 1000.0}) {
            const auto r = dzero_quadrature(kstar);
            const double exact =
                (kstar * kstar / 2.0 + 0.5 * std::log(kstar * kstar - 1.0)) /
                (8.0 * kPi * kPi);
            worst_re = std::max(worst_re,
                                std::abs(r.segment1.real() - exact) / std::abs(exact));
            worst_im = std::max(worst_im,
                                std::abs(r.segment1.imag() + 1.0 / (16.0 * kPi)));
        }
        d = format("max rel PV deviation %.3g (tol 1e-6), max pole-term deviation %.3g (tol 1e-10)",
                   worst_re, worst_im);
        return worst_re < 1e-6 && worst_im < 1e-10;
    }});

    criteria.push_back({5, "kinematics invariants < 1e-10 over 10^3 randomized draws each", [](std::string& d) {
        const double a = worst_length_conservation(2000);
        const double b = worst_invariance_relation(1500);
        const double c = worst_mass_shell(2000);
        const double e = worst_eigenzeit(2000);
        const double f = worst_composition(2000);
        d = format("residuals: length %.2g, relation %.2g, shell %.2g, eigenzeit %.2g, composition %.2g",
                   a, b, c, e, f);
        return a < 1e-10 && b < 1e-10 && c < 1e-10 && e < 1e-10 && f < 1e-10;
    }});

    criteria.push_back({6, "effective dimension: limits, eigen cross-check, entropy oracle", [](std::string& d) {
        const double q4 = effective_dim(normalized_eigenvalues(Metric<double>::from_rho(0.0)));
        Eigen::Array4d concentrated;
        concentrated << 1.0, 0.0, 0.0, 0.0;
        const double q1 = effective_dim(concentrated);

        double cross = 0;
        for (int i = 0; i < 1000; ++i) {
            const auto g = Metric<double>::from_rho((1.0 - 1e-9) * i / 999.0);
            cross = std::max(cross, (normalized_eigenvalues(g).weights -
                                     normalized_eigenvalues_numeric(g).weights)
                                        .abs()
                                        .maxCoeff());
        }

        const std::vector<long long> occ{4000, 3000, 2000, 1000};
        Eigen::Array4d p;
        p << 0.4, 0.3, 0.2, 0.1;
        const double oracle_dev =
            std::abs(multinomial_entropy_oracle(occ) / effective_dim(p) - 1.0);

        d = format("|q(0)-4| = %.2g, |q(e0)-1| = %.2g, eigen cross-check %.2g, oracle dev %.3g",
                   std::abs(q4 - 4.0), std::abs(q1 - 1.0), cross, oracle_dev);
        return std::abs(q4 - 4.0) < 1e-12 && std::abs(q1 - 1.0) < 1e-12 && cross < 1e-10 &&
               oracle_dev < 0.01;
    }});

    criteria.push_back({7, "figure-2 panels are strictly monotone", [](std::string& d) {
        const auto rows = figure2_data(1000, 10.0);
        bool ok = true;
        for (std::size_t i = 1; i < 1000; ++i) {
            ok = ok && rows[i].rho > rows[i - 1].rho && rows[i].lam < rows[i - 1].lam;
        }
        for (std::size_t i = 1001; i < 2000; ++i) {
            ok = ok && rows[i].rho < rows[i - 1].rho && rows[i].lam > rows[i - 1].lam;
        }
        d = format("left sigma [%.2g, %.8f], right sigma [%.8f, %.2f]", rows[0].sigma0,
                   rows[999].sigma0, rows[1000].sigma0, rows[1999].sigma0);
        return ok;
    }});

    criteria.push_back({8, "figure-3 limits for a light and a Planck-mass particle", [](std::string& d) {
        const PhysicalConstants c;
        auto q_at = [&](double mass_gev, double ratio) {
            // clamp to the rest energy, as the figure generator does
            return q_of_energy({mass_gev, std::max(ratio * c.planck_energy_gev, mass_gev)});
        };
        const double light = q_at(190.0, 1e-10);
        const double heavy_low = q_at(c.planck_energy_gev, 1e-3);
        const double heavy_high = q_at(c.planck_energy_gev, 1e2);
        d = format("q(190 GeV, 1e-10) = %.6f, q(E_p, 1e-3) = %.4f, q(E_p, 1e2) = %.4f",
                   light, heavy_low, heavy_high);
        return light < 1.01 && heavy_low > 3.9 && heavy_high < 1.2;
    }});

    criteria.push_back({9, "blurred-boost recovery and n^{-1/2} convergence", [](std::string& d) {
        const auto model = FluctuationModel::from_boost(0.0, 0.5, 1.0, 0.01, 42);
        const auto point =
            estimate_inverse_form(sample_fluctuations(model, 1000000), model.g, model.s2);

        std::vector<double> ratios;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto m = FluctuationModel::from_boost(0.0, 0.5, 1.0, 0.01, seed);
            const auto coarse =
                estimate_inverse_form(sample_fluctuations(m, 1000000), m.g, m.s2);
            const auto fine =
                estimate_inverse_form(sample_fluctuations(m, 4000000), m.g, m.s2);
            ratios.push_back(*coarse.max_abs_error / *fine.max_abs_error);
        }
        std::sort(ratios.begin(), ratios.end());
        const double median = 0.5 * (ratios[9] + ratios[10]);
        d = format("max|N_hat - N| = %.4g (tol 5e-3), median error ratio %.3f (in [1.6, 2.5])",
                   *point.max_abs_error, median);
        return *point.max_abs_error < 5e-3 && within(median, 1.6, 2.5);
    }});

    criteria.push_back({10, "adjugate and inverse estimators agree on random SPD moments", [](std::string& d) {
        std::mt19937_64 rng(777);
        std::normal_distribution<double> normal;
        double worst = 0;
        for (int dim : {2, 3, 4}) {
            for (int rep = 0; rep < 100; ++rep) {
                MatrixD<double> a(dim, dim), cxpx(dim, dim);
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j) {
                        a(i, j) = normal(rng);
                        cxpx(i, j) = normal(rng);
                    }
                MomentMatrix m;
                m.cxx = a * a.transpose() + dim * MatrixD<double>::Identity(dim, dim);
                m.cxpx = cxpx;
                m.n_samples = dim;
                worst = std::max(worst, (estimate_adjugate_form(m, dim).n_hat -
                                         estimate_inverse_form(m).n_hat)
                                            .cwiseAbs()
                                            .maxCoeff());
            }
        }
        d = format("max disagreement %.3g (tol 1e-10) over 100 draws x D in {2,3,4}", worst);
        return worst < 1e-10;
    }});

    criteria.push_back({11, "documented-discrepancy regression with mode tags", [](std::string& d) {
        const auto plemelj = dzero_quadrature(2.0);
        const auto paper = dzero_paper_closed_form(2.0);
        const bool values_ok =
            std::abs(plemelj.d0.real() - 0.207137) < 1e-4 &&
            std::abs(plemelj.d0.imag() + 0.0198944) < 1e-4 &&
            std::abs(paper.d0.real() - 0.38468) < 1e-4 &&
            std::abs(paper.d0.imag() - 0.48011) < 1e-4;
        const bool tags_ok = plemelj.mode == DzeroMode::PlemeljQuadrature &&
                             paper.mode == DzeroMode::PaperClosedForm;

        // both values leave the CLI with their mode tags attached
        std::ostringstream out_paper, out_plemelj, err;
        nes::cli::run({"dzero", "--mass-gev", "6e18", "--mode", "paper"}, out_paper, err);
        nes::cli::run({"dzero", "--mass-gev", "6e18", "--mode", "plemelj"}, out_plemelj, err);
        const bool emitted_ok =
            out_paper.str().find("\"mode\":\"paper\"") != std::string::npos &&
            out_plemelj.str().find("\"mode\":\"plemelj\"") != std::string::npos;

        // the lifetime follows its formula path, not the published constant
        const PhysicalConstants c;
        const auto mc = mass_correction(128.0, 1.0, DzeroMode::PaperClosedForm, c);
        const double formula = c.hbar_js / (128.0 * c.joule_per_gev) *
                               std::sqrt(2.0 / (1.0 * c.hbar_js * mc.d0.imag()));
        const bool tau_ok =
            mc.tau_l_s && std::abs(*mc.tau_l_s / formula - 1.0) < 1e-10;

        d = format("plemelj %.6f%+.7fi, paper %.5f%+.5fi, tau_L %.6e s",
                   plemelj.d0.real(), plemelj.d0.imag(), paper.d0.real(), paper.d0.imag(),
                   mc.tau_l_s ? *mc.tau_l_s : 0.0);
        return values_ok && tags_ok && emitted_ok && tau_ok;
    }});

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %2d: %s | %s (%.2fs)\n", pass ? "PASS" : "FAIL", c.id,
                    c.summary.c_str(), detail.c_str(), seconds);
        failures += !pass;
    }
    std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures;
}
