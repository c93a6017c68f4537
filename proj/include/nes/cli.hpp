#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "nes/blurred_lt.hpp"
#include "nes/constants.hpp"
#include "nes/effective_dimension.hpp"
#include "nes/errors.hpp"
#include "nes/kinematics.hpp"
#include "nes/loop.hpp"
#include "nes/verify.hpp"

namespace nes::cli {

/// CSV numbers carry 12 significant digits and switch to scientific notation
/// once the decimal exponent reaches +-6. Non-finite lifetimes render as inf.
inline std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[48];
    const int exp10 = static_cast<int>(std::floor(std::log10(std::abs(v))));
    if (exp10 >= 6 || exp10 <= -6)
        std::snprintf(buf, sizeof buf, "%.11e", v);
    else
        std::snprintf(buf, sizeof buf, "%.*f", 11 - exp10, v);
    return buf;
}

/// JSON numbers are rendered with up to 17 significant digits (lossless for
/// IEEE-754 doubles).
inline std::string json_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string json_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
    return out;
}

/// Flat JSON object writer preserving field order.
class JsonWriter {
public:
    JsonWriter& field(std::string_view key, double v) { return raw(key, json_number(v)); }
    JsonWriter& field(std::string_view key, long long v) { return raw(key, std::to_string(v)); }
    JsonWriter& field(std::string_view key, int v) { return raw(key, std::to_string(v)); }
    JsonWriter& field(std::string_view key, std::string_view v) { return raw(key, json_quote(v)); }
    JsonWriter& raw(std::string_view key, std::string_view value) {
        if (!body_.empty()) body_ += ',';
        body_ += json_quote(key);
        body_ += ':';
        body_ += value;
        return *this;
    }
    std::string str() const { return "{" + body_ + "}\n"; }

private:
    std::string body_;
};

inline std::string json_matrix(const MatrixD<double>& m) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i) out += ',';
        out += '[';
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += json_number(m(i, j));
        }
        out += ']';
    }
    out += ']';
    return out;
}

inline std::string error_json(std::string_view kind, std::string_view message) {
    return "{\"error\":{\"kind\":" + json_quote(kind) + ",\"message\":" + json_quote(message) +
           "}}\n";
}

namespace detail {

inline void write_payload(const std::string& payload, const std::string& path,
                          std::ostream& out) {
    if (path.empty()) {
        out << payload;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("io", "cannot open output path '" + path + "'");
    file << payload;
    if (!file) throw Error("io", "write failed for '" + path + "'");
}

inline std::string figure2_payload(int points, double sigma_max, const std::string& format) {
    const std::vector<Figure2Row> rows = figure2_data(points, sigma_max);
    if (format == "csv") {
        std::string s = "panel,sigma,rho,lambda\n";
        for (const Figure2Row& r : rows) {
            s += r.panel == Panel::Left ? "left," : "right,";
            s += csv_number(r.sigma0) + ',' + csv_number(r.rho) + ',' + csv_number(r.lam) + '\n';
        }
        return s;
    }
    std::string body;
    for (const Figure2Row& r : rows) {
        if (!body.empty()) body += ',';
        body += JsonWriter{}
                    .field("panel", r.panel == Panel::Left ? "left" : "right")
                    .field("sigma", r.sigma0)
                    .field("rho", r.rho)
                    .field("lambda", r.lam)
                    .str();
        body.pop_back();  // str() ends with a newline; rows are inline
    }
    return JsonWriter{}
        .field("command", "figure2")
        .field("points", points)
        .field("sigma_max", sigma_max)
        .raw("rows", "[" + body + "]")
        .str();
}

inline std::string figure3_payload(const std::vector<double>& masses, int points,
                                   double ratio_min, double ratio_max,
                                   const std::string& format) {
    const std::vector<Figure3Row> rows =
        figure3_data(masses, points, ratio_min, ratio_max, PhysicalConstants{});
    if (format == "csv") {
        std::string s = "mass_gev,e_over_ep,q\n";
        for (const Figure3Row& r : rows)
            s += csv_number(r.m0c2_gev) + ',' + csv_number(r.e_over_ep) + ',' +
                 csv_number(r.q) + '\n';
        return s;
    }
    std::string body;
    for (const Figure3Row& r : rows) {
        if (!body.empty()) body += ',';
        body += JsonWriter{}
                    .field("mass_gev", r.m0c2_gev)
                    .field("e_over_ep", r.e_over_ep)
                    .field("q", r.q)
                    .str();
        body.pop_back();
    }
    return JsonWriter{}
        .field("command", "figure3")
        .field("points", points)
        .field("ratio_min", ratio_min)
        .field("ratio_max", ratio_max)
        .raw("rows", "[" + body + "]")
        .str();
}

inline std::string dzero_payload(double mass_gev, DzeroMode mode, const std::string& format) {
    const PhysicalConstants consts;
    const LoopResult r = dzero(kstar_of(mass_gev, consts), mode);
    if (format == "csv") {
        std::string s = "mass_gev,kstar,mode,re,im,segment1_re,segment1_im,segment2_re,segment2_im\n";
        s += csv_number(mass_gev) + ',' + csv_number(r.kstar) + ',' + to_string(mode) + ',' +
             csv_number(r.d0.real()) + ',' + csv_number(r.d0.imag()) + ',' +
             csv_number(r.segment1.real()) + ',' + csv_number(r.segment1.imag()) + ',' +
             csv_number(r.segment2.real()) + ',' + csv_number(r.segment2.imag()) + '\n';
        return s;
    }
    return JsonWriter{}
        .field("command", "dzero")
        .field("mode", to_string(mode))
        .field("mass_gev", mass_gev)
        .field("kstar", r.kstar)
        .field("re", r.d0.real())
        .field("im", r.d0.imag())
        .field("segment1_re", r.segment1.real())
        .field("segment1_im", r.segment1.imag())
        .field("segment2_re", r.segment2.real())
        .field("segment2_im", r.segment2.imag())
        .str();
}

inline std::string mass_correction_payload(double mass_gev, double coupling, DzeroMode mode,
                                           const std::string& format, std::ostream& err) {
    const MassCorrection mc = mass_correction(mass_gev, coupling, mode, PhysicalConstants{});
    if (coupling * mc.theta_js >= 0.1)
        err << "warning: w Theta = " << json_number(coupling * mc.theta_js)
            << "; the first-order weak-coupling expansion is marginal\n";
    if (format == "csv") {
        std::string s =
            "mass_gev,kstar,mode,coupling_per_js,theta_js,mu_star,tau_l_s,d0_re,d0_im\n";
        s += csv_number(mc.m0c2_gev) + ',' + csv_number(mc.kstar) + ',' + to_string(mode) +
             ',' + csv_number(mc.coupling_per_js) + ',' + csv_number(mc.theta_js) + ',' +
             csv_number(mc.mu_star) + ',' +
             csv_number(mc.tau_l_s ? *mc.tau_l_s : std::numeric_limits<double>::infinity()) +
             ',' + csv_number(mc.d0.real()) + ',' + csv_number(mc.d0.imag()) + '\n';
        return s;
    }
    JsonWriter w;
    w.field("command", "mass_correction")
        .field("mode", to_string(mode))
        .field("mass_gev", mc.m0c2_gev)
        .field("kstar", mc.kstar)
        .field("coupling_per_js", mc.coupling_per_js)
        .field("theta_js", mc.theta_js)
        .field("mu_star", mc.mu_star);
    if (mc.tau_l_s) w.field("tau_l_s", *mc.tau_l_s);
    w.field("d0_re", mc.d0.real()).field("d0_im", mc.d0.imag());
    return w.str();
}

inline std::string theta_table_payload(const std::vector<double>& masses,
                                       const std::string& format) {
    const std::vector<ThetaRow> rows = theta_table(masses, PhysicalConstants{});
    if (format == "csv") {
        std::string s = "mass_gev,kstar,theta_js,theta_inv_per_js\n";
        for (const ThetaRow& r : rows)
            s += csv_number(r.m0c2_gev) + ',' + csv_number(r.kstar) + ',' +
                 csv_number(r.theta_js) + ',' + csv_number(r.theta_inv_per_js) + '\n';
        return s;
    }
    std::string body;
    for (const ThetaRow& r : rows) {
        if (!body.empty()) body += ',';
        body += JsonWriter{}
                    .field("mass_gev", r.m0c2_gev)
                    .field("kstar", r.kstar)
                    .field("theta_js", r.theta_js)
                    .field("theta_inv_per_js", r.theta_inv_per_js)
                    .str();
        body.pop_back();
    }
    return JsonWriter{}.field("command", "theta_table").raw("rows", "[" + body + "]").str();
}

inline std::string blur_estimate_payload(int dim, double rho, bool has_rho_prime,
                                         double rho_prime, bool has_sigma, double sigma,
                                         double s2, double e2, long long samples,
                                         std::uint64_t seed) {
    if (has_rho_prime == has_sigma)
        throw DomainError("give exactly one of --rho-prime or --sigma");
    const FluctuationModel model =
        has_sigma ? FluctuationModel::from_boost(rho, sigma, s2, e2, seed, 1, dim)
                  : FluctuationModel::from_frames(rho, rho_prime, s2, e2, seed, 1, dim);
    const FluctuationEnsemble ens = sample_fluctuations(model, samples);
    const EstimatedTransform inv = estimate_inverse_form(ens, model.g, model.s2);
    const EstimatedTransform adj = estimate_adjugate_form(ens.moments(), dim);
    const double adj_err =
        (adj.n_hat - model.n_true.matrix()).cwiseAbs().maxCoeff();
    const ResidualVarianceReport rep = residual_variance_check(model, ens);

    return JsonWriter{}
        .field("command", "blur_estimate")
        .field("dim", dim)
        .field("rho", model.g.rho)
        .field("rho_prime", model.g_prime.rho)
        .field("sigma", model.n_true.sigma)
        .field("s2", model.s2)
        .field("e2", model.e2)
        .field("samples", samples)
        .field("seed", static_cast<long long>(seed))
        .raw("n_true", json_matrix(model.n_true.matrix()))
        .raw("n_hat_inverse", json_matrix(inv.n_hat))
        .raw("n_hat_adjugate", json_matrix(adj.n_hat))
        .field("max_abs_error_inverse", *inv.max_abs_error)
        .field("max_abs_error_adjugate", adj_err)
        .field("s_prime2_hat", rep.s_prime2_hat)
        .field("trace_gprime_upper", rep.trace_gprime_upper)
        .field("e2_paper_relation", rep.e2_paper_relation)
        .field("e2_derived_relation", rep.e2_derived_relation)
        .str();
}

}  // namespace detail

/// Entry point shared by the binary and the tests. Returns the process exit
/// code: 0 success, 1 verification failures, 2 validation errors, 3 numeric
/// errors. Errors are reported as one-line JSON on `err`.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"non-orthogonal-metric kinematics, effective dimension and one-loop "
                 "regularization toolkit"};
    app.name("nes");
    app.require_subcommand(1);

    int f2_points = 200;
    double f2_sigma_max = 10.0;
    std::string f2_out, f2_format = "csv";
    CLI::App* fig2 = app.add_subcommand("figure2", "metric parameters vs velocity ratio");
    fig2->add_option("--points", f2_points, "samples per panel")->capture_default_str();
    fig2->add_option("--sigma-max", f2_sigma_max, "right-panel upper velocity ratio")
        ->capture_default_str();
    fig2->add_option("--out", f2_out, "output path (stdout when omitted)");
    fig2->add_option("--format", f2_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    std::vector<double> f3_masses;
    int f3_points = 200;
    double f3_ratio_min = 1e-12, f3_ratio_max = 1e2;
    std::string f3_out, f3_format = "csv";
    CLI::App* fig3 = app.add_subcommand("figure3", "effective dimension vs energy ratio");
    fig3->add_option("--mass-gev", f3_masses, "rest energy in GeV (repeatable)");
    fig3->add_option("--points", f3_points, "samples per mass")->capture_default_str();
    fig3->add_option("--ratio-min", f3_ratio_min, "lower E/E_p")->capture_default_str();
    fig3->add_option("--ratio-max", f3_ratio_max, "upper E/E_p")->capture_default_str();
    fig3->add_option("--out", f3_out, "output path (stdout when omitted)");
    fig3->add_option("--format", f3_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    double dz_mass = 128.0;
    std::string dz_mode = "paper", dz_out, dz_format = "json";
    CLI::App* dz = app.add_subcommand("dzero", "loop integral at the origin");
    dz->add_option("--mass-gev", dz_mass, "rest energy in GeV")->capture_default_str();
    dz->add_option("--mode", dz_mode, "paper or plemelj")
        ->check(CLI::IsMember({"paper", "plemelj"}))
        ->capture_default_str();
    dz->add_option("--out", dz_out, "output path (stdout when omitted)");
    dz->add_option("--format", dz_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    double mc_mass = 128.0, mc_coupling = 1.0;
    std::string mc_mode = "paper", mc_out, mc_format = "json";
    CLI::App* mc = app.add_subcommand("mass-correction", "first-order mass shift and lifetime");
    mc->add_option("--mass-gev", mc_mass, "rest energy in GeV")->capture_default_str();
    mc->add_option("--coupling", mc_coupling, "coupling w in 1/Js")->capture_default_str();
    mc->add_option("--mode", mc_mode, "paper or plemelj")
        ->check(CLI::IsMember({"paper", "plemelj"}))
        ->capture_default_str();
    mc->add_option("--out", mc_out, "output path (stdout when omitted)");
    mc->add_option("--format", mc_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    std::vector<double> tt_masses;
    std::string tt_out, tt_format = "csv";
    CLI::App* tt = app.add_subcommand("theta-table", "mass-correction scale per rest energy");
    tt->add_option("--mass-gev", tt_masses, "rest energy in GeV (repeatable)");
    tt->add_option("--out", tt_out, "output path (stdout when omitted)");
    tt->add_option("--format", tt_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    int bl_dim = 4;
    double bl_rho = 0.0, bl_rho_prime = 0.0, bl_sigma = 0.0, bl_s2 = 1.0, bl_e2 = 0.0;
    long long bl_samples = 100000;
    std::uint64_t bl_seed = 0;
    std::string bl_out;
    CLI::App* bl = app.add_subcommand("blur-estimate",
                                      "recover the boost from noisy coordinate moments");
    bl->add_option("--dim", bl_dim, "space dimension")
        ->check(CLI::IsMember({2, 3, 4}))
        ->capture_default_str();
    bl->add_option("--rho", bl_rho, "observer-frame metric parameter")->capture_default_str();
    CLI::Option* opt_rho_prime =
        bl->add_option("--rho-prime", bl_rho_prime, "particle-frame metric parameter");
    CLI::Option* opt_sigma =
        bl->add_option("--sigma", bl_sigma, "relative velocity ratio (|sigma| < 1)");
    opt_sigma->excludes(opt_rho_prime);
    bl->add_option("--s2", bl_s2, "fluctuation variance scale")->capture_default_str();
    bl->add_option("--e2", bl_e2, "noise variance scale")->capture_default_str();
    bl->add_option("--samples", bl_samples, "sample count")->capture_default_str();
    bl->add_option("--seed", bl_seed, "random seed")->capture_default_str();
    bl->add_option("--out", bl_out, "output path (stdout when omitted)");

    std::string vf_filter;
    bool vf_verbose = false;
    CLI::App* vf = app.add_subcommand("verify", "run the module invariant suites");
    vf->add_option("--filter", vf_filter, "only run properties whose name contains this");
    vf->add_flag("--verbose", vf_verbose, "include per-property timings");

    try {
        std::reverse(args.begin(), args.end());  // CLI11 vector parse wants reversed args
        app.parse(std::move(args));

        if (fig2->parsed()) {
            detail::write_payload(detail::figure2_payload(f2_points, f2_sigma_max, f2_format),
                                  f2_out, out);
        } else if (fig3->parsed()) {
            if (f3_masses.empty()) f3_masses = {190.0, PhysicalConstants{}.planck_energy_gev};
            detail::write_payload(detail::figure3_payload(f3_masses, f3_points, f3_ratio_min,
                                                          f3_ratio_max, f3_format),
                                  f3_out, out);
        } else if (dz->parsed()) {
            detail::write_payload(
                detail::dzero_payload(dz_mass, dzero_mode_from_string(dz_mode), dz_format),
                dz_out, out);
        } else if (mc->parsed()) {
            detail::write_payload(
                detail::mass_correction_payload(mc_mass, mc_coupling,
                                                dzero_mode_from_string(mc_mode), mc_format, err),
                mc_out, out);
        } else if (tt->parsed()) {
            if (tt_masses.empty())
                tt_masses.assign(kDefaultMassesGev.begin(), kDefaultMassesGev.end());
            detail::write_payload(detail::theta_table_payload(tt_masses, tt_format), tt_out,
                                  out);
        } else if (bl->parsed()) {
            detail::write_payload(
                detail::blur_estimate_payload(bl_dim, bl_rho, opt_rho_prime->count() > 0,
                                              bl_rho_prime, opt_sigma->count() > 0, bl_sigma,
                                              bl_s2, bl_e2, bl_samples, bl_seed),
                bl_out, out);
        } else if (vf->parsed()) {
            const VerifyReport report = run_properties(builtin_properties(), vf_filter);
            print_report(out, report, vf_verbose);
            return report.all_passed() ? 0 : 1;
        }
        return 0;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << error_json("validation", e.what());
        return 2;
    } catch (const Error& e) {
        err << error_json(e.kind(), e.what());
        return (e.kind() == "domain" || e.kind() == "io" || e.kind() == "validation") ? 2 : 3;
    } catch (const std::exception& e) {
        err << error_json("internal", e.what());
        return 3;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? static_cast<std::size_t>(argc) - 1 : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(std::move(args), out, err);
}

}  // namespace nes::cli
