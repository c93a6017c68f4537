#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nes/constants.hpp"
#include "nes/errors.hpp"
#include "nes/quadrature.hpp"

namespace nes {

/// How the regularized two-point function at the origin is evaluated.
///  - PaperClosedForm: the published closed-form expression, including its
///    tail term (1/pi)(arctan k* + i pi/2).
///  - PlemeljQuadrature: rigorous evaluation of the split integral; principal
///    value plus Sokhotski-Plemelj pole term on the first segment, exact
///    pole-free tail on the second. The two modes agree on the dominant
///    k*^2/(16 pi^2) real term but differ in the constant and imaginary
///    parts; results are therefore always tagged with their mode.
enum class DzeroMode { PaperClosedForm, PlemeljQuadrature };

inline const char* to_string(DzeroMode mode) {
    return mode == DzeroMode::PaperClosedForm ? "paper" : "plemelj";
}

inline DzeroMode dzero_mode_from_string(const std::string& s) {
    if (s == "paper") return DzeroMode::PaperClosedForm;
    if (s == "plemelj") return DzeroMode::PlemeljQuadrature;
    throw DomainError("unknown mode '" + s + "' (expected 'paper' or 'plemelj')");
}

struct LoopResult {
    std::complex<double> d0;
    std::complex<double> segment1;  ///< momentum range [0, k*], dimension 4
    std::complex<double> segment2;  ///< momentum range [k*, infinity), dimension 1
    double kstar{};
    DzeroMode mode{};
};

/// Split point of the loop integral: ratio of the Planck to the rest energy.
inline double kstar_of(double m0c2_gev, const PhysicalConstants& c = {}) {
    if (!(m0c2_gev > 0)) throw DomainError("rest energy must be positive");
    return c.planck_energy_gev / m0c2_gev;
}

/// Angular prefactor 2 / [(4 pi)^{q/2} Gamma(q/2)] of the radial momentum
/// integral in q dimensions; 1/(8 pi^2) at q = 4 and 1/pi at q = 1.
inline double surface_factor(double q) {
    if (!(q > 0)) throw DomainError("dimension must be positive");
    return 2.0 / (std::pow(4.0 * std::numbers::pi, 0.5 * q) * std::tgamma(0.5 * q));
}

/// Published closed form:
/// (1/16 pi^2)(k*^2 + ln(k*^2 - 1) - i pi) + (1/pi)(arctan k* + i pi/2).
inline LoopResult dzero_paper_closed_form(double kstar) {
    if (!(kstar > 1)) throw DomainError("k* must exceed 1 (log argument)");
    const double pi = std::numbers::pi;
    const std::complex<double> seg1{
        (kstar * kstar + std::log(kstar * kstar - 1.0)) / (16.0 * pi * pi),
        -pi / (16.0 * pi * pi)};
    const std::complex<double> seg2{std::atan(kstar) / pi, 0.5};
    return {seg1 + seg2, seg1, seg2, kstar, DzeroMode::PaperClosedForm};
}

namespace detail {

/// PV of the segment-1 integrand k^3/(k^2 - 1) over [0, k*] by adaptive
/// quadrature. The pole at k = 1 is handled with a symmetric window
/// (1 - delta, 1 + delta) whose PV equals the integral of the finite
/// symmetrized function h(1 + t) + h(1 - t) over (0, delta].
inline QuadratureResult principal_value_segment1(double kstar, double rel_tol,
                                                 int max_intervals) {
    auto h = [](double k) { return k * k * k / (k * k - 1.0); };
    const double delta = std::min(0.5, 0.5 * (kstar - 1.0));
    auto symmetrized = [&](double t) { return h(1.0 + t) + h(1.0 - t); };

    QuadratureResult total{};
    auto accumulate = [&total](const QuadratureResult& r) {
        total.value += r.value;
        total.error += r.error;
        total.intervals += r.intervals;
    };
    accumulate(integrate_adaptive(symmetrized, 0.0, delta, rel_tol, 0.0, max_intervals));
    if (1.0 - delta > 0.0)
        accumulate(integrate_adaptive(h, 0.0, 1.0 - delta, rel_tol, 0.0, max_intervals));
    if (kstar > 1.0 + delta)
        accumulate(integrate_adaptive(h, 1.0 + delta, kstar, rel_tol, 0.0, max_intervals));
    return total;
}

}  // namespace detail

/// Rigorous evaluation of the split integral. Segment 1 is
/// (1/8 pi^2) [ PV + (-i pi) f(k0)/|g'(k0)| ] with f = k^3, g = k^2 - 1,
/// k0 = 1, so its imaginary part is exactly -1/(16 pi). Segment 2 has no
/// pole on [k*, inf) and integrates to (1/2 pi) ln((k* + 1)/(k* - 1)).
inline LoopResult dzero_quadrature(double kstar, double rel_tol = 1e-10) {
    if (!(kstar > 1)) throw DomainError("k* must exceed 1 (pole ordering)");
    if (!(rel_tol > 0)) throw DomainError("tolerance must be positive");
    const double pi = std::numbers::pi;

    const QuadratureResult pv = detail::principal_value_segment1(kstar, rel_tol, 4000);
    const std::complex<double> seg1{pv.value / (8.0 * pi * pi), -1.0 / (16.0 * pi)};
    const std::complex<double> seg2{std::log1p(2.0 / (kstar - 1.0)) / (2.0 * pi), 0.0};
    return {seg1 + seg2, seg1, seg2, kstar, DzeroMode::PlemeljQuadrature};
}

inline LoopResult dzero(double kstar, DzeroMode mode, double rel_tol = 1e-10) {
    return mode == DzeroMode::PaperClosedForm ? dzero_paper_closed_form(kstar)
                                              : dzero_quadrature(kstar, rel_tol);
}

/// First-order dressed propagator
/// 1 / (q^2 - [1 + w hbar Re(D0)/2] + i [eps - w hbar Im(D0)/2]), eps -> 0.
inline std::complex<double> dressed_propagator(double q2, double w, std::complex<double> d0,
                                               const PhysicalConstants& c = {}) {
    if (w < 0) throw DomainError("coupling must be non-negative");
    const double shift = 0.5 * w * c.hbar_js;
    const std::complex<double> denom{q2 - (1.0 + shift * d0.real()), -shift * d0.imag()};
    if (denom == std::complex<double>{0.0, 0.0})
        throw PoleError("propagator evaluated exactly on its pole");
    return 1.0 / denom;
}

/// True when the first-order expansion behind the dressed propagator is
/// trustworthy (w hbar |D0| / 2 well below 1).
inline bool weak_coupling_ok(double w, std::complex<double> d0, const PhysicalConstants& c = {}) {
    return 0.5 * w * c.hbar_js * std::abs(d0) < 0.1;
}

struct MassCorrection {
    double m0c2_gev{};
    double kstar{};
    double coupling_per_js{};
    double theta_js{};                ///< hbar Re(D0) / 2
    double mu_star{};                 ///< sqrt(1 + w Theta), scaled mass
    std::optional<double> tau_l_s;    ///< lifetime in seconds; absent for w = 0 or Im(D0) <= 0
    std::complex<double> d0;
    DzeroMode mode{};
};

/// First-order mass correction and lifetime for rest energy m0c2 and
/// coupling w (units 1/Js). Theta = hbar Re(D0)/2, mu* = sqrt(1 + w Theta),
/// tau_L = (hbar / m0c2) sqrt(2 / (w hbar Im D0)). A coupling at or beyond
/// 1/Theta leaves the weak-coupling regime and is rejected.
inline MassCorrection mass_correction(double m0c2_gev, double w, DzeroMode mode,
                                      const PhysicalConstants& c = {}) {
    if (w < 0) throw DomainError("coupling must be non-negative");
    const double kstar = kstar_of(m0c2_gev, c);
    const LoopResult loop = dzero(kstar, mode);
    const double theta = 0.5 * c.hbar_js * loop.d0.real();
    if (w * theta >= 1.0)
        throw WeakCouplingError("w * Theta >= 1: outside the weak-coupling regime");

    MassCorrection out;
    out.m0c2_gev = m0c2_gev;
    out.kstar = kstar;
    out.coupling_per_js = w;
    out.theta_js = theta;
    out.mu_star = std::sqrt(1.0 + w * theta);
    out.d0 = loop.d0;
    out.mode = mode;
    if (w > 0 && loop.d0.imag() > 0) {
        const double m0c2_j = m0c2_gev * c.joule_per_gev;
        out.tau_l_s = c.hbar_js / m0c2_j * std::sqrt(2.0 / (w * c.hbar_js * loop.d0.imag()));
    }
    return out;
}

struct ThetaRow {
    double m0c2_gev{};
    double kstar{};
    double theta_js{};
    double theta_inv_per_js{};
};

inline constexpr std::array<double, 3> kDefaultMassesGev{128.0, 5.1e-4, 0.94};

/// Mass-correction scale per rest energy, paper closed form.
inline std::vector<ThetaRow> theta_table(std::span<const double> masses_gev,
                                         const PhysicalConstants& c = {}) {
    std::vector<ThetaRow> rows;
    rows.reserve(masses_gev.size());
    for (double m : masses_gev) {
        const double kstar = kstar_of(m, c);
        const double theta = 0.5 * c.hbar_js * dzero_paper_closed_form(kstar).d0.real();
        rows.push_back({m, kstar, theta, 1.0 / theta});
    }
    return rows;
}

}  // namespace nes
