#include <doctest.h>

#include <cmath>
#include <numbers>

#include <nes/loop.hpp>
#include <nes/quadrature.hpp>

using namespace nes;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

// test-side oracle: antiderivative of the segment-1 integrand, k^2/2 + ln|k^2-1|/2
double pv_antiderivative(double kstar) {
    return kstar * kstar / 2.0 + 0.5 * std::log(kstar * kstar - 1.0);
}
}  // namespace

TEST_CASE("quadrature engine on known integrals") {
    auto cubic = [](double x) { return x * x * x; };
    CHECK(integrate_adaptive(cubic, 0.0, 1.0, 1e-12).value == Approx(0.25).epsilon(1e-12));

    auto sine = [](double x) { return std::sin(x); };
    CHECK(integrate_adaptive(sine, 0.0, kPi, 1e-12).value == Approx(2.0).epsilon(1e-12));

    auto decaying = [](double x) { return std::exp(-x); };
    CHECK(integrate_adaptive(decaying, 0.0, 40.0, 1e-12).value == Approx(1.0).epsilon(1e-10));

    CHECK_THROWS_AS(integrate_adaptive(cubic, 1.0, 0.0, 1e-12), DomainError);
    // an impossible tolerance must fail loudly, carrying the best estimate
    auto noisy = [](double x) { return std::cos(50.0 * x * x); };
    try {
        integrate_adaptive(noisy, 0.0, 10.0, 1e-30, 0.0, 8);
        FAIL("expected QuadratureError");
    } catch (const QuadratureError& e) {
        CHECK(std::isfinite(e.achieved()));
        CHECK(e.error_estimate() > 0.0);
        CHECK(std::string(e.kind()) == "quadrature");
    }
}

TEST_CASE("kstar") {
    const PhysicalConstants c;
    CHECK(kstar_of(c.planck_energy_gev) == 1.0);
    CHECK(kstar_of(128.0) == Approx(9.375e16).epsilon(1e-14));
    CHECK(kstar_of(0.94) == Approx(1.2765957446808512e19).epsilon(1e-14));
    CHECK_THROWS_AS(kstar_of(0.0), DomainError);
}

TEST_CASE("surface factor") {
    CHECK(surface_factor(4.0) == Approx(1.0 / (8.0 * kPi * kPi)).epsilon(1e-14));
    CHECK(surface_factor(1.0) == Approx(1.0 / kPi).epsilon(1e-14));
    CHECK(surface_factor(2.0) == Approx(1.0 / (2.0 * kPi)).epsilon(1e-14));
    CHECK(surface_factor(4.0) == Approx(0.0126651479552922).epsilon(1e-12));
    CHECK(surface_factor(1.0) == Approx(0.318309886183791).epsilon(1e-12));
    CHECK_THROWS_AS(surface_factor(0.0), DomainError);
}

TEST_CASE("published closed form") {
    const auto r = dzero_paper_closed_form(2.0);
    CHECK(r.d0.real() == Approx(0.384703721850893).epsilon(1e-12));
    CHECK(r.d0.imag() == Approx(0.480105632113513).epsilon(1e-12));
    CHECK(r.mode == DzeroMode::PaperClosedForm);
    CHECK(r.d0 == r.segment1 + r.segment2);

    const auto big = dzero_paper_closed_form(9.4e16);
    CHECK(big.d0.real() == Approx(5.5954623666e31).epsilon(1e-9));
    CHECK(big.d0.real() == Approx(9.4e16 * 9.4e16 / (16.0 * kPi * kPi)).epsilon(1e-10));
    CHECK(big.d0.imag() == Approx(0.5 - 1.0 / (16.0 * kPi)).epsilon(1e-14));

    // the imaginary part is a constant, inside [0.475, 0.485] for any k*
    for (double k = 10.5; k < 1e18; k *= 13.0) {
        CHECK(dzero_paper_closed_form(k).d0.imag() > 0.475);
        CHECK(dzero_paper_closed_form(k).d0.imag() < 0.485);
    }

    CHECK_THROWS_AS(dzero_paper_closed_form(1.0), DomainError);
    CHECK_THROWS_AS(dzero_paper_closed_form(0.5), DomainError);
}

TEST_CASE("principal-value quadrature") {
    const auto r = dzero_quadrature(2.0);
    CHECK(r.d0.real() == Approx(0.207136915784356).epsilon(1e-9));
    CHECK(r.d0.imag() == Approx(-0.0198943678864869).epsilon(1e-12));
    CHECK(r.mode == DzeroMode::PlemeljQuadrature);
    CHECK(r.segment1.real() == Approx(0.0322873395013264).epsilon(1e-9));
    CHECK(r.segment1.imag() == Approx(-1.0 / (16.0 * kPi)).epsilon(1e-14));
    CHECK(r.segment2.real() == Approx(0.17484957628303).epsilon(1e-12));
    CHECK(r.segment2.imag() == 0.0);

    // quadrature vs the analytic antiderivative at representative split points
    for (double kstar : {2.0, 10.0, 1000.0}) {
        const auto q = dzero_quadrature(kstar);
        const double expected = pv_antiderivative(kstar) / (8.0 * kPi * kPi);
        CHECK(std::abs(q.segment1.real() - expected) / std::abs(expected) < 1e-6);
        CHECK(std::abs(q.segment1.imag() + 1.0 / (16.0 * kPi)) < 1e-10);
    }

    // both modes share the dominant real term at physical k*
    const double re_q = dzero_quadrature(9.4e16).d0.real();
    const double re_p = dzero_paper_closed_form(9.4e16).d0.real();
    CHECK(std::abs(re_q - re_p) / re_p < 1e-12);

    for (double kstar = 100.0; kstar < 1e15; kstar *= 1000.0) {
        const double rq = dzero_quadrature(kstar).d0.real();
        const double rp = dzero_paper_closed_form(kstar).d0.real();
        CHECK(std::abs(rq - rp) / rp <= 10.0 / kstar);
    }

    CHECK_THROWS_AS(dzero_quadrature(1.0), DomainError);
    CHECK_THROWS_AS(dzero_quadrature(2.0, -1.0), DomainError);
}

TEST_CASE("dressed propagator") {
    const PhysicalConstants c;
    // free particle
    const auto free_prop = dressed_propagator(2.0, 0.0, {0.0, 0.0}, c);
    CHECK(free_prop.real() == Approx(1.0).epsilon(1e-14));
    CHECK(free_prop.imag() == 0.0);

    // worked example: unit-scaled shifts 0.01 and 0.001
    const double w = 0.02 / c.hbar_js;  // w hbar Re(d0) / 2 = 0.01 with Re(d0) = 1
    const auto g = dressed_propagator(2.0, w, {1.0, 0.1}, c);
    const std::complex<double> expected = 1.0 / std::complex<double>(0.99, -0.001);
    CHECK(g.real() == Approx(expected.real()).epsilon(1e-12));
    CHECK(g.imag() == Approx(expected.imag()).epsilon(1e-12));

    // q^2 = mu*^2 zeroes the real part of the denominator
    const auto mc = mass_correction(128.0, 1.0, DzeroMode::PaperClosedForm, c);
    const auto at_pole = dressed_propagator(mc.mu_star * mc.mu_star, 1.0, mc.d0, c);
    const std::complex<double> denominator = 1.0 / at_pole;
    CHECK(std::abs(denominator.real()) < 1e-12);

    CHECK_THROWS_AS(dressed_propagator(1.0, 0.0, {0.0, 0.0}, c), PoleError);
    CHECK(weak_coupling_ok(0.0, {1e30, 0.0}, c));
    CHECK(!weak_coupling_ok(1.0, {1e34, 0.0}, c));
}

TEST_CASE("mass correction") {
    const PhysicalConstants c;
    const auto at_zero = mass_correction(128.0, 0.0, DzeroMode::PaperClosedForm, c);
    CHECK(at_zero.mu_star == 1.0);
    CHECK(!at_zero.tau_l_s.has_value());

    const auto higgs = mass_correction(128.0, 1.0, DzeroMode::PaperClosedForm, c);
    CHECK(higgs.kstar == Approx(9.375e16).epsilon(1e-14));
    CHECK(higgs.theta_js == Approx(2.934735665e-3).epsilon(1e-9));
    CHECK(higgs.mu_star == Approx(std::sqrt(1.0 + higgs.theta_js)).epsilon(1e-14));
    CHECK(higgs.mu_star * higgs.mu_star - 1.0 == Approx(higgs.theta_js).epsilon(1e-12));

    // lifetime follows its closed form exactly
    REQUIRE(higgs.tau_l_s.has_value());
    const double expected_tau = c.hbar_js / (128.0 * c.joule_per_gev) *
                                std::sqrt(2.0 / (1.0 * c.hbar_js * higgs.d0.imag()));
    CHECK(*higgs.tau_l_s == Approx(expected_tau).epsilon(1e-12));
    CHECK(*higgs.tau_l_s == Approx(1.022031578e-9).epsilon(1e-9));

    const auto electron = mass_correction(5.1e-4, 0.0, DzeroMode::PaperClosedForm, c);
    CHECK(electron.theta_js == Approx(1.848623957e8).epsilon(1e-9));
    const auto proton = mass_correction(0.94, 0.0, DzeroMode::PaperClosedForm, c);
    CHECK(proton.theta_js == Approx(54.4168279).epsilon(1e-9));

    // rigorous mode has a negative imaginary part; no decay interpretation
    const auto rigorous = mass_correction(128.0, 1.0, DzeroMode::PlemeljQuadrature, c);
    CHECK(rigorous.d0.imag() < 0.0);
    CHECK(!rigorous.tau_l_s.has_value());
    CHECK(rigorous.mode == DzeroMode::PlemeljQuadrature);

    // outside the weak-coupling regime
    CHECK_THROWS_AS(mass_correction(5.1e-4, 1.0, DzeroMode::PaperClosedForm, c),
                    WeakCouplingError);
    CHECK_THROWS_AS(mass_correction(128.0, -1.0, DzeroMode::PaperClosedForm, c), DomainError);
}

TEST_CASE("theta table") {
    const auto rows = theta_table(kDefaultMassesGev);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].theta_inv_per_js == Approx(340.7461912).epsilon(1e-9));
    CHECK(rows[1].theta_js == Approx(1.848623957e8).epsilon(1e-9));
    CHECK(rows[2].theta_js == Approx(54.4168279).epsilon(1e-9));

    // Theta scales with the inverse square of the rest energy
    const double ref = rows[0].theta_js * rows[0].m0c2_gev * rows[0].m0c2_gev;
    for (const auto& row : rows)
        CHECK(row.theta_js * row.m0c2_gev * row.m0c2_gev == Approx(ref).epsilon(1e-10));
}

TEST_CASE("mode strings") {
    CHECK(dzero_mode_from_string("paper") == DzeroMode::PaperClosedForm);
    CHECK(dzero_mode_from_string("plemelj") == DzeroMode::PlemeljQuadrature);
    CHECK(std::string(to_string(DzeroMode::PaperClosedForm)) == "paper");
    CHECK(std::string(to_string(DzeroMode::PlemeljQuadrature)) == "plemelj");
    CHECK_THROWS_AS(dzero_mode_from_string("exact"), DomainError);
}
