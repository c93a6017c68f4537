#pragma once

#include <cmath>
#include <queue>
#include <vector>

#include "nes/errors.hpp"

namespace nes {

struct QuadratureResult {
    double value{};
    double error{};   ///< conservative absolute-error estimate
    int intervals{};  ///< panels used by the adaptive subdivision
};

namespace detail {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule
// (QUADPACK dqk15 constants).
inline constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_center = f(center);
    double kronrod = kKronrodWeights[7] * f_center;
    double gauss = kGaussWeights[3] * f_center;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[i] * sum;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b]. Bisects the
/// panel with the largest error estimate until the accumulated estimate meets
/// max(abs_tol, rel_tol * |value|). Throws QuadratureError (carrying the best
/// estimate) if max_intervals panels do not suffice.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-10,
                                    double abs_tol = 0.0, int max_intervals = 4000) {
    if (!(b > a)) throw DomainError("integration bounds must satisfy a < b");
    std::priority_queue<detail::Panel> panels;
    panels.push(detail::gauss_kronrod_15(f, a, b));
    double floor_error = 0.0;  // panels too narrow to split further
    int used = 1;
    double value = panels.top().value;
    double error = panels.top().error;

    while (error + floor_error > std::max(abs_tol, rel_tol * std::abs(value))) {
        if (panels.empty() || used >= max_intervals)
            throw QuadratureError("adaptive quadrature did not reach the requested tolerance",
                                  value, error + floor_error);
        const detail::Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b) ||
            (worst.b - worst.a) < 1e-14 * (1.0 + std::abs(mid))) {
            // width at the resolution limit; its error is irreducible
            floor_error += worst.error;
            error -= worst.error;
            continue;
        }
        const detail::Panel left = detail::gauss_kronrod_15(f, worst.a, mid);
        const detail::Panel right = detail::gauss_kronrod_15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++used;
    }
    return {value, error + floor_error, used};
}

}  // namespace nes
