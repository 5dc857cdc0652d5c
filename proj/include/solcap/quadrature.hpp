#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals, and a panel
// extension scheme for [a, inf).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "solcap/errors.hpp"

namespace solcap::quad {

struct QuadResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
};

struct Tolerance {
    double rel = 1e-10;
    double abs = 1e-12;
};

/// Work budget per top-level call, in integrand evaluations.
inline constexpr std::size_t kMaxEvaluations = 1'000'000;

/// Semi-infinite integration gives up after this many doubling panels.
inline constexpr int kMaxPanels = 200;

namespace detail {

// Kronrod nodes on [0, 1] (odd indices are the Gauss points) and weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool at_roundoff;  // error estimate is the rounding floor; bisection cannot help
    bool operator<(const Segment& other) const { return error < other.error; }
};

// One 15-point Kronrod panel with the QUADPACK error heuristic.
template <class F>
Segment gk15(const F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    double resabs = std::fabs(resk);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(centre - dx);
        f2[j] = f(centre + dx);
        const double s = f1[j] + f2[j];
        resk += kWgk[j] * s;
        resabs += kWgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
        if (j % 2 == 1) {
            resg += kWg[j / 2] * s;
        }
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::fabs(fc - mean);
    for (std::size_t j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));
    }
    resk *= half;
    resabs *= std::fabs(half);
    resasc *= std::fabs(half);
    double err = std::fabs((resk - resg * half));
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    bool at_roundoff = false;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        const double floor = 50.0 * eps * resabs;
        // Within a small factor of the floor, bisection no longer pays.
        at_roundoff = err <= 4.0 * floor;
        err = std::max(err, floor);
    }
    return {a, b, resk, err, at_roundoff};
}

inline std::string describe(const char* what, double a, double b) {
    std::ostringstream os;
    os.precision(17);
    os << what << " on [" << a << ", " << b << "]";
    return os.str();
}

} // namespace detail

/// Globally adaptive G7K15 integration of f over [a, b].
///
/// Bisects the panel with the largest error estimate until the summed error is
/// below max(tol.abs, tol.rel * |value|). Panels whose error estimate is at
/// the rounding floor, or which are narrower than the floating point
/// resolution, are retired as they are; the returned error estimate then
/// exceeds the requested target. Throws ConvergenceError when the
/// evaluation budget is exhausted and DomainError for an invalid interval.
template <class F>
QuadResult integrate_finite(const F& f, double a, double b, Tolerance tol = {},
                            std::size_t max_evaluations = kMaxEvaluations) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
        throw DomainError(detail::describe("integrate_finite: invalid interval", a, b));
    }
    if (!(tol.rel > 0.0) || !(tol.abs > 0.0)) {
        throw DomainError("integrate_finite: tolerances must be positive");
    }

    std::priority_queue<detail::Segment> active;
    double retired_value = 0.0;
    double retired_error = 0.0;

    auto first = detail::gk15(f, a, b);
    std::size_t evaluations = 15;
    double total = first.value;
    double total_error = first.error;
    active.push(first);

    auto target = [&] { return std::max(tol.abs, tol.rel * std::fabs(total)); };

    while (total_error > target()) {
        if (active.empty()) {
            break; // everything retired at machine resolution
        }
        if (evaluations + 30 > max_evaluations) {
            std::ostringstream os;
            os.precision(3);
            os << detail::describe("integrate_finite: evaluation budget exhausted", a, b)
               << " (error estimate " << total_error << ", target " << target() << ")";
            throw ConvergenceError(os.str());
        }
        const detail::Segment worst = active.top();
        active.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const bool negligible = worst.error <= 64.0 * std::numeric_limits<double>::epsilon() * target();
        if (worst.at_roundoff || negligible || !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon()
                                         * std::max(std::fabs(worst.a), std::fabs(worst.b))) {
            retired_value += worst.value;
            retired_error += worst.error;
            continue;
        }
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        evaluations += 30;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        active.push(left);
        active.push(right);
    }

    // Re-sum to shed the drift of the running updates.
    double value = retired_value;
    double error = retired_error;
    while (!active.empty()) {
        value += active.top().value;
        error += active.top().error;
        active.pop();
    }
    if (!std::isfinite(value)) {
        throw ConvergenceError(detail::describe("integrate_finite: non-finite integrand", a, b));
    }
    return {value, error, evaluations};
}

/// Integral of f over [a, inf) by adaptive panels [a, a+h], [a+h, a+3h], ...
/// whose widths double. Integration stops once the panel contributions shrink
/// geometrically and the implied tail sum falls below a tenth of the tolerance.
///
/// `first_step` should be on the scale of the integrand's main feature; the
/// stop rule is only consulted after the integrand has started to decay.
template <class F>
QuadResult integrate_semi_infinite(const F& f, double a, Tolerance tol = {},
                                   double first_step = 1.0,
                                   std::size_t max_evaluations = kMaxEvaluations) {
    if (!std::isfinite(a)) {
        throw DomainError("integrate_semi_infinite: lower limit must be finite");
    }
    if (!(first_step > 0.0) || !std::isfinite(first_step)) {
        throw DomainError("integrate_semi_infinite: first_step must be positive");
    }

    QuadResult out;
    double lo = a;
    double width = first_step;
    double previous = std::numeric_limits<double>::quiet_NaN();
    double peak = 0.0;
    for (int panel = 0; panel < kMaxPanels; ++panel) {
        const double hi = lo + width;
        if (!std::isfinite(hi)) {
            break;
        }
        // Panels are integrated to the tolerance of the whole integral.
        const double abs_target = std::max(tol.abs, tol.rel * std::fabs(out.value));
        const auto piece = integrate_finite(f, lo, hi, Tolerance{tol.rel, std::max(abs_target, tol.abs)},
                                            max_evaluations - std::min(max_evaluations - 1, out.evaluations));
        out.value += piece.value;
        out.abs_error_estimate += piece.abs_error_estimate;
        out.evaluations += piece.evaluations;
        if (out.evaluations >= max_evaluations) {
            throw ConvergenceError("integrate_semi_infinite: evaluation budget exhausted");
        }

        const double mag = std::fabs(piece.value);
        peak = std::max(peak, mag);
        const double goal = 0.1 * std::max(tol.abs, tol.rel * std::fabs(out.value));
        if (panel >= 1 && mag <= previous) {
            const double ratio = (previous > 0.0) ? mag / previous : 0.0;
            const double tail = (ratio < 1.0) ? mag * ratio / (1.0 - ratio)
                                              : std::numeric_limits<double>::infinity();
            if ((ratio < 0.5 && tail < goal) || (peak > 0.0 && mag == 0.0)) {
                out.abs_error_estimate += tail;
                return out;
            }
        }
        previous = mag;
        lo = hi;
        width *= 2.0;
    }
    throw ConvergenceError(detail::describe("integrate_semi_infinite: integrand tail did not decay",
                                            a, lo));
}

} // namespace solcap::quad
