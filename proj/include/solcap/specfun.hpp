#pragma once

// Scalar special functions: modified Bessel functions of order 0 and 1 and the
// digamma function, in plain and exponentially scaled forms.
//
// Branch layout (all seams verified to agree to better than 1e-13 relative):
//
//   I0, I1    x <  kBesselISeriesMax   power series (all terms positive)
//             x >= kBesselISeriesMax   Hankel asymptotic series for e^{-x} I(x)
//   K0, K1    x <  kBesselKSmallMax    small-argument series (K1 only)
//             x <  kBesselKAsymMin     trapezoid rule on e^{x}K(x) = int e^{-x(cosh t-1)} cosh(nu t) dt
//             x >= kBesselKAsymMin     Hankel asymptotic series for e^{x} K(x)
//   log I1    x <  kLogI1SeriesMax     ln(x/2) + log1p(series tail)
//             otherwise                x + ln(e^{-x} I1(x))
//   digamma   recurrence up to kDigammaAsymMin, then the Bernoulli asymptotic series
//
// Both Hankel series are truncated at the first term below 1e-17 of the sum;
// at x = 20 the smallest term of the divergent series is ~e^{-40}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "solcap/errors.hpp"

namespace solcap::specfun {

inline constexpr double kBesselISeriesMax = 20.0;
inline constexpr double kBesselKSmallMax = 1e-4;
inline constexpr double kBesselKAsymMin = 20.0;
inline constexpr double kLogI1SeriesMax = 1.0;
inline constexpr double kDigammaAsymMin = 10.0;

namespace detail {

inline void require_finite(double x, const char* fn) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(fn) + ": argument is not finite");
    }
}

inline void require_nonneg(double x, const char* fn) {
    require_finite(x, fn);
    if (x < 0.0) {
        throw DomainError(std::string(fn) + ": argument must be >= 0");
    }
}

inline void require_positive(double x, const char* fn) {
    require_finite(x, fn);
    if (!(x > 0.0)) {
        throw DomainError(std::string(fn) + ": argument must be > 0");
    }
}

// sum_{k>=0} (x^2/4)^k / (k! (k+order)!) ; multiply by (x/2)^order for I_order.
inline double bessel_i_series_core(double x, int order) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k + order));
        sum += term;
        if (term < 1e-17 * sum) {
            break;
        }
    }
    return sum;
}

// Hankel expansion of e^{-x} I_nu(x) (sign = -1) or e^{x} K_nu(x) (sign = +1),
// without the leading prefactor.
inline double hankel_series(double x, int order, double sign) {
    const double mu = 4.0 * order * order;
    double term = 1.0;
    double sum = 1.0;
    double last = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= sign * (mu - odd * odd) / (8.0 * k * x);
        const double mag = std::fabs(term);
        if (mag >= last) {
            break; // divergent tail
        }
        sum += term;
        last = mag;
        if (mag < 1e-17 * std::fabs(sum)) {
            break;
        }
    }
    return sum;
}

inline double bessel_i_scaled(double x, int order) {
    if (x < kBesselISeriesMax) {
        const double lead = (order == 0) ? 1.0 : 0.5 * x;
        return lead * bessel_i_series_core(x, order) * std::exp(-x);
    }
    return hankel_series(x, order, -1.0) / std::sqrt(2.0 * std::numbers::pi * x);
}

// e^{x} K_nu(x) by the trapezoid rule on the even, doubly-exponentially decaying
// integrand. The integrand is analytic in |Im t| < pi/2, so the rule converges
// geometrically; the step also resolves the Gaussian core of width ~1/sqrt(x).
inline double bessel_k_scaled_trapezoid(double x, int order) {
    const double h = std::min(0.25, 0.6 / std::sqrt(x));
    double sum = 0.5; // f(0) / 2 with f(0) = 1
    double prev = 1.0;
    for (int k = 1; k < 100000; ++k) {
        const double t = k * h;
        const double s = std::sinh(0.5 * t);
        const double f = std::exp(-2.0 * x * s * s) * std::cosh(order * t);
        sum += f;
        if (f < prev && f < 1e-18 * sum) {
            break;
        }
        prev = f;
    }
    return h * sum;
}

inline double bessel_k_scaled(double x, int order) {
    if (x >= kBesselKAsymMin) {
        return hankel_series(x, order, 1.0) * std::sqrt(std::numbers::pi / (2.0 * x));
    }
    return bessel_k_scaled_trapezoid(x, order);
}

} // namespace detail

/// e^{-x} I1(x). Finite for every x >= 0.
inline double bessel_i1_scaled(double x) {
    detail::require_nonneg(x, "bessel_i1_scaled");
    return detail::bessel_i_scaled(x, 1);
}

/// I1(x), the modified Bessel function of the first kind of order one.
/// Throws OverflowError once the value leaves the double range (x > ~713);
/// use bessel_i1_scaled or log_bessel_i1 there.
inline double bessel_i1(double x) {
    detail::require_nonneg(x, "bessel_i1");
    if (x < kBesselISeriesMax) {
        return 0.5 * x * detail::bessel_i_series_core(x, 1);
    }
    const double v = detail::bessel_i_scaled(x, 1) * std::exp(x);
    if (!std::isfinite(v)) {
        throw OverflowError("bessel_i1: result overflows double; use the scaled form");
    }
    return v;
}

/// ln I1(x) for x > 0, without overflow for large x.
inline double log_bessel_i1(double x) {
    detail::require_positive(x, "log_bessel_i1");
    if (x < kLogI1SeriesMax) {
        return std::log(0.5 * x) + std::log1p(detail::bessel_i_series_core(x, 1) - 1.0);
    }
    return x + std::log(detail::bessel_i_scaled(x, 1));
}

/// e^{x} K1(x). Finite for every x > 0 (behaves like 1/x near zero).
inline double bessel_k1_scaled(double x) {
    detail::require_positive(x, "bessel_k1_scaled");
    if (x < kBesselKSmallMax) {
        // K1(x) = 1/x + ln(x/2) I1(x) + (x/4)(2 gamma - 1) + O(x^3 ln x)
        const double k1 = 1.0 / x + std::log(0.5 * x) * 0.5 * x
                          + 0.25 * x * (2.0 * std::numbers::egamma - 1.0);
        return k1 * std::exp(x);
    }
    return detail::bessel_k_scaled(x, 1);
}

/// K1(x), the modified Bessel function of the second kind of order one.
/// Underflows gracefully to 0 for very large x.
inline double bessel_k1(double x) {
    detail::require_positive(x, "bessel_k1");
    if (x < kBesselKSmallMax) {
        return 1.0 / x + std::log(0.5 * x) * 0.5 * x + 0.25 * x * (2.0 * std::numbers::egamma - 1.0);
    }
    return detail::bessel_k_scaled(x, 1) * std::exp(-x);
}

namespace detail {

// Order-zero companions; only the Wronskian check in the test suite needs them.
inline double bessel_i0_scaled(double x) {
    require_nonneg(x, "bessel_i0_scaled");
    return bessel_i_scaled(x, 0);
}

inline double bessel_k0_scaled(double x) {
    require_positive(x, "bessel_k0_scaled");
    return bessel_k_scaled(x, 0);
}

} // namespace detail

/// Digamma function psi(x) = d/dx ln Gamma(x), for x > 0.
inline double digamma(double x) {
    detail::require_positive(x, "digamma");
    double shift = 0.0;
    while (x < kDigammaAsymMin) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli terms B_{2k} / (2k x^{2k}), k = 1..7, Horner in 1/x^2.
    const double tail =
        inv2 * (1.0 / 12.0
        - inv2 * (1.0 / 120.0
        - inv2 * (1.0 / 252.0
        - inv2 * (1.0 / 240.0
        - inv2 * (1.0 / 132.0
        - inv2 * (691.0 / 32760.0
        - inv2 * (1.0 / 12.0)))))));
    return shift + std::log(x) - 0.5 * inv - tail;
}

} // namespace solcap::specfun
