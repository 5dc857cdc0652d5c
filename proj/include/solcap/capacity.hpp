#pragma once

// Entropies and mutual information of the soliton-amplitude channel under a
// Rayleigh input, in closed form and by direct numerical integration.
//
// All internal quantities are in nats. rho = sigma_S^2 / sigma_N^2.

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>

#include "solcap/channel.hpp"
#include "solcap/errors.hpp"
#include "solcap/quadrature.hpp"
#include "solcap/specfun.hpp"

namespace solcap::capacity {

using channel::ChannelParams;
using channel::InputDist;
using channel::Rho;

enum class Units { nats, bits };

inline std::string_view to_string(Units u) { return u == Units::bits ? "bits" : "nats"; }

inline double convert(double nats, Units u) {
    return u == Units::bits ? nats / std::numbers::ln2 : nats;
}

/// Largest rho accepted by f_integral (about 50 dB).
inline constexpr double kMaxRho = 1e5;

/// Target relative accuracy of f_integral. The closed-form conditional entropy
/// subtracts two terms of size ~2 rho, so F is computed well beyond the
/// 1e-8 needed at moderate rho.
inline constexpr quad::Tolerance kFTolerance{1e-12, 1e-300};

namespace detail {

// sqrt(1 + 1/rho) - 1 without cancellation.
inline double a_minus_one(double rho) {
    const double inv = 1.0 / rho;
    return inv / (std::sqrt(1.0 + inv) + 1.0);
}

// xi K1(a xi) I1(xi) ln I1(xi) in scaled form.
inline double f_integrand(double xi, double a, double am1) {
    if (xi <= 0.0) {
        return 0.0;
    }
    const double bessel_product =
        specfun::bessel_k1_scaled(a * xi) * specfun::bessel_i1_scaled(xi) * std::exp(-am1 * xi);
    return xi * bessel_product * specfun::log_bessel_i1(xi);
}

inline std::string rho_message(const char* what, double rho) {
    std::ostringstream os;
    os.precision(17);
    os << what << " (rho = " << rho << ")";
    return os.str();
}

} // namespace detail

/// F(rho) = int_0^inf xi K1(sqrt(1 + 1/rho) xi) I1(xi) ln I1(xi) d xi.
///
/// The integrand peaks near xi ~ 1/(a-1) ~ 2 rho, so [0, xi_max] with
/// xi_max = max(50, 40/(a-1)) is covered by doubling breakpoints 1, 2, 4, ...
/// and the remainder by the semi-infinite panel rule.
inline double f_integral(const Rho& rho) {
    const double r = rho.value();
    if (r > kMaxRho) {
        throw DomainError(detail::rho_message("f_integral: rho above supported range", r));
    }
    const double am1 = detail::a_minus_one(r);
    const double a = 1.0 + am1;
    auto g = [a, am1](double xi) { return detail::f_integrand(xi, a, am1); };
    const double xi_max = std::max(50.0, 40.0 / am1);

    try {
        double total = 0.0;
        double lo = 0.0;
        double hi = 1.0;
        while (lo < xi_max) {
            hi = std::min(hi, xi_max);
            total += quad::integrate_finite(g, lo, hi, kFTolerance).value;
            lo = hi;
            hi *= 2.0;
        }
        total += quad::integrate_semi_infinite(g, xi_max, kFTolerance, xi_max).value;
        return total;
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(detail::rho_message((std::string("f_integral: ") + e.what()).c_str(), r));
    }
}

/// rho + psi(1/rho), evaluated as psi(1 + 1/rho) (digamma recurrence), which
/// never subtracts the two ~rho-sized terms.
inline double rho_plus_digamma_inv(double rho) {
    return specfun::digamma(1.0 + 1.0 / rho);
}

/// rho^{-1} sqrt(1 + rho^{-1}) F(rho) - 2 rho: the F-dependent part shared by
/// the conditional entropy and the mutual information. Both terms grow like
/// 2 rho; keeping their difference in one place makes the entropy identity
/// algebra hold to rounding.
inline double f_balance(double rho, double f_value) {
    const double a = std::sqrt(1.0 + 1.0 / rho);
    return a * f_value / rho - 2.0 * rho;
}

/// Output differential entropy h_Y for a Rayleigh input.
inline double h_y_closed(const InputDist& input, const Rho& rho) {
    const double r = rho.value();
    const double psi1 = -std::numbers::egamma;
    return 0.5 * std::log(input.sigma_s_sq())
           - 0.5 * std::log1p(1.0 / r)
           - 0.5 * std::log1p(r) / r
           + rho_plus_digamma_inv(r)
           - 1.5 * psi1 - std::numbers::ln2 + 1.0;
}

/// Conditional differential entropy h_{Y|X}, given a precomputed F(rho).
inline double h_y_given_x_closed(const InputDist& input, const Rho& rho, double f_value) {
    const double r = rho.value();
    const double psi1 = -std::numbers::egamma;
    // 2(1 + rho) - rho^{-1} a F  ==  2 - f_balance
    return 0.5 * std::log(input.sigma_s_sq())
           + 2.0 - f_balance(r, f_value)
           - (1.0 + 1.0 / r) * std::log1p(r)
           - 0.5 * psi1 - std::numbers::ln2;
}

inline double h_y_given_x_closed(const InputDist& input, const Rho& rho) {
    return h_y_given_x_closed(input, rho, f_integral(rho));
}

/// Mutual information I_XY for a Rayleigh input, given a precomputed F(rho).
/// Independent of sigma_S^2.
inline double mi_closed(const Rho& rho, double f_value) {
    const double r = rho.value();
    const double psi1 = -std::numbers::egamma;
    // ln(rho sqrt(1 + 1/rho)) + rho^{-1} ln sqrt(1 + rho)
    //   + [-rho + psi(1/rho)] + rho^{-1} a F - psi(1) - 1,
    // with -rho + psi(1/rho) + rho^{-1} a F = psi(1 + 1/rho) + f_balance.
    return std::log(r) + 0.5 * std::log1p(1.0 / r)
           + 0.5 * std::log1p(r) / r
           + rho_plus_digamma_inv(r) + f_balance(r, f_value)
           - psi1 - 1.0;
}

inline double mi_closed(const Rho& rho) { return mi_closed(rho, f_integral(rho)); }

/// Large-rho asymptote 1/2 ln rho.
inline double mi_asymptotic(const Rho& rho) { return 0.5 * std::log(rho.value()); }

struct EntropyReport {
    double h_y = 0.0;
    double h_y_given_x = 0.0;
    double mi = 0.0;
    double i_as = 0.0;
    double ratio = 0.0;  // i_as / mi (NaN when mi <= 0)
    Units units = Units::nats;
};

/// All closed-form quantities at one (sigma_S^2, rho) point.
inline EntropyReport report(const InputDist& input, const Rho& rho, Units units = Units::nats) {
    const double f_value = f_integral(rho);
    const double hy = h_y_closed(input, rho);
    const double hyx = h_y_given_x_closed(input, rho, f_value);
    const double mi = mi_closed(rho, f_value);
    const double ias = mi_asymptotic(rho);
    EntropyReport out;
    out.units = units;
    out.h_y = convert(hy, units);
    out.h_y_given_x = convert(hyx, units);
    out.mi = convert(mi, units);
    out.i_as = convert(ias, units);
    out.ratio = mi > 0.0 ? ias / mi : std::numeric_limits<double>::quiet_NaN();
    return out;
}

// ---------------------------------------------------------------------------
// Direct numerical integration of the defining entropy integrals.

struct NumericOptions {
    quad::Tolerance outer{1e-10, 1e-13};
    // p_Y(y) is positive, so a pure relative target is attainable.
    quad::Tolerance marginal{1e-12, 1e-300};
    // -p ln p changes sign where p = 1; the absolute floor keeps the target
    // attainable when the two lobes nearly cancel.
    quad::Tolerance conditional{1e-12, 1e-15};
};

/// -int p_Y ln p_Y dy with p_Y itself obtained by quadrature.
inline double h_y_numeric(const InputDist& input, const ChannelParams& params,
                          NumericOptions opt = {}) {
    auto integrand = [&](double y) {
        if (y <= 0.0) {
            return 0.0;
        }
        const double p = channel::output_pdf_numeric(y, input, params, opt.marginal);
        return p > 0.0 ? -p * std::log(p) : 0.0;
    };
    const double noise_scale = std::sqrt(params.sigma_n_sq());
    const double body = 6.0 * std::sqrt(input.sigma_s_sq() + params.sigma_n_sq());
    const double knee = std::min(4.0 * noise_scale, 0.5 * body);
    double total = quad::integrate_finite(integrand, 0.0, knee, opt.outer).value;
    total += quad::integrate_finite(integrand, knee, body, opt.outer).value;
    total += quad::integrate_semi_infinite(integrand, body, opt.outer, body).value;
    return total;
}

/// -int p_{Y|X}(y|x) ln p_{Y|X}(y|x) dy for one input value x > 0.
inline double conditional_entropy_at(double x, const ChannelParams& params,
                                     quad::Tolerance tol = {1e-12, 1e-15}) {
    auto integrand = [&](double y) {
        if (y <= 0.0) {
            return 0.0;
        }
        const double lp = channel::log_pdf_y_given_x(y, x, params);
        const double p = std::exp(lp);
        return p > 0.0 ? -p * lp : 0.0;
    };
    const double sd = std::sqrt(params.sigma_n_sq());
    const double lo = std::max(0.0, x - channel::kWindowSigmas * sd);
    const double hi = x + channel::kWindowSigmas * sd;
    double total = 0.0;
    if (x > lo) {
        total += quad::integrate_finite(integrand, lo, x, tol).value;
    }
    total += quad::integrate_finite(integrand, x, hi, tol).value;
    total += quad::integrate_semi_infinite(integrand, hi, tol, sd).value;
    return total;
}

/// int p_X(x) h(Y | X = x) dx.
inline double h_y_given_x_numeric(const InputDist& input, const ChannelParams& params,
                                  NumericOptions opt = {}) {
    auto integrand = [&](double x) {
        if (x <= 0.0) {
            return 0.0;
        }
        const double px = channel::rayleigh_pdf(x, input);
        return px > 0.0 ? px * conditional_entropy_at(x, params, opt.conditional) : 0.0;
    };
    const double input_scale = std::sqrt(input.sigma_s_sq());
    const double body = 6.0 * input_scale;
    const double knee = std::min(10.0 * std::sqrt(params.sigma_n_sq()), 0.5 * body);
    double total = quad::integrate_finite(integrand, 0.0, knee, opt.outer).value;
    total += quad::integrate_finite(integrand, knee, body, opt.outer).value;
    total += quad::integrate_semi_infinite(integrand, body, opt.outer, input_scale).value;
    return total;
}

struct NumericEntropies {
    double h_y;
    double h_y_given_x;
    double mi;
};

inline NumericEntropies numeric_entropies(const InputDist& input, const ChannelParams& params,
                                          NumericOptions opt = {}) {
    const double hy = h_y_numeric(input, params, opt);
    const double hyx = h_y_given_x_numeric(input, params, opt);
    return {hy, hyx, hy - hyx};
}

} // namespace solcap::capacity
