#pragma once

// Discrete-time soliton-amplitude channel.
//
// The input is X = sqrt(A0) (square root of the launched amplitude), the
// output Y = sqrt(A). Given X = x, Y^2 is half of a noncentral chi-squared
// variable with four degrees of freedom:
//
//     Y^2 = 1/2 * sum_{i=1..4} (x / sqrt(2) + N_i)^2,   N_i ~ N(0, sigma_N^2).

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "solcap/errors.hpp"
#include "solcap/quadrature.hpp"
#include "solcap/specfun.hpp"

namespace solcap::channel {

/// Normalized variance of the accumulated ASE noise, sigma_N^2.
class ChannelParams {
public:
    explicit ChannelParams(double sigma_n_sq) : sigma_n_sq_(sigma_n_sq) {
        if (!(sigma_n_sq > 0.0) || !std::isfinite(sigma_n_sq)) {
            throw DomainError("ChannelParams: sigma_n_sq must be positive and finite");
        }
    }
    double sigma_n_sq() const { return sigma_n_sq_; }

private:
    double sigma_n_sq_;
};

/// Rayleigh input law for X; sigma_S^2 = E[X^2] = E[A0].
class InputDist {
public:
    explicit InputDist(double sigma_s_sq) : sigma_s_sq_(sigma_s_sq) {
        if (!(sigma_s_sq > 0.0) || !std::isfinite(sigma_s_sq)) {
            throw DomainError("InputDist: sigma_s_sq must be positive and finite");
        }
    }
    double sigma_s_sq() const { return sigma_s_sq_; }

private:
    double sigma_s_sq_;
};

/// rho = sigma_S^2 / sigma_N^2.
class Rho {
public:
    explicit Rho(double rho) : rho_(rho) {
        if (!(rho > 0.0) || !std::isfinite(rho)) {
            throw DomainError("Rho: rho must be positive and finite");
        }
    }
    static Rho from_db(double db) { return Rho(std::pow(10.0, db / 10.0)); }
    double value() const { return rho_; }
    double db() const { return 10.0 * std::log10(rho_); }

    /// Noise variance that realizes this rho for the given input scale.
    ChannelParams channel_for(const InputDist& input) const {
        return ChannelParams(input.sigma_s_sq() / rho_);
    }

private:
    double rho_;
};

/// Caller-owned random stream.
///
/// Engine: std::mt19937_64 (sequence fixed by the C++ standard). Uniforms take
/// the top 53 bits, u = (k + 1) / 2^53 in (0, 1]. Normals use the Box-Muller
/// transform, consuming two uniforms per pair and returning the cosine branch
/// first. Streams are reproducible for a given seed; across platforms only up
/// to libm rounding in log/cos/sin.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    double uniform_open0() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform_open0()));
        const double angle = 2.0 * std::numbers::pi * uniform_open0();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Bessel arguments above this go through the log-domain path.
inline constexpr double kDirectBesselMax = 700.0;

namespace detail {

inline void require(bool ok, const char* msg) {
    if (!ok) {
        throw DomainError(msg);
    }
}

} // namespace detail

/// ln p_{A|A0}(a | a0); -inf at a = 0.
inline double log_pdf_amplitude(double a, double a0, const ChannelParams& params) {
    detail::require(a >= 0.0 && std::isfinite(a), "pdf_amplitude: a must be >= 0");
    detail::require(a0 > 0.0 && std::isfinite(a0), "pdf_amplitude: a0 must be > 0");
    if (a == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    const double s = params.sigma_n_sq();
    const double r = std::sqrt(a0 * a);
    const double z = 2.0 * r / s;
    // -(a0 + a)/s + z = -(sqrt(a) - sqrt(a0))^2 / s
    const double gap = std::sqrt(a) - std::sqrt(a0);
    const double log_bessel_part = (z >= specfun::kLogI1SeriesMax)
        ? -gap * gap / s + std::log(specfun::bessel_i1_scaled(z))
        : -(a0 + a) / s + specfun::log_bessel_i1(z);
    return -std::log(s) + 0.5 * std::log(a / a0) + log_bessel_part;
}

/// Conditional density of the received amplitude A given the sent amplitude A0.
inline double pdf_amplitude(double a, double a0, const ChannelParams& params) {
    detail::require(a >= 0.0 && std::isfinite(a), "pdf_amplitude: a must be >= 0");
    detail::require(a0 > 0.0 && std::isfinite(a0), "pdf_amplitude: a0 must be > 0");
    if (a == 0.0) {
        return 0.0;
    }
    const double s = params.sigma_n_sq();
    const double z = 2.0 * std::sqrt(a0 * a) / s;
    const double decay = (a0 + a) / s;
    if (z <= kDirectBesselMax && decay <= kDirectBesselMax) {
        return std::sqrt(a / a0) / s * std::exp(-decay) * specfun::bessel_i1(z);
    }
    return std::exp(log_pdf_amplitude(a, a0, params));
}

/// ln p_{Y|X}(y | x); -inf at y = 0.
inline double log_pdf_y_given_x(double y, double x, const ChannelParams& params) {
    detail::require(y >= 0.0 && std::isfinite(y), "pdf_y_given_x: y must be >= 0");
    detail::require(x > 0.0 && std::isfinite(x), "pdf_y_given_x: x must be > 0");
    if (y == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    const double s = params.sigma_n_sq();
    const double z = 2.0 * x * y / s;
    const double gap = y - x;
    const double log_bessel_part = (z >= specfun::kLogI1SeriesMax)
        ? -gap * gap / s + std::log(specfun::bessel_i1_scaled(z))
        : -(x * x + y * y) / s + specfun::log_bessel_i1(z);
    return std::log(2.0 / s) + 2.0 * std::log(y) - std::log(x) + log_bessel_part;
}

/// Conditional density of Y = sqrt(A) given X = sqrt(A0).
inline double pdf_y_given_x(double y, double x, const ChannelParams& params) {
    detail::require(y >= 0.0 && std::isfinite(y), "pdf_y_given_x: y must be >= 0");
    detail::require(x > 0.0 && std::isfinite(x), "pdf_y_given_x: x must be > 0");
    if (y == 0.0) {
        return 0.0;
    }
    const double s = params.sigma_n_sq();
    const double z = 2.0 * x * y / s;
    const double decay = (x * x + y * y) / s;
    if (z <= kDirectBesselMax && decay <= kDirectBesselMax) {
        return 2.0 / s * (y * y / x) * std::exp(-decay) * specfun::bessel_i1(z);
    }
    return std::exp(log_pdf_y_given_x(y, x, params));
}

/// Draws Y given X = x from the four-Gaussian representation.
inline double sample_y(double x, const ChannelParams& params, RngStream& rng) {
    detail::require(x > 0.0 && std::isfinite(x), "sample_y: x must be > 0");
    const double sigma = std::sqrt(params.sigma_n_sq());
    const double mean = x / std::numbers::sqrt2;
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double c = mean + sigma * rng.normal();
        sum += c * c;
    }
    return std::sqrt(0.5 * sum);
}

inline double rayleigh_pdf(double x, const InputDist& input) {
    detail::require(x >= 0.0 && std::isfinite(x), "rayleigh_pdf: x must be >= 0");
    const double s = input.sigma_s_sq();
    return 2.0 * x / s * std::exp(-x * x / s);
}

inline double rayleigh_sample(const InputDist& input, RngStream& rng) {
    return std::sqrt(-input.sigma_s_sq() * std::log(rng.uniform_open0()));
}

/// Support window half-width, in units of sigma_N, beyond which p_{Y|X}(y|x)
/// is below e^{-144} of its peak as a function of either argument.
inline constexpr double kWindowSigmas = 12.0;

/// Marginal output density p_Y(y) = int p_{Y|X}(y|x) p_X(x) dx by quadrature.
/// The x-range is split at y +- 12 sigma_N so the adaptive rule always sees
/// the (possibly very narrow) conditional peak.
inline double output_pdf_numeric(double y, const InputDist& input, const ChannelParams& params,
                                 quad::Tolerance tol = {1e-10, 1e-300}) {
    detail::require(y >= 0.0 && std::isfinite(y), "output_pdf_numeric: y must be >= 0");
    if (y == 0.0) {
        return 0.0;
    }
    auto integrand = [&](double x) {
        if (x <= 0.0) {
            return 0.0;
        }
        const double px = rayleigh_pdf(x, input);
        if (px == 0.0) {
            return 0.0;
        }
        return pdf_y_given_x(y, x, params) * px;
    };
    const double c = kWindowSigmas * std::sqrt(params.sigma_n_sq());
    const double lo = std::max(0.0, y - c);
    const double hi = y + c;
    double total = 0.0;
    if (lo > 0.0) {
        total += quad::integrate_finite(integrand, 0.0, lo, tol).value;
    }
    total += quad::integrate_finite(integrand, lo, hi, tol).value;
    total += quad::integrate_semi_infinite(integrand, hi, tol, std::sqrt(input.sigma_s_sq())).value;
    return total;
}

/// P(Y <= y | X = x) by quadrature of the conditional density.
inline double cdf_y_given_x(double y, double x, const ChannelParams& params,
                            quad::Tolerance tol = {1e-12, 1e-15}) {
    detail::require(y >= 0.0 && std::isfinite(y), "cdf_y_given_x: y must be >= 0");
    detail::require(x > 0.0 && std::isfinite(x), "cdf_y_given_x: x must be > 0");
    if (y == 0.0) {
        return 0.0;
    }
    auto f = [&](double v) { return pdf_y_given_x(v, x, params); };
    const double sd = std::sqrt(params.sigma_n_sq());
    const double lo = std::max(0.0, x - kWindowSigmas * sd);
    if (y <= lo) {
        return 0.0;
    }
    // Split at the mode region so the adaptive rule resolves the peak.
    const double mid = std::min(y, x);
    double total = 0.0;
    if (mid > lo) {
        total += quad::integrate_finite(f, lo, mid, tol).value;
    }
    if (y > mid) {
        total += quad::integrate_finite(f, mid, y, tol).value;
    }
    return std::min(1.0, total);
}

} // namespace solcap::channel
