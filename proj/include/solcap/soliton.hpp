#pragma once

// Single fundamental soliton in normalized units (time in symbol intervals,
// distance in units of L_s = T_s^2 / |beta2|) and the mapping from physical
// link parameters to that normalization.

#include <cmath>
#include <string>

#include "solcap/errors.hpp"
#include "solcap/quadrature.hpp"

namespace solcap::soliton {

/// Physical fibre and transmission parameters (SI units).
struct PhysicalLink {
    double beta2;          // group velocity dispersion [s^2/m], < 0 (anomalous)
    double gamma_nl;       // Kerr nonlinearity [1/(W m)]
    double alpha;          // attenuation [1/m]
    double k_t;            // Raman pump factor, >= 1
    double photon_energy;  // h * nu_opt [J]
    double t_s;            // symbol interval [s]
    double length;         // link length [m]
};

/// The same link in dimensionless units.
struct NormalizedLink {
    double l_s;          // normalization length T_s^2/|beta2| [m]
    double noise_d;      // noise intensity D (dimensionless)
    double sigma0_sq;    // ASE power spectral density [W/Hz]
    double sigma_n_sq;   // accumulated noise variance (L/L_s) D / 2
    double power_scale;  // (gamma L_s)^-1 [W]
    double z_end;        // L / L_s
};

struct SeparationMargin {
    double overlap;  // e^{-a0}; isolated pulses need this << 1
    double width;    // T0 = 1/a0 in symbol intervals; must stay below 1
};

namespace detail {
inline void require_amplitude(double a0, const char* fn) {
    if (!(a0 > 0.0) || !std::isfinite(a0)) {
        throw DomainError(std::string(fn) + ": amplitude must be positive and finite");
    }
}
} // namespace detail

/// a0 sech(a0 t).
inline double waveform(double a0, double t) {
    detail::require_amplitude(a0, "waveform");
    return a0 / std::cosh(a0 * t);
}

/// Energy of a fully contained soliton, 2 a0.
inline double energy_closed(double a0) {
    detail::require_amplitude(a0, "energy_closed");
    return 2.0 * a0;
}

/// Energy inside [-half_window, half_window]; equals 2 a0 tanh(a0 half_window).
inline quad::QuadResult energy_numeric(double a0, double half_window,
                                       quad::Tolerance tol = {1e-13, 1e-15}) {
    detail::require_amplitude(a0, "energy_numeric");
    if (!(half_window > 0.0) || !std::isfinite(half_window)) {
        throw DomainError("energy_numeric: half_window must be positive and finite");
    }
    auto power = [a0](double t) {
        const double q = waveform(a0, t);
        return q * q;
    };
    // Even integrand; integrate one side.
    auto half = quad::integrate_finite(power, 0.0, half_window, tol);
    half.value *= 2.0;
    half.abs_error_estimate *= 2.0;
    return half;
}

inline SeparationMargin separation_margin(double a0) {
    detail::require_amplitude(a0, "separation_margin");
    return {std::exp(-a0), 1.0 / a0};
}

/// Maps physical link parameters to dimensionless units.
inline NormalizedLink normalize(const PhysicalLink& link) {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!(link.beta2 < 0.0) || !std::isfinite(link.beta2)) {
        throw DomainError("normalize: beta2 must be negative (anomalous dispersion)");
    }
    if (!positive(link.gamma_nl)) throw DomainError("normalize: gamma_nl must be positive");
    if (!positive(link.alpha)) throw DomainError("normalize: alpha must be positive");
    if (!(link.k_t >= 1.0) || !std::isfinite(link.k_t)) throw DomainError("normalize: K_T must be >= 1");
    if (!positive(link.photon_energy)) throw DomainError("normalize: photon energy must be positive");
    if (!positive(link.t_s)) throw DomainError("normalize: T_s must be positive");
    if (!positive(link.length)) throw DomainError("normalize: length must be positive");

    NormalizedLink out{};
    out.l_s = link.t_s * link.t_s / std::fabs(link.beta2);
    out.sigma0_sq = link.alpha * link.k_t * link.photon_energy;
    out.noise_d = link.gamma_nl * out.l_s * out.l_s * out.sigma0_sq / (2.0 * link.t_s);
    out.z_end = link.length / out.l_s;
    out.sigma_n_sq = out.z_end * out.noise_d / 2.0;
    out.power_scale = 1.0 / (link.gamma_nl * out.l_s);
    return out;
}

/// SNR = 2 kappa rho, kappa being the bandwidth-to-symbol-rate ratio.
inline double snr(double rho, double kappa) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("snr: rho must be positive");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("snr: kappa must be positive");
    return 2.0 * kappa * rho;
}

} // namespace solcap::soliton
