#pragma once

// Monte Carlo checks of the channel: plug-in entropy estimators driven by the
// exact sampler, and a binned chi-square goodness-of-fit test of the sampler
// against the conditional density.
//
// Parallel runs split the sample budget over a fixed number of substreams.
// Substream i is seeded with splitmix64(seed + (i + 1) * 0x9E3779B97F4A7C15)
// and owns samples [i * n / k, (i + 1) * n / k); per-substream sums are merged
// in index order, so results depend on (seed, substreams) but never on the
// number of worker threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "solcap/channel.hpp"
#include "solcap/errors.hpp"

namespace solcap::mc {

using channel::ChannelParams;
using channel::InputDist;
using channel::RngStream;

struct McReport {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    std::optional<double> gof_pvalue;
};

struct McOptions {
    std::size_t substreams = 16;
    std::size_t threads = 1;
};

inline constexpr std::size_t kMinEntropySamples = 1000;
inline constexpr std::size_t kMinGofSamples = 10000;
inline constexpr std::size_t kMinGofBins = 10;

/// Noise variance floor applied by every Monte Carlo entry point.
inline constexpr double kSigmaNFloor = 1e-12;

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::size_t index) {
    return splitmix64(seed + (static_cast<std::uint64_t>(index) + 1) * 0x9E3779B97F4A7C15ULL);
}

inline ChannelParams floored(const ChannelParams& params) {
    return ChannelParams(std::max(params.sigma_n_sq(), kSigmaNFloor));
}

namespace detail {

// Running mean / M2 (Welford), mergeable in a fixed order.
struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v) {
        ++n;
        const double d = v - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (v - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0) {
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double total = na + nb;
        mean += d * nb / total;
        m2 += o.m2 + d * d * na * nb / total;
        n += o.n;
    }
};

// Runs `body(substream_index, rng, count)` for every substream on up to
// `threads` workers. Exceptions are rethrown from the lowest failing index.
template <class Body>
void for_each_substream(std::size_t substreams, std::size_t threads, Body&& body) {
    std::vector<std::exception_ptr> errors(substreams);
    auto worker = [&](std::size_t first) {
        for (std::size_t i = first; i < substreams; i += threads) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker, t);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace detail

/// Plug-in estimate of E[g(X, Y)] with X ~ Rayleigh(input) and Y ~ channel(X).
template <class G>
McReport plugin_mean(const InputDist& input, const ChannelParams& params, std::size_t n,
                     std::uint64_t seed, const G& g, McOptions opt = {}) {
    if (n < kMinEntropySamples) {
        throw DomainError("Monte Carlo estimators need at least 1000 samples");
    }
    const std::size_t k = std::max<std::size_t>(1, std::min(opt.substreams, n));
    const std::size_t threads = std::max<std::size_t>(1, std::min(opt.threads, k));
    const ChannelParams p = floored(params);

    std::vector<detail::Moments> parts(k);
    detail::for_each_substream(k, threads, [&](std::size_t i) {
        RngStream rng(substream_seed(seed, i));
        const std::size_t begin = i * n / k;
        const std::size_t end = (i + 1) * n / k;
        detail::Moments m;
        for (std::size_t s = begin; s < end; ++s) {
            const double x = channel::rayleigh_sample(input, rng);
            const double y = channel::sample_y(x, p, rng);
            m.add(g(x, y, p));
        }
        parts[i] = m;
    });

    detail::Moments total;
    for (const auto& m : parts) {
        total.merge(m);
    }
    McReport out;
    out.estimate = total.mean;
    out.std_error = std::sqrt(total.m2 / static_cast<double>(total.n - 1) / static_cast<double>(total.n));
    out.n_samples = total.n;
    out.seed = seed;
    return out;
}

/// -(1/n) sum ln p_Y(y_i), p_Y by numerical marginalization.
inline McReport mc_entropy_y(const InputDist& input, const ChannelParams& params, std::size_t n,
                             std::uint64_t seed, McOptions opt = {}) {
    return plugin_mean(input, params, n, seed,
                       [&input](double, double y, const ChannelParams& p) {
                           return -std::log(channel::output_pdf_numeric(y, input, p));
                       },
                       opt);
}

/// -(1/n) sum ln p_{Y|X}(y_i | x_i).
inline McReport mc_entropy_y_given_x(const InputDist& input, const ChannelParams& params,
                                     std::size_t n, std::uint64_t seed, McOptions opt = {}) {
    return plugin_mean(input, params, n, seed,
                       [](double x, double y, const ChannelParams& p) {
                           return -channel::log_pdf_y_given_x(y, x, p);
                       },
                       opt);
}

/// (1/n) sum ln[p_{Y|X}(y_i | x_i) / p_Y(y_i)]; shares its sample stream with
/// the two entropy estimators at the same seed.
inline McReport mc_mutual_information(const InputDist& input, const ChannelParams& params,
                                      std::size_t n, std::uint64_t seed, McOptions opt = {}) {
    return plugin_mean(input, params, n, seed,
                       [&input](double x, double y, const ChannelParams& p) {
                           return channel::log_pdf_y_given_x(y, x, p)
                                  - std::log(channel::output_pdf_numeric(y, input, p));
                       },
                       opt);
}

/// Upper edges of n_bins equal-probability bins of Y | X = x (the last edge is
/// +inf). Each interior edge solves CDF(e) = j / n_bins by TOMS 748 on the
/// quadrature CDF.
inline std::vector<double> equal_probability_edges(double x, const ChannelParams& params,
                                                   std::size_t n_bins) {
    const double sd = std::sqrt(params.sigma_n_sq());
    const double lo = std::max(0.0, x - channel::kWindowSigmas * sd);
    const double hi = x + 2.0 * channel::kWindowSigmas * sd;
    std::vector<double> edges;
    edges.reserve(n_bins);
    double left = lo;
    for (std::size_t j = 1; j < n_bins; ++j) {
        const double target = static_cast<double>(j) / static_cast<double>(n_bins);
        auto residual = [&](double y) { return channel::cdf_y_given_x(y, x, params) - target; };
        std::uintmax_t iterations = 200;
        const auto tol = boost::math::tools::eps_tolerance<double>(48);
        double f_left = residual(left);
        const double f_hi = residual(hi);
        if (!(f_left <= 0.0 && f_hi >= 0.0)) {
            throw ConvergenceError("equal_probability_edges: CDF does not bracket the bin edge");
        }
        double edge = left;
        if (f_left < 0.0) {
            const auto bracket =
                boost::math::tools::toms748_solve(residual, left, hi, f_left, f_hi, tol, iterations);
            if (iterations >= 200) {
                throw ConvergenceError("equal_probability_edges: root search did not converge");
            }
            edge = 0.5 * (bracket.first + bracket.second);
        }
        edges.push_back(edge);
        left = edge;
    }
    edges.push_back(std::numeric_limits<double>::infinity());
    return edges;
}

/// Binned chi-square test of `sampler(rng)` against p_{Y|X}(. | x).
/// estimate = chi-square statistic, std_error = sqrt(2 (n_bins - 1)) (its
/// standard deviation under the null), gof_pvalue = upper tail probability.
template <class Sampler>
McReport gof_binned_with(double x, const ChannelParams& params, std::size_t n, std::size_t n_bins,
                         std::uint64_t seed, Sampler&& sampler) {
    if (n < kMinGofSamples) {
        throw DomainError("gof_binned: need at least 10000 samples");
    }
    if (n_bins < kMinGofBins) {
        throw DomainError("gof_binned: need at least 10 bins");
    }
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("gof_binned: x must be > 0");
    }
    const ChannelParams p = floored(params);
    const auto edges = equal_probability_edges(x, p, n_bins);

    std::vector<std::size_t> counts(n_bins, 0);
    RngStream rng(seed);
    for (std::size_t s = 0; s < n; ++s) {
        const double y = sampler(rng);
        const auto it = std::lower_bound(edges.begin(), edges.end(), y);
        ++counts[static_cast<std::size_t>(it - edges.begin())];
    }

    const double expected = static_cast<double>(n) / static_cast<double>(n_bins);
    double chi2 = 0.0;
    for (const auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    const double dof = static_cast<double>(n_bins - 1);
    McReport out;
    out.estimate = chi2;
    out.std_error = std::sqrt(2.0 * dof);
    out.n_samples = n;
    out.seed = seed;
    out.gof_pvalue = boost::math::gamma_q(0.5 * dof, 0.5 * chi2);
    return out;
}

inline McReport gof_binned(double x, const ChannelParams& params, std::size_t n, std::size_t n_bins,
                           std::uint64_t seed) {
    const ChannelParams p = floored(params);
    return gof_binned_with(x, p, n, n_bins, seed,
                           [&](RngStream& rng) { return channel::sample_y(x, p, rng); });
}

} // namespace solcap::mc
