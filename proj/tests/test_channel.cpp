#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <gtest/gtest.h>

#include "oracle_values.hpp"
#include "solcap/channel.hpp"
#include "solcap/quadrature.hpp"

namespace ch = solcap::channel;
namespace quad = solcap::quad;

namespace {

constexpr quad::Tolerance kTight{1e-12, 1e-300};

// Integral of f over [0, inf) with the peak at `centre` (width `sd`) bracketed.
template <class F>
double integrate_peaked(const F& f, double centre, double sd) {
    const double lo = std::max(0.0, centre - ch::kWindowSigmas * sd);
    const double hi = centre + ch::kWindowSigmas * sd;
    double total = 0.0;
    if (lo > 0.0) {
        total += quad::integrate_finite(f, 0.0, lo, kTight).value;
    }
    total += quad::integrate_finite(f, lo, hi, kTight).value;
    total += quad::integrate_semi_infinite(f, hi, kTight, std::max(sd, 1e-3)).value;
    return total;
}

// Closed-form output marginal for the Rayleigh input; a test oracle only.
double output_pdf_closed(double y, double s, double sigma) {
    return 2.0 * y / s * (std::exp(-y * y / (s + sigma)) - std::exp(-y * y / sigma));
}

// P(Y <= y | x): 2 Y^2 / sigma is noncentral chi-square, 4 dof, lambda = 2 x^2 / sigma.
double cdf_oracle(double y, double x, double sigma) {
    boost::math::non_central_chi_squared_distribution<double> d(4.0, 2.0 * x * x / sigma);
    return boost::math::cdf(d, 2.0 * y * y / sigma);
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    }
    return out;
}

const std::vector<double> kSigmas = {1e-3, 1e-2, 0.1, 1.0};
const std::vector<double> kInputs = {0.1, 1.0, 10.0};

} // namespace

TEST(Params, Validation) {
    EXPECT_THROW((void)ch::ChannelParams(0.0), solcap::DomainError);
    EXPECT_THROW((void)ch::ChannelParams(-1.0), solcap::DomainError);
    EXPECT_THROW((void)ch::ChannelParams(INFINITY), solcap::DomainError);
    EXPECT_THROW((void)ch::InputDist(0.0), solcap::DomainError);
    EXPECT_THROW((void)ch::Rho(-2.0), solcap::DomainError);
    EXPECT_NEAR(ch::Rho::from_db(20.0).value(), 100.0, 1e-12);
    EXPECT_NEAR(ch::Rho(1000.0).db(), 30.0, 1e-12);
    EXPECT_NEAR(ch::Rho(4.0).channel_for(ch::InputDist(2.0)).sigma_n_sq(), 0.5, 1e-16);
}

TEST(PdfAmplitude, ExtendedPrecisionValue) {
    const double got = ch::pdf_amplitude(1.0, 1.0, ch::ChannelParams(0.05));
    EXPECT_NEAR(got, oracle::kPdfAmplitude1105, 1e-13 * oracle::kPdfAmplitude1105);
}

TEST(PdfAmplitude, ZeroAtOrigin) {
    EXPECT_EQ(ch::pdf_amplitude(0.0, 1.0, ch::ChannelParams(0.1)), 0.0);
    EXPECT_EQ(ch::log_pdf_amplitude(0.0, 1.0, ch::ChannelParams(0.1)), -INFINITY);
}

TEST(PdfAmplitude, Normalization) {
    for (double s : kSigmas) {
        const ch::ChannelParams p(s);
        for (double x : kInputs) {
            const double a0 = x * x;
            auto f = [&](double a) { return ch::pdf_amplitude(a, a0, p); };
            // A has mean a0 + 2s and standard deviation ~ 2 x sqrt(s).
            const double total = integrate_peaked(f, a0, 2.0 * x * std::sqrt(s) + s);
            EXPECT_NEAR(total, 1.0, 1e-8) << "s=" << s << " x=" << x;
        }
    }
}

TEST(PdfAmplitude, Mean) {
    const ch::ChannelParams p(0.1);
    for (double a0 : {0.25, 1.0, 4.0}) {
        auto f = [&](double a) { return a * ch::pdf_amplitude(a, a0, p); };
        EXPECT_NEAR(integrate_peaked(f, a0, 2.0 * std::sqrt(a0 * 0.1) + 0.1), a0 + 0.2, 1e-9) << a0;
    }
}

TEST(PdfYGivenX, Normalization) {
    for (double s : kSigmas) {
        const ch::ChannelParams p(s);
        for (double x : kInputs) {
            auto f = [&](double y) { return ch::pdf_y_given_x(y, x, p); };
            EXPECT_NEAR(integrate_peaked(f, x, std::sqrt(s)), 1.0, 1e-8) << "s=" << s << " x=" << x;
        }
    }
}

TEST(PdfYGivenX, NormalizationInLogDomainRegime) {
    // 2xy/s reaches ~1e6 here, far past the direct-evaluation range.
    const ch::ChannelParams p(2e-6);
    auto f = [&](double y) { return ch::pdf_y_given_x(y, 1.0, p); };
    EXPECT_NEAR(integrate_peaked(f, 1.0, std::sqrt(2e-6)), 1.0, 1e-8);
    EXPECT_TRUE(std::isfinite(ch::log_pdf_y_given_x(1.0, 1.0, p)));
}

TEST(PdfYGivenX, SecondMoment) {
    for (double s : {0.01, 0.1}) {
        const ch::ChannelParams p(s);
        for (double x : {0.5, 1.0, 3.0}) {
            auto f = [&](double y) { return y * y * ch::pdf_y_given_x(y, x, p); };
            const double want = x * x + 2.0 * s;
            EXPECT_NEAR(integrate_peaked(f, x, std::sqrt(s)), want, 1e-9 * want) << s << ' ' << x;
        }
    }
}

TEST(PdfYGivenX, ChangeOfVariables) {
    for (double s : {0.05, 1.0}) {
        const ch::ChannelParams p(s);
        for (double x : log_grid(0.05, 5.0, 20)) {
            for (double y : log_grid(0.05, 5.0, 20)) {
                const double lhs = ch::pdf_y_given_x(y, x, p);
                const double rhs = 2.0 * y * ch::pdf_amplitude(y * y, x * x, p);
                if (rhs > 1e-300) {
                    EXPECT_NEAR(lhs, rhs, 1e-12 * rhs) << "s=" << s << " x=" << x << " y=" << y;
                } else {
                    // Underflowed; compare the log densities instead.
                    const double llhs = ch::log_pdf_y_given_x(y, x, p);
                    const double lrhs = std::log(2.0 * y) + ch::log_pdf_amplitude(y * y, x * x, p);
                    EXPECT_NEAR(llhs, lrhs, 1e-12 * std::fabs(lrhs)) << "s=" << s << " x=" << x << " y=" << y;
                }
            }
        }
    }
}

TEST(PdfYGivenX, DirectAndLogPathsAgree) {
    const ch::ChannelParams p(0.01);
    for (double x : {0.3, 1.0, 2.0}) {
        for (double y : log_grid(0.01, 4.0, 40)) {
            const double direct = ch::pdf_y_given_x(y, x, p);
            const double via_log = std::exp(ch::log_pdf_y_given_x(y, x, p));
            if (direct > 1e-290) {
                EXPECT_NEAR(direct, via_log, 1e-12 * direct) << x << ' ' << y;
            }
        }
    }
    // Across the switch from direct to log-domain evaluation.
    const double x = 1.0;
    const double s = 2.0 / 700.0;
    const ch::ChannelParams q(s);
    const double below = ch::pdf_y_given_x(std::nextafter(1.0, 0.0), x, q);
    const double above = ch::pdf_y_given_x(std::nextafter(1.0, 2.0), x, q);
    EXPECT_NEAR(below, above, 1e-12 * below);
}

TEST(PdfYGivenX, ZeroAtOriginAndDomain) {
    const ch::ChannelParams p(0.1);
    EXPECT_EQ(ch::pdf_y_given_x(0.0, 1.0, p), 0.0);
    EXPECT_EQ(ch::log_pdf_y_given_x(0.0, 1.0, p), -INFINITY);
    EXPECT_THROW(ch::pdf_y_given_x(-1.0, 1.0, p), solcap::DomainError);
    EXPECT_THROW(ch::pdf_y_given_x(1.0, 0.0, p), solcap::DomainError);
    EXPECT_THROW(ch::pdf_amplitude(-1.0, 1.0, p), solcap::DomainError);
    EXPECT_THROW(ch::pdf_amplitude(1.0, 0.0, p), solcap::DomainError);
}

TEST(PdfYGivenX, CdfMatchesNoncentralChiSquare) {
    for (double s : {0.01, 0.1, 1.0}) {
        const ch::ChannelParams p(s);
        for (double x : {0.5, 1.0, 3.0}) {
            for (double k : {-3.0, -1.0, 0.0, 0.5, 2.0, 4.0}) {
                const double y = std::max(1e-3, x + k * std::sqrt(s));
                EXPECT_NEAR(ch::cdf_y_given_x(y, x, p), cdf_oracle(y, x, s), 1e-10) << s << ' ' << x << ' ' << y;
            }
        }
    }
}

TEST(Rayleigh, PdfProperties) {
    for (double s : {0.3, 1.0, 7.0}) {
        const ch::InputDist in(s);
        auto f = [&](double x) { return ch::rayleigh_pdf(x, in); };
        const double sd = std::sqrt(s);
        EXPECT_NEAR(quad::integrate_semi_infinite(f, 0.0, kTight, sd).value, 1.0, 1e-10);
        auto m2 = [&](double x) { return x * x * ch::rayleigh_pdf(x, in); };
        EXPECT_NEAR(quad::integrate_semi_infinite(m2, 0.0, kTight, sd).value, s, 1e-10 * s);
        // Mode at sigma_S / sqrt(2).
        const double mode = sd / std::numbers::sqrt2;
        EXPECT_GT(ch::rayleigh_pdf(mode, in), ch::rayleigh_pdf(mode * (1 + 1e-4), in));
        EXPECT_GT(ch::rayleigh_pdf(mode, in), ch::rayleigh_pdf(mode * (1 - 1e-4), in));
    }
    EXPECT_THROW(ch::rayleigh_pdf(-1.0, ch::InputDist(1.0)), solcap::DomainError);
}

TEST(Rayleigh, SampleSecondMoment) {
    const ch::InputDist in(2.5);
    ch::RngStream rng(11);
    const int n = 1'000'000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = std::pow(ch::rayleigh_sample(in, rng), 2);
        EXPECT_GT(v, -1.0);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_NEAR(mean, 2.5, 4.0 * se);
}

TEST(Sampler, ConditionalSecondMoment) {
    const ch::ChannelParams p(0.04);
    ch::RngStream rng(3);
    const int n = 1'000'000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double y = ch::sample_y(1.0, p, rng);
        ASSERT_GT(y, 0.0);
        sum += y * y;
        sum2 += y * y * y * y;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_NEAR(mean, 1.08, 4.0 * se);
}

TEST(Sampler, NoiseFreeLimit) {
    ch::RngStream rng(5);
    for (double x : {0.2, 1.0, 9.0}) {
        const double y = ch::sample_y(x, ch::ChannelParams(1e-300), rng);
        EXPECT_NEAR(y, x, 1e-14 * x);
    }
}

TEST(Sampler, DeterministicReplay) {
    const ch::ChannelParams p(0.1);
    ch::RngStream a(42);
    ch::RngStream b(42);
    ch::RngStream c(43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double ya = ch::sample_y(1.0, p, a);
        EXPECT_EQ(ya, ch::sample_y(1.0, p, b));
        differs = differs || ya != ch::sample_y(1.0, p, c);
    }
    EXPECT_TRUE(differs);
}

TEST(Sampler, UniformsStayInUnitInterval) {
    ch::RngStream rng(0);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform_open0();
        ASSERT_GT(u, 0.0);
        ASSERT_LE(u, 1.0);
    }
}

TEST(OutputPdf, MatchesClosedFormMarginal) {
    for (double s : {0.3, 1.0}) {
        const ch::InputDist in(s);
        for (double sigma : {1e-3, 0.01, 0.1, 1.0}) {
            const ch::ChannelParams p(sigma);
            for (double y : {0.01, 0.1, 0.5, 1.0, 2.0, 4.0}) {
                const double want = output_pdf_closed(y, s, sigma);
                EXPECT_NEAR(ch::output_pdf_numeric(y, in, p), want, 1e-9 * want + 1e-300)
                    << s << ' ' << sigma << ' ' << y;
            }
        }
    }
    EXPECT_EQ(ch::output_pdf_numeric(0.0, ch::InputDist(1.0), ch::ChannelParams(0.1)), 0.0);
}

TEST(OutputPdf, NormalizationAndSecondMoment) {
    const ch::InputDist in(1.0);
    const ch::ChannelParams p(0.1);
    auto f = [&](double y) { return ch::output_pdf_numeric(y, in, p); };
    auto m2 = [&](double y) { return y * y * ch::output_pdf_numeric(y, in, p); };
    const quad::Tolerance tol{1e-10, 1e-14};
    EXPECT_NEAR(quad::integrate_semi_infinite(f, 0.0, tol).value, 1.0, 1e-8);
    EXPECT_NEAR(quad::integrate_semi_infinite(m2, 0.0, tol).value, 1.2, 1e-8);
}

TEST(OutputPdf, MonteCarloHistogram) {
    const ch::InputDist in(1.0);
    const ch::ChannelParams p(0.1);
    const double lo = 0.99;
    const double hi = 1.01;
    const std::int64_t n = 10'000'000;
    ch::RngStream rng(2024);
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double y = ch::sample_y(ch::rayleigh_sample(in, rng), p, rng);
        hits += (y >= lo && y < hi) ? 1 : 0;
    }
    const double prob = static_cast<double>(hits) / static_cast<double>(n);
    const double se = std::sqrt(prob * (1.0 - prob) / static_cast<double>(n));
    auto f = [&](double y) { return ch::output_pdf_numeric(y, in, p); };
    const double bin = quad::integrate_finite(f, lo, hi, {1e-10, 1e-14}).value;
    EXPECT_NEAR(prob, bin, 4.0 * se);
    EXPECT_NEAR(prob / (hi - lo), ch::output_pdf_numeric(1.0, in, p), 4.0 * se / (hi - lo) + 1e-4);
}
