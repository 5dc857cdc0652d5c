#include <cmath>

#include <gtest/gtest.h>

#include "oracle_values.hpp"
#include "solcap/soliton.hpp"

namespace sol = solcap::soliton;

namespace {

sol::PhysicalLink unit_link() { return {-1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0}; }

sol::PhysicalLink typical_link() { return {-2.0e-26, 1.3e-3, 4.6e-5, 1.13, 1.28e-19, 50e-12, 2.0e6}; }

} // namespace

TEST(Waveform, Examples) {
    EXPECT_EQ(sol::waveform(1.0, 0.0), 1.0);
    EXPECT_EQ(sol::waveform(2.0, 0.0), 2.0);
    EXPECT_NEAR(sol::waveform(1.0, 1.0), oracle::kSech1, 1e-15);
}

TEST(Waveform, IsEven) {
    for (double a0 : {0.1, 1.0, 3.7}) {
        for (double t : {0.0, 0.25, 1.0, 13.0, 200.0}) {
            EXPECT_EQ(sol::waveform(a0, t), sol::waveform(a0, -t));
        }
    }
}

TEST(Waveform, PeakIsAmplitude) {
    for (double a0 : {0.5, 1.0, 3.0}) {
        EXPECT_EQ(sol::waveform(a0, 0.0), a0);
        EXPECT_LT(sol::waveform(a0, 0.01), a0);
    }
}

TEST(Energy, ClosedForm) {
    EXPECT_EQ(sol::energy_closed(2.0), 4.0);
    EXPECT_EQ(sol::energy_closed(0.5), 1.0);
    EXPECT_EQ(sol::energy_closed(1.0), 2.0);
}

TEST(Energy, NumericExamples) {
    EXPECT_NEAR(sol::energy_numeric(1.0, 40.0).value, 2.0, 1e-10);
    EXPECT_NEAR(sol::energy_numeric(3.0, 40.0).value, 6.0, 1e-10);
    EXPECT_NEAR(sol::energy_numeric(1.0, 0.5).value, oracle::kTwoTanhHalf, 1e-14);
}

TEST(Energy, NumericMatchesTanhLaw) {
    for (double a0 : {0.2, 1.0, 5.0}) {
        for (double w : {0.1, 0.5, 2.0, 10.0}) {
            const double want = 2.0 * a0 * std::tanh(a0 * w);
            EXPECT_NEAR(sol::energy_numeric(a0, w).value, want, 1e-12 * want) << a0 << ' ' << w;
        }
    }
}

TEST(Energy, WideWindowConvergesToClosedForm) {
    for (double a0 : {0.5, 1.0, 3.0}) {
        const double closed = sol::energy_closed(a0);
        EXPECT_LT(std::fabs(sol::energy_numeric(a0, 40.0 / a0).value - closed), 1e-10 * closed) << a0;
    }
}

TEST(Separation, Examples) {
    EXPECT_NEAR(sol::separation_margin(10.0).overlap, 4.539992976248485e-5, 1e-18);
    EXPECT_NEAR(sol::separation_margin(std::log(100.0)).overlap, 0.01, 1e-15);
    EXPECT_NEAR(sol::separation_margin(1e-12).overlap, 1.0, 1e-11);
    EXPECT_EQ(sol::separation_margin(4.0).width, 0.25);
}

TEST(Normalize, UnitInputs) {
    const auto n = sol::normalize(unit_link());
    EXPECT_EQ(n.l_s, 1.0);
    EXPECT_EQ(n.sigma0_sq, 1.0);
    EXPECT_EQ(n.noise_d, 0.5);
    EXPECT_EQ(n.z_end, 1.0);
    EXPECT_EQ(n.sigma_n_sq, 0.25);
    EXPECT_EQ(n.power_scale, 1.0);
}

TEST(Normalize, NoisePsd) {
    const auto n = sol::normalize(typical_link());
    EXPECT_NEAR(n.sigma0_sq, 6.65e-24, 0.01e-24);
    // 4.6e-5 * 1.13 * 1.28e-19 by hand.
    EXPECT_NEAR(n.sigma0_sq, 6.65344e-24, 1e-12 * 6.65344e-24);
}

TEST(Normalize, SymbolIntervalScaling) {
    auto link = typical_link();
    const auto base = sol::normalize(link);
    link.t_s *= 2.0;
    const auto doubled = sol::normalize(link);
    EXPECT_NEAR(doubled.l_s / base.l_s, 4.0, 1e-14);
    EXPECT_NEAR(doubled.noise_d / base.noise_d, 8.0, 1e-14);
    EXPECT_NEAR(doubled.z_end / base.z_end, 0.25, 1e-14);
    EXPECT_NEAR(doubled.sigma_n_sq / base.sigma_n_sq, 2.0, 1e-14);
}

TEST(Normalize, Relations) {
    const auto link = typical_link();
    const auto n = sol::normalize(link);
    EXPECT_NEAR(n.sigma_n_sq, n.z_end * n.noise_d / 2.0, 1e-15 * n.sigma_n_sq);
    EXPECT_NEAR(n.power_scale * link.gamma_nl * n.l_s, 1.0, 1e-15);
    EXPECT_GT(n.l_s, 0.0);
    EXPECT_GT(n.noise_d, 0.0);
    EXPECT_GT(n.sigma_n_sq, 0.0);
}

TEST(Normalize, RejectsInvalidLinks) {
    auto bad = unit_link();
    bad.beta2 = 1.0;
    EXPECT_THROW(sol::normalize(bad), solcap::DomainError);
    bad = unit_link();
    bad.beta2 = 0.0;
    EXPECT_THROW(sol::normalize(bad), solcap::DomainError);
    bad = unit_link();
    bad.gamma_nl = 0.0;
    EXPECT_THROW(sol::normalize(bad), solcap::DomainError);
    bad = unit_link();
    bad.alpha = -1.0;
    EXPECT_THROW(sol::normalize(bad), solcap::DomainError);
    bad = unit_link();
    bad.k_t = 0.9;
    EXPECT_THROW(sol::normalize(bad), solcap::DomainError);
    bad = unit_link();
    bad.t_s = 0.0;
    EXPECT_THROW(sol::normalize(bad), solcap::DomainError);
    bad = unit_link();
    bad.length = -5.0;
    EXPECT_THROW(sol::normalize(bad), solcap::DomainError);
}

TEST(Snr, Examples) {
    EXPECT_EQ(sol::snr(1.0, 1.0), 2.0);
    EXPECT_EQ(sol::snr(50.0, 0.5), 50.0);
    EXPECT_EQ(sol::snr(10.0, 2.0), 40.0);
    EXPECT_THROW(sol::snr(0.0, 1.0), solcap::DomainError);
    EXPECT_THROW(sol::snr(1.0, -1.0), solcap::DomainError);
}

TEST(Soliton, DomainErrors) {
    EXPECT_THROW(sol::waveform(0.0, 1.0), solcap::DomainError);
    EXPECT_THROW(sol::energy_closed(-1.0), solcap::DomainError);
    EXPECT_THROW(sol::energy_numeric(1.0, 0.0), solcap::DomainError);
    EXPECT_THROW(sol::separation_margin(0.0), solcap::DomainError);
}
