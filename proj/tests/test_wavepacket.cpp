#include "zb/dynamics.hpp"
#include "zb/wavepacket.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace zb;

namespace {

const ParticleConfig kCfg = ParticleConfig::natural(0.4);

Mix equal_mix() { return {cplx{1, 0}, cplx{1, 0}, cplx{1, 0}, cplx{1, 0}}; }

} // namespace

TEST(SingleMode, Normalized)
{
    const Mix m{cplx{1, 0}, cplx{0, 0}, cplx{1, 0}, cplx{0, 0}};
    const auto wp = single_mode(0.5, m, kCfg);
    ASSERT_EQ(wp.size(), 1u);
    EXPECT_NEAR(std::abs(wp.coeffs[0][0]), 1.0 / std::sqrt(2.0), 1e-15);
    const auto d = validate(wp);
    EXPECT_LE(d.normalization_residual, 1e-15);
    EXPECT_NEAR(d.occupancy[0], 0.5, 1e-15);
    EXPECT_NEAR(d.occupancy[2], 0.5, 1e-15);
}

TEST(SingleMode, GaussianWithOneModeIsSingleMode)
{
    const Mix m{cplx{1, 0}, cplx{0, 0}, cplx{1, 0}, cplx{0, 0}};
    const auto g = gaussian_packet(0.5, 1e-9, m, 1, kCfg);
    const auto s = single_mode(0.5, m, kCfg);
    EXPECT_EQ(g.momenta, s.momenta);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(g.coeffs[0][i], s.coeffs[0][i]);
}

TEST(Gaussian, NormalizationAndMeanMomentum)
{
    const auto wp = gaussian_packet(0.5, 0.05, equal_mix(), 64, kCfg);
    const auto d = validate(wp);
    EXPECT_LE(d.normalization_residual, 1e-10);
    EXPECT_TRUE(d.grid_increasing);
    EXPECT_TRUE(d.weights_positive);
    EXPECT_NEAR(mean_momentum(wp), 0.5, 1e-6);
    for (double o : d.occupancy) EXPECT_NEAR(o, 0.25, 1e-12);
}

TEST(Gaussian, RandomMixesStayNormalized)
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        Mix m;
        for (auto& c : m) c = cplx(g(rng), g(rng));
        const auto wp = gaussian_packet(g(rng), 0.01 + std::abs(g(rng)) * 0.1, m, 17 + trial, kCfg);
        EXPECT_LE(validate(wp).normalization_residual, 1e-10);
    }
}

TEST(Gaussian, QuadratureConverges)
{
    const auto coarse = gaussian_packet(0.5, 0.05, default_mix(), 64, kCfg);
    const auto fine = gaussian_packet(0.5, 0.05, default_mix(), 128, kCfg);
    const auto t = uniform_time_grid(60.0, 256);
    for (Observable obs : kObservables) {
        const auto a = analytic_series(coarse, obs, t);
        const auto b = analytic_series(fine, obs, t);
        double diff = 0.0;
        for (std::size_t n = 0; n < t.size(); ++n) diff = std::max(diff, std::abs(a.values[n] - b.values[n]));
        EXPECT_LE(diff, 1e-6) << tag(obs);
    }
    EXPECT_NEAR(mean_momentum(coarse), mean_momentum(fine), 1e-6);
}

TEST(Gaussian, Errors)
{
    EXPECT_THROW(gaussian_packet(0.5, 0.0, equal_mix(), 8, kCfg), ConfigError);
    EXPECT_THROW(gaussian_packet(0.5, 0.05, equal_mix(), 0, kCfg), ConfigError);
    EXPECT_THROW(gaussian_packet(0.5, 0.05, Mix{}, 8, kCfg), ConfigError);
    EXPECT_THROW(single_mode(0.5, Mix{}, kCfg), ConfigError);
    ParticleConfig bad;
    bad.delta = 2.0;
    EXPECT_THROW(single_mode(0.5, equal_mix(), bad), ConfigError);
}

TEST(Validate, FlagsBrokenPackets)
{
    auto wp = gaussian_packet(0.5, 0.05, equal_mix(), 8, kCfg);
    std::swap(wp.momenta[2], wp.momenta[3]);
    wp.weights[0] = -1.0;
    const auto d = validate(wp);
    EXPECT_FALSE(d.grid_increasing);
    EXPECT_FALSE(d.weights_positive);
    wp.coeffs.pop_back();
    EXPECT_THROW(validate(wp), ConfigError);
}
