#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "arpsd/preprocess.hpp"
#include "oracles.hpp"

using namespace arpsd;

namespace {

TimeSeries ts(std::vector<double> v) { return TimeSeries(std::move(v), 128.0); }

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sd = 1.0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sd);
    std::vector<double> x(n);
    for (double& v : x)
        v = g(rng);
    return x;
}

}  // namespace

TEST(Difference, Examples)
{
    EXPECT_EQ(difference(ts({5, 5, 5, 5}), 1).values(), (std::vector<double>{0, 0, 0}));
    EXPECT_EQ(difference(ts({1, 2, 4, 7}), 1).values(), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(difference(ts({1, 2, 4, 7}), 2).values(), (std::vector<double>{1, 1}));
    EXPECT_EQ(difference(ts({1, 2, 4, 7}), 0).values(), (std::vector<double>{1, 2, 4, 7}));
    EXPECT_EQ(difference(ts({1, 2, 4, 7}), 1).sample_rate_hz(), 128.0);
}

TEST(Difference, TooShort)
{
    try {
        (void)difference(ts({1, 2}), 2);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_STREQ(e.what(), "insufficient samples for differencing order");
    }
}

TEST(Difference, CumulativeSumInverts)
{
    // Integer-valued samples keep every partial sum exact.
    auto x = gaussian(200, 3);
    for (double& v : x)
        v = std::round(v * 1000.0);
    const auto y = difference(ts(x), 1).values();
    std::vector<double> rebuilt{x[0]};
    for (double v : y)
        rebuilt.push_back(rebuilt.back() + v);
    EXPECT_EQ(rebuilt, x);
}

TEST(Demean, Examples)
{
    EXPECT_EQ(demean(ts({1, 2, 3})).values(), (std::vector<double>{-1, 0, 1}));
    EXPECT_EQ(demean(ts({7})).values(), (std::vector<double>{0}));
    const std::vector<double> z{-1.5, 0.5, 1.0};
    const auto d = demean(ts(z)).values();
    for (std::size_t i = 0; i < z.size(); ++i)
        EXPECT_NEAR(d[i], z[i], 1e-12);
}

TEST(Demean, ZeroMeanOutput)
{
    auto x = gaussian(1000, 11);
    for (double& v : x)
        v += 1e4;
    const auto d = demean(ts(x)).values();
    double s = 0.0;
    for (double v : d)
        s += v;
    EXPECT_LT(std::abs(s / 1000.0), 1e-12 * 1e4);
}

TEST(BiasedAutocov, HandSum)
{
    const auto r = biased_autocov(ts({1, -1, 1, -1}), 1);
    ASSERT_EQ(r.values.size(), 2u);
    EXPECT_DOUBLE_EQ(r.values[0], 1.0);
    EXPECT_DOUBLE_EQ(r.values[1], -0.75);
}

TEST(BiasedAutocov, ZerosAndErrors)
{
    const auto r = biased_autocov(ts({0, 0, 0, 0, 0}), 4);
    for (double v : r.values)
        EXPECT_EQ(v, 0.0);
    EXPECT_THROW((void)biased_autocov(ts({1, 2, 3}), 3), std::invalid_argument);
}

TEST(BiasedAutocov, MatchesDirectOracleAndCauchySchwarz)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto x = gaussian(97, seed, 3.0);
        for (double& v : x)
            v += 5.0;
        const auto r = biased_autocov(ts(x), 96).values;
        const auto ref = oracle::autocov(x, 96);
        for (std::size_t l = 0; l < r.size(); ++l) {
            EXPECT_NEAR(r[l], ref[l], 1e-12);
            EXPECT_LE(std::abs(r[l]), r[0]);
        }
    }
}

TEST(BiasedAutocov, WhiteNoiseLagOneSmall)
{
    const auto r = biased_autocov(ts(gaussian(100000, 2024)), 1).values;
    EXPECT_LT(std::abs(r[1] / r[0]), 0.02);
}

TEST(Periodogram, ConstantSeries)
{
    constexpr std::size_t n = 64;
    constexpr double c = 1.5;
    // Grid 129 has step 1/256, so f = k/64 sits at index 4k for k = 0..32.
    const auto p = periodogram(ts(std::vector<double>(n, c)), 129);
    EXPECT_NEAR(p.values[0], n * c * c, 1e-9 * n * c * c);
    for (std::size_t k = 1; k <= 32; ++k)
        EXPECT_NEAR(p.values[4 * k], 0.0, 1e-9 * n * c * c);
}

TEST(Periodogram, ImpulseIsFlat)
{
    std::vector<double> x(40, 0.0);
    x[0] = 1.0;
    const auto p = periodogram(ts(x), 512);
    for (double v : p.values)
        EXPECT_NEAR(v, 1.0 / 40.0, 1e-15);
}

TEST(Periodogram, MatchesNaiveDft)
{
    for (std::size_t n : {5u, 37u, 300u, 1500u}) {
        const auto x = gaussian(n, n);
        for (std::size_t g : {2u, 17u, 512u}) {
            const auto p = periodogram(ts(x), g);
            ASSERT_EQ(p.values.size(), g);
            for (std::size_t i = 0; i < g; ++i) {
                const double ref = oracle::naive_periodogram(x, p.freqs_normalized[i]);
                EXPECT_NEAR(p.values[i], ref, 1e-9 * (1.0 + ref)) << "n=" << n << " g=" << g << " i=" << i;
                EXPECT_GE(p.values[i], 0.0);
            }
        }
    }
}

TEST(Periodogram, GridSizeOneAndZero)
{
    const auto p = periodogram(ts({1, 2, 3}), 1);
    ASSERT_EQ(p.values.size(), 1u);
    EXPECT_DOUBLE_EQ(p.values[0], 36.0 / 3.0);
    EXPECT_THROW((void)periodogram(ts({1, 2, 3}), 0), std::invalid_argument);
}

TEST(Periodogram, TrapezoidRecoversSamplePower)
{
    // I(f) is a trigonometric polynomial of degree N-1, so the trapezoid
    // rule over the full period is exact once 2(G-1) > N-1.
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto x = gaussian(300, 100 + seed, 2.0);
        const auto p = periodogram(ts(x), 512);
        const double h = 0.5 / 511.0;
        double integral = 0.0;
        for (std::size_t i = 0; i < p.values.size(); ++i)
            integral += (i == 0 || i + 1 == p.values.size() ? 0.5 : 1.0) * h * p.values[i];
        integral *= 2.0;
        double power = 0.0;
        for (double v : x)
            power += v * v;
        power /= 300.0;
        EXPECT_NEAR(integral, power, 1e-10 * power);
    }
}

TEST(Normality, GaussianPasses)
{
    const auto r = normality_check(ts(gaussian(10000, 5)));
    EXPECT_TRUE(r.is_normal_at_5pct) << r.statistic;
}

TEST(Normality, LogNormalFails)
{
    auto x = gaussian(10000, 6);
    for (double& v : x)
        v = std::exp(v);
    EXPECT_FALSE(normality_check(ts(x)).is_normal_at_5pct);
}

TEST(Normality, TwoPointSequence)
{
    std::vector<double> x(10000);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = i % 2 ? 1.0 : -1.0;
    const auto r = normality_check(ts(x));
    // S = 0, K = 1 exactly: JB = (N/6)(4/4).
    EXPECT_NEAR(r.statistic, 10000.0 / 6.0, 1e-6);
    EXPECT_FALSE(r.is_normal_at_5pct);
}

TEST(Normality, TooFewSamples)
{
    try {
        (void)normality_check(ts({1, 2, 3, 4, 5, 6, 7}));
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_STREQ(e.what(), "too few samples");
    }
}
