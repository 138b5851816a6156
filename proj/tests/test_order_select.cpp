#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "arpsd/order_select.hpp"
#include "arpsd/synthgen.hpp"

using namespace arpsd;

namespace {

const ArModel kAr3({-1.0, 0.5, -0.2}, 1.0);

TimeSeries white(std::size_t n, std::uint64_t seed)
{
    GaussianRng rng(seed);
    std::vector<double> x(n);
    for (double& v : x)
        v = rng.normal();
    return TimeSeries(std::move(x), 1.0);
}

}  // namespace

TEST(Criteria, AicExamples)
{
    EXPECT_EQ(aic(1.0, 100, 0), 1.0);
    EXPECT_EQ(aic(1.0, 100, 10), 1.2);
    EXPECT_DOUBLE_EQ(aic(std::exp(2.0), 100, 0), 3.0);
}

TEST(Criteria, AiccExamples)
{
    EXPECT_NEAR(aicc(1.0, 100, 0), 100.0 / 98.0, 1e-15);
    EXPECT_EQ(aicc(1.0, 100, 10), 1.25);
    try {
        (void)aicc(1.0, 12, 10);
        FAIL();
    } catch (const std::domain_error& e) {
        EXPECT_STREQ(e.what(), "AICc undefined for this n,p");
    }
}

TEST(Criteria, BicExamples)
{
    EXPECT_EQ(bic(1.0, 100, 0), 0.0);
    EXPECT_NEAR(bic(1.0, std::numbers::e, 1), 1.0 / std::numbers::e, 1e-15);
    EXPECT_DOUBLE_EQ(bic(std::numbers::e, 100, 0), 1.0);
}

TEST(Criteria, RejectNonPositiveVariance)
{
    EXPECT_THROW((void)aic(0.0, 100, 1), std::domain_error);
    EXPECT_THROW((void)aicc(-1.0, 100, 1), std::domain_error);
    EXPECT_THROW((void)bic(0.0, 100, 1), std::domain_error);
}

TEST(Criteria, PenaltyMonotoneAndAiccAboveAic)
{
    for (double n : {10.0, 100.0, 2560.0, 1e4, 1e6}) {
        for (std::size_t p = 0; p < 8; ++p) {
            EXPECT_LT(aic(2.0, n, p), aic(2.0, n, p + 1));
            if (n > 1.0) {
                EXPECT_LT(bic(2.0, n, p), bic(2.0, n, p + 1));
            }
            if (n - static_cast<double>(p) - 2.0 > 0.0) {
                EXPECT_GE(aicc(2.0, n, p), aic(2.0, n, p));
            }
        }
    }
}

TEST(CriterionNames, RoundTrip)
{
    for (auto c : {Criterion::Aic, Criterion::Aicc, Criterion::Bic})
        EXPECT_EQ(parse_criterion(to_string(c)), c);
    EXPECT_THROW((void)parse_criterion("hq"), std::invalid_argument);
}

TEST(SelectOrder, TiesGoToSmallerP)
{
    std::vector<OrderScore> s(3);
    for (std::size_t i = 0; i < 3; ++i)
        s[i].p = i + 1;
    s[0].bic = 0.5;
    s[1].bic = 0.2;
    s[2].bic = 0.2;
    EXPECT_EQ(select_order(s, Criterion::Bic), 2u);
    s[0].bic = 0.2;
    EXPECT_EQ(select_order(s, Criterion::Bic), 1u);
}

TEST(SelectOrder, SkipsAbsentAicc)
{
    std::vector<OrderScore> s(2);
    s[0].p = 1;
    s[0].aicc = 3.0;
    s[1].p = 2;
    EXPECT_EQ(select_order(s, Criterion::Aicc), 1u);
    s[0].aicc.reset();
    EXPECT_THROW((void)select_order(s, Criterion::Aicc), std::domain_error);
}

TEST(OrderScan, CoversAllOrdersAndMarksAiccGaps)
{
    const auto x = white(10, 1);
    const auto r = order_scan(x, 7, FitMethod::Burg, Criterion::Aic);
    ASSERT_EQ(r.per_order.size(), 7u);
    for (std::size_t i = 0; i < 7; ++i) {
        EXPECT_EQ(r.per_order[i].p, i + 1);
        EXPECT_EQ(r.per_order[i].aicc.has_value(), 10.0 - static_cast<double>(i + 1) - 2.0 > 0.0);
    }
    EXPECT_THROW((void)order_scan(x, 8, FitMethod::Burg, Criterion::Bic), std::invalid_argument);
    EXPECT_THROW((void)order_scan(x, 0, FitMethod::Burg, Criterion::Bic), std::invalid_argument);
}

TEST(OrderScan, SweepMatchesIndependentFits)
{
    const auto x = simulate_ar(kAr3, 800, 42);
    for (auto method : {FitMethod::Burg, FitMethod::YuleWalker, FitMethod::Mle}) {
        const auto scan = order_scan(x, 12, method, Criterion::Bic);
        for (const auto& s : scan.per_order) {
            const auto single = fit(x, s.p, method, 512);
            EXPECT_NEAR(s.sigma2, single.model.sigma2, 1e-10 * single.model.sigma2)
                << to_string(method) << " p=" << s.p;
        }
    }
}

TEST(OrderScan, SelectsArgminOfChosenCriterion)
{
    const auto x = simulate_ar(kAr3, 500, 8);
    for (auto c : {Criterion::Aic, Criterion::Aicc, Criterion::Bic}) {
        const auto scan = order_scan(x, 15, FitMethod::YuleWalker, c);
        double best = INFINITY;
        for (const auto& s : scan.per_order)
            best = std::min(best, *s.value(c));
        EXPECT_EQ(*scan.per_order[scan.selected_p - 1].value(c), best);
        EXPECT_EQ(scan.criterion_used, c);
    }
}

TEST(OrderScan, BicFindsAr3)
{
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto x = simulate_ar(kAr3, 2560, 5000 + seed);
        hits += order_scan(x, 15, FitMethod::Burg, Criterion::Bic).selected_p == 3;
    }
    EXPECT_GE(hits, 80);
}

TEST(OrderScan, BicOnWhiteNoiseSelectsOne)
{
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto x = white(10000, 9000 + seed);
        const auto scan = order_scan(x, 10, FitMethod::Burg, Criterion::Bic);
        if (scan.selected_p == 1 && std::abs(burg_fit(x, 1).model.coeffs[0]) < 0.05)
            ++hits;
    }
    EXPECT_GE(hits, 90);
}

TEST(OrderScan, BicConsistencyImprovesWithLength)
{
    std::vector<int> hits;
    for (std::size_t n : {512u, 2560u, 10000u}) {
        int h = 0;
        for (std::uint64_t seed = 0; seed < 40; ++seed)
            h += order_scan(simulate_ar(kAr3, n, 7000 + seed), 12, FitMethod::Burg, Criterion::Bic).selected_p == 3;
        hits.push_back(h);
    }
    EXPECT_LE(hits[0], hits[2]);
    EXPECT_GE(hits[2], 38);
}
