#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "synthetic.hpp"
#include "redcsd/analysis.hpp"
#include "redcsd/error.hpp"
#include "redcsd/estimators.hpp"
#include "redcsd/rng.hpp"

using namespace redcsd;

namespace {

TimeSeries noise(std::size_t n, std::uint64_t seed) {
    Rng r(seed);
    TimeSeries x;
    x.values.resize(n);
    for (auto& v : x.values) v = r.normal();
    return x;
}

TimeSeries fold_run(std::uint64_t seed) {
    SimConfig c;
    c.schedule.lambda0 = 0.4;
    c.schedule.theta0 = c.schedule.thetaT = 2.0;
    c.schedule.kappa0 = c.schedule.kappaT = 1.0;
    c.seed = seed;
    return integrate(c);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

}  // namespace

TEST(WindowPartition, DisjointCounts) {
    TimeSeries x;
    x.values.assign(14000, 0.0);
    const auto w = window_partition(x, WindowPlan::disjoint(20, 700));
    ASSERT_EQ(w.size(), 20u);
    EXPECT_EQ(w.back().size(), 700u);
    EXPECT_DOUBLE_EQ(w[1].t0, 700.0);

    x.values.assign(14010, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) x.values[i] = static_cast<double>(i);
    const auto w2 = window_partition(x, WindowPlan::disjoint(20, 700));
    ASSERT_EQ(w2.size(), 20u);
    EXPECT_EQ(w2.back().values.back(), 13999.0);

    EXPECT_EQ(WindowPlan::disjoint(0, 700).count_for(14010), 20u);
    EXPECT_THROW(WindowPlan::disjoint(21, 700).count_for(14000), DomainError);
    EXPECT_THROW(window_partition(x, WindowPlan::disjoint(0, 20000)), DomainError);
}

TEST(WindowPartition, OverlappingCounts) {
    TimeSeries x;
    x.values.assign(14000, 0.0);
    const auto w = window_partition(x, WindowPlan::overlapping(700, 350));
    // starts 0, 350, ..., 13300: floor((14000 - 700) / 350) + 1
    ASSERT_EQ(w.size(), 39u);
    EXPECT_EQ(w.back().values.size(), 700u);
    EXPECT_DOUBLE_EQ(w[1].t0, 350.0);
    EXPECT_THROW(WindowPlan::overlapping(700, 0).count_for(14000), DomainError);
}

TEST(Kendall, Examples) {
    EXPECT_DOUBLE_EQ(kendall_tau(std::vector<double>{1, 2, 3, 4}), 1.0);
    EXPECT_DOUBLE_EQ(kendall_tau(std::vector<double>{4, 3, 2, 1}), -1.0);
    EXPECT_NEAR(kendall_tau(std::vector<double>{1, 3, 2, 4}), 2.0 / 3.0, 1e-15);
    EXPECT_EQ(kendall_tau(std::vector<double>{5, 5, 5}), 0.0);
    EXPECT_THROW(kendall_tau(std::vector<double>{1.0}), DomainError);
}

TEST(Kendall, BruteForceWithTies) {
    std::mt19937_64 gen(17);
    std::uniform_int_distribution<int> len(2, 12), val(0, 5);
    for (int i = 0; i < 500; ++i) {
        std::vector<double> v(static_cast<std::size_t>(len(gen)));
        for (auto& x : v) x = val(gen);
        EXPECT_EQ(kendall_tau(v), oracle::kendall_brute(v));
    }
}

TEST(Kendall, ReversalAndMonotoneTransform) {
    std::mt19937_64 gen(18);
    std::normal_distribution<double> z;
    for (int i = 0; i < 100; ++i) {
        std::vector<double> v(20);
        for (auto& x : v) x = z(gen);
        std::vector<double> rev(v.rbegin(), v.rend());
        std::vector<double> tr(v);
        for (auto& x : tr) x = std::exp(3.0 * x) + 1.0;
        const double t = kendall_tau(v);
        EXPECT_NEAR(kendall_tau(rev), -t, 1e-15);
        EXPECT_EQ(kendall_tau(tr), t);
        EXPECT_GE(t, -1.0);
        EXPECT_LE(t, 1.0);
    }
}

TEST(Indicators, NamesAndSigns) {
    for (auto ind : {Indicator::Variance, Indicator::Ac1, Indicator::Glsar, Indicator::AcsLambda,
                     Indicator::PsdLambda, Indicator::AcsTheta, Indicator::PsdTheta, Indicator::OuTheta}) {
        EXPECT_EQ(indicator_from_string(to_string(ind)), ind);
    }
    EXPECT_EQ(csd_sign(Indicator::AcsLambda), -1);
    EXPECT_EQ(csd_sign(Indicator::PsdLambda), -1);
    EXPECT_EQ(csd_sign(Indicator::Ac1), 1);
    EXPECT_EQ(csd_sign(Indicator::Variance), 1);
    EXPECT_EQ(csd_sign(Indicator::Glsar), 1);
    EXPECT_THROW(indicator_from_string("bogus"), ConfigError);
    EXPECT_EQ(default_indicators().size(), 5u);
}

TEST(IndicatorTrace, IncreasingAndConstantValues) {
    // windows of increasing amplitude: variance strictly increases
    TimeSeries x = noise(2000, 5);
    for (std::size_t i = 0; i < x.size(); ++i) x.values[i] *= 1.0 + static_cast<double>(i / 200);
    const auto t = indicator_trace(x, WindowPlan::disjoint(10, 200), Indicator::Variance);
    EXPECT_EQ(t.values.size(), 10u);
    EXPECT_EQ(t.n_valid(), 10u);
    EXPECT_GT(t.kendall_tau, 0.8);

    TimeSeries alt;
    for (int i = 0; i < 1000; ++i) alt.values.push_back(i % 2 ? -1.0 : 1.0);
    const auto c = indicator_trace(alt, WindowPlan::disjoint(5, 200), Indicator::Variance);
    EXPECT_EQ(c.kendall_tau, 0.0);
}

TEST(IndicatorTrace, FailedWindowsAreExcluded) {
    TimeSeries x = simulate_stationary(StabilityParams::red(0.4, 2.0, 1.0), 1000, 6);
    std::fill(x.values.begin() + 200, x.values.begin() + 400, 0.0);
    const auto t = indicator_trace(x, WindowPlan::disjoint(5, 200), Indicator::AcsLambda);
    EXPECT_TRUE(t.failed[1]);
    EXPECT_TRUE(std::isnan(t.values[1]));
    EXPECT_EQ(t.n_valid(), 4u);

    TimeSeries zero;
    zero.values.assign(1000, 0.0);
    EXPECT_THROW(indicator_trace(zero, WindowPlan::disjoint(5, 200), Indicator::AcsLambda), AnalysisError);
}

TEST(IndicatorTrace, SharedFitsMatchSingleTraces) {
    const auto x = fold_run(3);
    const auto plan = WindowPlan::disjoint(20, 700);
    const auto all = indicator_traces(x, plan, default_indicators());
    for (std::size_t k = 0; k < all.size(); ++k) {
        const auto single = indicator_trace(x, plan, default_indicators()[k]);
        EXPECT_EQ(single.kendall_tau, all[k].kendall_tau);
    }
}

TEST(IndicatorTrace, FoldRunsAlarmOnNegativeLambda) {
    int positive = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        positive += indicator_trace(fold_run(100 + s), WindowPlan::disjoint(20, 700), Indicator::AcsLambda)
                        .kendall_tau > 0.0;
    }
    EXPECT_GT(positive, 10);
}

TEST(IndicatorTrace, OverlappingAgreesWithDisjoint) {
    int same = 0;
    const int runs = 20;
    for (std::uint64_t s = 0; s < runs; ++s) {
        const auto x = fold_run(200 + s);
        const double a = indicator_trace(x, WindowPlan::disjoint(20, 700), Indicator::AcsLambda).kendall_tau;
        const double b = indicator_trace(x, WindowPlan::overlapping(700, 350), Indicator::AcsLambda).kendall_tau;
        same += (a > 0) == (b > 0);
    }
    EXPECT_GE(same, 18);
}

TEST(Detrend, ConstantSeries) {
    TimeSeries x;
    x.values.assign(500, 3.25);
    const auto d = gaussian_detrend(x, 30.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_NEAR(d.trend.values[i], 3.25, 1e-13);
        EXPECT_NEAR(d.residual.values[i], 0.0, 1e-13);
    }
}

TEST(Detrend, ReconstructsInput) {
    const auto x = noise(3000, 8);
    const auto d = gaussian_detrend(x, 50.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double back = d.trend.values[i] + d.residual.values[i];
        EXPECT_LE(std::abs(back - x.values[i]), 4.0 * std::numeric_limits<double>::epsilon() *
                                                    std::max(1.0, std::abs(x.values[i])));
    }
    EXPECT_EQ(d.trend.size(), x.size());
    EXPECT_DOUBLE_EQ(d.bandwidth, 50.0);
}

TEST(Detrend, WhiteNoiseKeepsVariance) {
    const auto x = noise(20000, 9);
    const auto d = gaussian_detrend(x, 500.0);
    const double vin = var_hat(centered(x.view()));
    const double vres = var_hat(d.residual.view());
    EXPECT_NEAR(vres / vin, 1.0, 0.05);
}

TEST(Detrend, PreservesLinearInterior) {
    TimeSeries x;
    for (int i = 0; i < 2000; ++i) x.values.push_back(0.3 * i - 7.0);
    const double bw = 40.0;
    const auto d = gaussian_detrend(x, bw);
    for (std::size_t i = 161; i + 161 < x.size(); ++i) EXPECT_NEAR(d.trend.values[i], x.values[i], 1e-10);
}

TEST(Detrend, BandwidthLimits) {
    const auto x = noise(100, 1);
    EXPECT_THROW(gaussian_detrend(x, 0.0), DomainError);
    EXPECT_THROW(gaussian_detrend(x, 50.0), DomainError);
    EXPECT_NO_THROW(gaussian_detrend(x, 49.0));
}

TEST(Tipping, ConstantCurvatureTieBreak) {
    TimeSeries x;
    for (int i = 0; i < 101; ++i) x.values.push_back(-static_cast<double>(i * i));
    const auto t = detect_tipping(x);
    EXPECT_EQ(t.index, 1u);
    EXPECT_TRUE(t.pronounced);
    EXPECT_DOUBLE_EQ(t.curvature, -2.0);
}

TEST(Tipping, LinearTrendIsNotPronounced) {
    TimeSeries x;
    for (int i = 0; i < 100; ++i) x.values.push_back(0.1 * i + 2.0);
    const auto t = detect_tipping(x);
    EXPECT_EQ(t.index, 1u);
    EXPECT_FALSE(t.pronounced);
    EXPECT_THROW(detect_tipping(TimeSeries{{1.0, 2.0}, 1.0, 0.0}), DomainError);
}

TEST(Tipping, SigmoidShoulder) {
    // f = A (1 - s((t - c) / w)) curves most negatively at t = c - w ln(2 + sqrt 3)
    const double c = 5000.0, w = 120.0, a = 3.0;
    TimeSeries x;
    for (int i = 0; i < 8000; ++i) x.values.push_back(a / (1.0 + std::exp((i - c) / w)));
    const double expected = c - w * std::log(2.0 + std::sqrt(3.0));
    const auto t = detect_tipping(x);
    // the curvature minimum is flat; the earliest sample within the tie tolerance wins
    EXPECT_NEAR(static_cast<double>(t.index), expected, 3.0);
    EXPECT_LE(static_cast<double>(t.index), expected + 1.0);
    EXPECT_TRUE(t.pronounced);

    const double bw = 100.0;
    TimeSeries noisy = x;
    Rng r(3);
    for (auto& v : noisy.values) v += 0.05 * r.normal();
    const auto d = gaussian_detrend(noisy, bw);
    EXPECT_NEAR(static_cast<double>(detect_tipping(d.trend).index), expected, bw);
}

TEST(DualTheta, OuForcingPerWindow) {
    std::vector<double> est;
    const auto p = simulate_stationary(StabilityParams::white(1.0, 1.0), 14000, 12);
    const auto rows = dual_theta_consistency(p, p, WindowPlan::disjoint(20, 700));
    ASSERT_EQ(rows.size(), 20u);
    int within = 0;
    for (const auto& r : rows) {
        est.push_back(r.theta_from_p);
        within += std::abs(r.theta_from_p - 1.0) < 0.1;
    }
    EXPECT_NEAR(median(est), 1.0, 0.1);
    EXPECT_GE(within, 10);
}

TEST(DualTheta, RatioOrderAndPairedTightening) {
    synthetic::DropDesign d;
    d.decreasing_lambda = false;
    d.lambda0 = 0.4;
    d.drop_amplitude = 0.0;
    d.duration = 14000;
    std::vector<double> paired_ratio, spread_paired, spread_indep;
    for (std::uint64_t s = 0; s < 6; ++s) {
        const auto a = synthetic::drop_series(d, 40 + s);
        const auto b = synthetic::drop_series(d, 90 + s);
        const auto plan = WindowPlan::disjoint(20, 700);
        const auto rp = dual_theta_consistency(a.v, a.p, plan);
        const auto ri = dual_theta_consistency(a.v, b.p, plan);
        std::vector<double> lp, li;
        for (std::size_t k = 0; k < rp.size(); ++k) {
            if (std::isfinite(rp[k].ratio)) {
                paired_ratio.push_back(rp[k].ratio);
                lp.push_back(std::log(rp[k].ratio));
            }
            if (std::isfinite(ri[k].ratio)) li.push_back(std::log(ri[k].ratio));
        }
        auto sd = [](const std::vector<double>& v) {
            double m = 0, ss = 0;
            for (double x : v) m += x;
            m /= static_cast<double>(v.size());
            for (double x : v) ss += (x - m) * (x - m);
            return std::sqrt(ss / static_cast<double>(v.size() - 1));
        };
        spread_paired.push_back(sd(lp));
        spread_indep.push_back(sd(li));
    }
    const double m = median(paired_ratio);
    EXPECT_GE(m, 0.5);
    EXPECT_LE(m, 2.0);
    EXPECT_LT(median(spread_paired), median(spread_indep));
}

TEST(Analyze, PairedDropWorkflow) {
    synthetic::DropDesign d;
    int acs = 0, psd = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto ps = synthetic::drop_series(d, 1000 + s);
        AnalyzeOptions o;
        o.bandwidth = 150.0;
        o.window_len = 400;
        const auto rep = analyze(ps.v, &ps.p, o);
        EXPECT_TRUE(rep.tipping.pronounced);
        EXPECT_LT(rep.tipping.index, static_cast<std::size_t>(d.drop_center));
        EXPECT_GT(rep.tipping.index, static_cast<std::size_t>(d.drop_center - 4 * d.drop_width));
        ASSERT_TRUE(rep.p_theta.has_value());
        EXPECT_EQ(rep.dual_theta.size(), rep.v_traces[0].values.size());
        EXPECT_EQ(rep.analyzed_length, rep.tipping.index);
        acs += rep.v_traces[2].kendall_tau > 0;
        psd += rep.v_traces[3].kendall_tau > 0;
    }
    EXPECT_GE(acs, 7);
    EXPECT_GE(psd, 7);
}

TEST(Analyze, SingleSeriesOmitsDualTable) {
    const auto ps = synthetic::drop_series(synthetic::DropDesign{}, 5);
    AnalyzeOptions o;
    o.bandwidth = 150.0;
    o.window_len = 400;
    const auto rep = analyze(ps.v, nullptr, o);
    EXPECT_FALSE(rep.p_theta.has_value());
    EXPECT_FALSE(rep.p_detrend.has_value());
    EXPECT_TRUE(rep.dual_theta.empty());
    EXPECT_EQ(rep.v_traces.size(), 6u);
}

TEST(Analyze, EarlyTippingIsAnError) {
    synthetic::DropDesign d;
    d.drop_center = 600.0;
    d.duration = 3000.0;
    const auto ps = synthetic::drop_series(d, 5);
    AnalyzeOptions o;
    o.bandwidth = 100.0;
    o.window_len = 500;
    EXPECT_THROW(analyze(ps.v, &ps.p, o), AnalysisError);
    o.truncate_at_tipping = false;
    EXPECT_NO_THROW(analyze(ps.v, &ps.p, o));
}
