#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "redcsd/error.hpp"
#include "redcsd/model.hpp"

using namespace redcsd;
using std::numbers::pi;

namespace {

double dt_integral(const StabilityParams& p) {
    auto f = [&](double w) { return psd_discrete(p, w); };
    return 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, pi, 20, 1e-13) / (2.0 * pi);
}

}  // namespace

TEST(StabilityParams, RejectsNonPositive) {
    EXPECT_THROW(StabilityParams::red(0.0, 1.0, 1.0), DomainError);
    EXPECT_THROW(StabilityParams::red(1.0, -1.0, 1.0), DomainError);
    EXPECT_THROW(StabilityParams::red(1.0, 1.0, std::nan("")), DomainError);
    EXPECT_THROW(StabilityParams::white(1.0, 0.0), DomainError);
    EXPECT_THROW(StabilityParams::white(INFINITY, 1.0), DomainError);
}

TEST(Variance, EqualRatesUnit) {
    EXPECT_NEAR(stationary_variance(StabilityParams::red(1, 1, 1)), 0.25, 1e-15);
}

TEST(Variance, MatchesLyapunovOracle) {
    for (auto [l, t, k] : {std::tuple{0.5, 2.0, 1.0}, {0.1, 3.0, 2.5}, {2.0, 0.3, 0.7}}) {
        const double oracle_var = oracle::red_covariance(l, t, k)[0];
        EXPECT_NEAR(stationary_variance(StabilityParams::red(l, t, k)), oracle_var, 1e-13 * oracle_var);
    }
    EXPECT_DOUBLE_EQ(stationary_variance(StabilityParams::white(0.5, 1.0)), 1.0);
}

TEST(Symmetry, SwapIsExact) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.05, 5.0);
    for (int i = 0; i < 50; ++i) {
        const auto p = StabilityParams::red(u(gen), u(gen), u(gen));
        const auto q = p.swapped();
        EXPECT_EQ(stationary_variance(p), stationary_variance(q));
        for (double tau : {0.5, 1.0, 3.0, 10.0}) EXPECT_EQ(stationary_ac(p, tau), stationary_ac(q, tau));
        for (double w : {0.0, 0.3, 1.0, 3.0, pi}) {
            EXPECT_EQ(psd_continuous(p, w), psd_continuous(q, w));
            EXPECT_EQ(psd_discrete(p, w), psd_discrete(q, w));
        }
    }
}

TEST(Autocorrelation, BasicValues) {
    const auto r = StabilityParams::red(0.5, 2.0, 1.0);
    const auto w = StabilityParams::white(0.5, 1.0);
    EXPECT_DOUBLE_EQ(stationary_ac(r, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(stationary_ac(w, 0.0), 1.0);
    EXPECT_NEAR(stationary_ac(w, 2.0), 0.36787944117144233, 1e-15);
    EXPECT_NEAR(stationary_ac(StabilityParams::red(1, 1, 1), 2.0), 3.0 * std::exp(-2.0), 1e-15);
    EXPECT_THROW(stationary_ac(r, -0.1), DomainError);
}

TEST(Autocorrelation, MatchesCovarianceOde) {
    for (auto [l, t, k] : {std::tuple{0.5, 2.0, 1.0}, {0.2, 0.25, 1.0}, {1.5, 0.4, 3.0}}) {
        const auto g = oracle::red_lag_covariance(l, t, k, 5);
        const auto p = StabilityParams::red(l, t, k);
        for (std::size_t lag = 1; lag <= 5; ++lag) {
            EXPECT_NEAR(stationary_ac(p, static_cast<double>(lag)), g[lag] / g[0], 1e-10) << l << " " << t;
        }
    }
}

TEST(Autocorrelation, StrictlyDecreasing) {
    const auto p = StabilityParams::red(0.3, 1.7, 1.0);
    double prev = 1.0;
    for (double tau = 0.25; tau < 30.0; tau += 0.25) {
        const double a = stationary_ac(p, tau);
        EXPECT_LT(a, prev);
        EXPECT_GT(a, 0.0);
        prev = a;
    }
}

TEST(Continuous, PointValuesAndEvenness) {
    EXPECT_DOUBLE_EQ(psd_continuous(StabilityParams::red(1, 1, 1), 0.0), 1.0);
    const auto p = StabilityParams::red(0.5, 2.0, 1.0);
    for (double w : {0.1, 1.0, 7.0}) EXPECT_EQ(psd_continuous(p, w), psd_continuous(p, -w));
    EXPECT_DOUBLE_EQ(psd_continuous(StabilityParams::white(0.5, 2.0), 0.0), 16.0);
}

TEST(Continuous, IntegratesToVariance) {
    for (const auto& p : {StabilityParams::red(0.5, 2.0, 1.0), StabilityParams::white(0.7, 1.3)}) {
        boost::math::quadrature::exp_sinh<double> integrator;
        const double half = integrator.integrate([&](double w) { return psd_continuous(p, w); }, 0.0,
                                                 std::numeric_limits<double>::infinity());
        EXPECT_NEAR(2.0 * half / (2.0 * pi), stationary_variance(p), 1e-9 * stationary_variance(p));
    }
}

TEST(Discrete, WhiteParseval) {
    EXPECT_NEAR(dt_integral(StabilityParams::white(0.5, 1.0)), 1.0, 1e-10);
}

TEST(Discrete, ParsevalRandomIncludingNearEqual) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.05, 4.0);
    for (int i = 0; i < 30; ++i) {
        const double l = u(gen);
        const double t = i % 3 == 0 ? l * (1.0 + 1e-9 * i) : (i % 3 == 1 ? l * (1.0 + 1e-4) : u(gen));
        const auto p = StabilityParams::red(l, t, 1.0 + i * 0.1);
        EXPECT_NEAR(dt_integral(p) / stationary_variance(p), 1.0, 1e-9) << l << " " << t;
    }
}

TEST(Discrete, WienerKhinchinSum) {
    const auto p = StabilityParams::red(0.5, 2.0, 1.0);
    const auto g = oracle::red_lag_covariance(0.5, 2.0, 1.0, 50);
    double s = g[0];
    for (std::size_t k = 1; k <= 50; ++k) s += 2.0 * g[k] * std::cos(pi / 2.0 * static_cast<double>(k));
    EXPECT_NEAR(psd_discrete(p, pi / 2.0), s, 1e-3);
}

TEST(Discrete, LongSumAcrossFrequencies) {
    for (auto [l, t] : {std::pair{0.05, 0.3}, {1.0, 1.0 + 1e-7}, {3.0, 45.0}}) {
        const auto p = StabilityParams::red(l, t, 1.0);
        const double var = stationary_variance(p);
        for (double w : {0.001, 0.2, 1.3, pi}) {
            double s = var;
            for (int k = 1; k < 3000; ++k) s += 2.0 * var * stationary_ac(p, k) * std::cos(w * k);
            EXPECT_NEAR(psd_discrete(p, w) / s, 1.0, 1e-9) << l << " " << t << " " << w;
        }
    }
}

TEST(Discrete, PeriodicAndPositive) {
    const auto p = StabilityParams::red(0.4, 2.0, 1.0);
    EXPECT_NEAR(psd_discrete(p, 0.7), psd_discrete(p, 0.7 + 2 * pi), 1e-12 * psd_discrete(p, 0.7));
    EXPECT_NEAR(psd_discrete(p, 0.7), psd_discrete(p, -0.7), 1e-12 * psd_discrete(p, 0.7));
    const auto big = StabilityParams::red(0.01, 600.0, 1.0);
    for (double w : {1e-6, 0.5, pi}) {
        EXPECT_TRUE(std::isfinite(psd_discrete(big, w)));
        EXPECT_GT(psd_discrete(big, w), 0.0);
    }
}

TEST(Limits, EqualRatesIsLimitOfGeneral) {
    for (double l : {0.1, 0.7, 2.0}) {
        const auto eq = StabilityParams::red(l, l, 1.3);
        for (double eps : {1e-6, -1e-6}) {
            const auto near = StabilityParams::red(l, l * (1 + eps), 1.3);
            EXPECT_NEAR(stationary_variance(near) / stationary_variance(eq), 1.0, 1e-5);
            for (double tau : {1.0, 2.0, 5.0}) EXPECT_NEAR(stationary_ac(near, tau), stationary_ac(eq, tau), 1e-5);
            for (double w : {0.0, 0.5, pi}) {
                EXPECT_NEAR(psd_discrete(near, w) / psd_discrete(eq, w), 1.0, 1e-5);
                EXPECT_NEAR(psd_continuous(near, w) / psd_continuous(eq, w), 1.0, 1e-5);
            }
        }
    }
}

TEST(Limits, WhiteConvergence) {
    const double l = 0.4, sigma = 1.5;
    const auto w = StabilityParams::white(l, sigma);
    double prev_var = INFINITY, prev_ac = INFINITY, prev_psd = INFINITY;
    for (double t : {10.0, 100.0, 1000.0}) {
        const auto r = StabilityParams::red(l, t, sigma * t);
        const double dv = std::abs(stationary_variance(r) - stationary_variance(w));
        const double da = std::abs(stationary_ac(r, 1.0) - stationary_ac(w, 1.0));
        const double dp = std::abs(psd_discrete(r, 1.0) - psd_discrete(w, 1.0));
        EXPECT_LT(dv, prev_var);
        EXPECT_LT(da, prev_ac);
        EXPECT_LT(dp, prev_psd);
        prev_var = dv;
        prev_ac = da;
        prev_psd = dp;
    }
    EXPECT_LT(prev_var / stationary_variance(w), 1e-2);
}

TEST(Monotonicity, TableThreeSweeps) {
    const double l0 = 0.6, t0 = 1.5, k0 = 1.0;
    auto var = [](double l, double t, double k) { return stationary_variance(StabilityParams::red(l, t, k)); };
    auto ac1 = [](double l, double t, double k) { return stationary_ac(StabilityParams::red(l, t, k), 1.0); };
    auto psd0 = [](double l, double t, double k) { return psd_discrete(StabilityParams::red(l, t, k), 0.0); };
    for (double s = 1.0; s > 0.05; s -= 0.05) {
        const double s2 = s - 0.05;
        EXPECT_LT(var(l0 * s, t0, k0), var(l0 * s2, t0, k0));
        EXPECT_LT(var(l0, t0 * s, k0), var(l0, t0 * s2, k0));
        EXPECT_LT(var(l0, t0, k0 / s), var(l0, t0, k0 / s2));
        EXPECT_LT(ac1(l0 * s, t0, k0), ac1(l0 * s2, t0, k0));
        EXPECT_LT(ac1(l0, t0 * s, k0), ac1(l0, t0 * s2, k0));
        EXPECT_DOUBLE_EQ(ac1(l0, t0, k0 / s), ac1(l0, t0, k0));
        EXPECT_LT(psd0(l0 * s, t0, k0), psd0(l0 * s2, t0, k0));
        EXPECT_LT(psd0(l0, t0 * s, k0), psd0(l0, t0 * s2, k0));
        EXPECT_LT(psd0(l0, t0, k0 / s), psd0(l0, t0, k0 / s2));
    }
}

TEST(Schedule, Endpoints) {
    ParameterSchedule s;
    s.lambda0 = 0.4;
    s.theta0 = 0.5;
    s.thetaT = 4.0;
    s.kappa0 = 1.0;
    s.kappaT = 2.0;
    EXPECT_DOUBLE_EQ(schedule_eval(s, 0.0).lambda, 0.4);
    EXPECT_DOUBLE_EQ(schedule_eval(s, 7000.0).theta, 2.25);
    EXPECT_DOUBLE_EQ(schedule_eval(s, 14000.0).lambda, 0.0);
    EXPECT_THROW(schedule_eval(s, -1.0), DomainError);
    EXPECT_THROW(schedule_eval(s, 14000.5), DomainError);
    s.lambda_path = LambdaPath::Constant;
    for (double t : {0.0, 3000.0, 14000.0}) EXPECT_DOUBLE_EQ(schedule_eval(s, t).lambda, 0.4);
}

TEST(Schedule, TruncatedTrend) {
    ParameterSchedule s;
    s.lambda0 = 0.4;
    s.theta0 = 0.5;
    s.thetaT = 4.0;
    s.kappa0 = 1.0;
    s.kappaT = 3.0;
    s.trend_fraction = 0.6;
    const double fT = 0.6 * s.T;
    EXPECT_NEAR(schedule_eval(s, fT).lambda, 0.4 * std::sqrt(0.4), 1e-15);
    EXPECT_DOUBLE_EQ(schedule_eval(s, fT).theta, 4.0);
    EXPECT_DOUBLE_EQ(schedule_eval(s, fT).kappa, 3.0);
    EXPECT_DOUBLE_EQ(schedule_eval(s, fT / 2).theta, 2.25);
    const auto held = schedule_eval(s, 13000.0);
    EXPECT_DOUBLE_EQ(held.lambda, schedule_eval(s, fT).lambda);
    EXPECT_GT(held.lambda, 0.0);
}

TEST(Schedule, Validation) {
    ParameterSchedule s;
    s.trend_fraction = 0.0;
    EXPECT_THROW(s.validate(), ConfigError);
    s.trend_fraction = 1.0;
    s.theta0 = -1.0;
    EXPECT_THROW(s.validate(), ConfigError);
    EXPECT_THROW(lambda_path_from_string("linear"), ConfigError);
    EXPECT_EQ(lambda_path_from_string("fold"), LambdaPath::Fold);
}
