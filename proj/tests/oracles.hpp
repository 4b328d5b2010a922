#pragma once

// Reference computations that do not reuse the library's closed forms.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

// Stationary covariance of (X, U) for dX = (-l X + k U) dt, dU = -t U dt + dW,
// from the Lyapunov equation A S + S A' + diag(0, 1) = 0.
inline std::array<double, 3> red_covariance(double l, double t, double k) {
    const double suu = 1.0 / (2.0 * t);
    const double sxu = k * suu / (l + t);
    const double sxx = k * sxu / l;
    return {sxx, sxu, suu};
}

// Lag covariances gamma(0..max_lag) of X by integrating C' = A C from the
// stationary covariance with classical RK4 (first column: Cov(X_{t+s}, X_t),
// Cov(U_{t+s}, X_t)).
inline std::vector<double> red_lag_covariance(double l, double t, double k, std::size_t max_lag,
                                              int substeps = 2000) {
    const auto s = red_covariance(l, t, k);
    double cx = s[0], cu = s[1];
    std::vector<double> out{cx};
    const double h = 1.0 / substeps;
    auto fx = [&](double x, double u) { return -l * x + k * u; };
    auto fu = [&](double, double u) { return -t * u; };
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        for (int i = 0; i < substeps; ++i) {
            const double k1x = fx(cx, cu), k1u = fu(cx, cu);
            const double k2x = fx(cx + 0.5 * h * k1x, cu + 0.5 * h * k1u), k2u = fu(0, cu + 0.5 * h * k1u);
            const double k3x = fx(cx + 0.5 * h * k2x, cu + 0.5 * h * k2u), k3u = fu(0, cu + 0.5 * h * k2u);
            const double k4x = fx(cx + h * k3x, cu + h * k3u), k4u = fu(0, cu + h * k3u);
            cx += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
            cu += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
        }
        out.push_back(cx);
    }
    return out;
}

// Kendall tau-b of values against their index by pair enumeration.
inline double kendall_brute(const std::vector<double>& v) {
    const std::size_t n = v.size();
    long long conc = 0, disc = 0, ties_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (v[j] > v[i]) {
                ++conc;
            } else if (v[j] < v[i]) {
                ++disc;
            } else {
                ++ties_y;
            }
        }
    }
    const double n0 = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    const double denom = std::sqrt(n0 * (n0 - static_cast<double>(ties_y)));
    return denom > 0.0 ? static_cast<double>(conc - disc) / denom : 0.0;
}

// Sample mean, variance, and batch-means standard errors for var and lag-k ac.
struct SampleStats {
    double var = 0.0;
    std::vector<double> ac;        // lags 1..k
    double var_se = 0.0;
    std::vector<double> ac_se;
};

inline SampleStats sample_stats(const std::vector<double>& x, std::size_t max_lag, std::size_t n_batches = 50) {
    auto stats_of = [&](std::size_t begin, std::size_t end, double& var, std::vector<double>& ac) {
        const double n = static_cast<double>(end - begin);
        double mean = 0.0;
        for (std::size_t i = begin; i < end; ++i) mean += x[i];
        mean /= n;
        double c0 = 0.0;
        for (std::size_t i = begin; i < end; ++i) c0 += (x[i] - mean) * (x[i] - mean);
        var = c0 / n;
        ac.assign(max_lag, 0.0);
        for (std::size_t k = 1; k <= max_lag; ++k) {
            double c = 0.0;
            for (std::size_t i = begin; i + k < end; ++i) c += (x[i] - mean) * (x[i + k] - mean);
            ac[k - 1] = c / c0;
        }
    };
    SampleStats s;
    stats_of(0, x.size(), s.var, s.ac);
    const std::size_t len = x.size() / n_batches;
    std::vector<double> bv(n_batches);
    std::vector<std::vector<double>> ba(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) stats_of(b * len, (b + 1) * len, bv[b], ba[b]);
    auto se = [&](auto get) {
        double m = 0.0;
        for (std::size_t b = 0; b < n_batches; ++b) m += get(b);
        m /= static_cast<double>(n_batches);
        double ss = 0.0;
        for (std::size_t b = 0; b < n_batches; ++b) ss += (get(b) - m) * (get(b) - m);
        return std::sqrt(ss / static_cast<double>(n_batches - 1) / static_cast<double>(n_batches));
    };
    s.var_se = se([&](std::size_t b) { return bv[b]; });
    for (std::size_t k = 0; k < max_lag; ++k) s.ac_se.push_back(se([&](std::size_t b) { return ba[b][k]; }));
    return s;
}

}  // namespace oracle
