#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "redcsd/analysis.hpp"

namespace redcsd {

/// Randomly drawn schedule endpoints of one benchmark instance.
struct InstanceDraw {
    std::size_t index = 0;
    double lambda0 = 0.0;  ///< U(0.3, 0.5)
    double theta0 = 0.0;   ///< U(0.5, 4), likewise the other three
    double thetaT = 0.0;
    double kappa0 = 0.0;
    double kappaT = 0.0;
    std::uint64_t seed_true = 0;
    std::uint64_t seed_null = 0;
};

InstanceDraw draw_instance(std::uint64_t master_seed, std::size_t index);

struct BenchmarkConfig {
    std::size_t n_instances = 500;
    double T = 14000.0;
    std::size_t n_windows = 20;   ///< windows covering the full span T
    std::size_t window_len = 700;
    double fraction = 1.0;        ///< share of the trend and of the windows used
    double integrator_step = 0.1;
    std::vector<Indicator> indicators = default_indicators();
    EstimatorOptions estimators;
    unsigned threads = 0;         ///< 0: hardware concurrency

    /// round(fraction * n_windows); exact multiples only (see validate).
    std::size_t windows_used() const;
    /// Throws ConfigError when windows do not tile T at unit sampling or the
    /// fraction does not select a whole number (>= 2) of windows.
    void validate() const;
};

/// Kendall tau per instance, true-CSD and null cases; NaN marks a missing entry.
struct IndicatorTaus {
    Indicator indicator = Indicator::Variance;
    std::vector<double> true_taus;
    std::vector<double> null_taus;
};

struct BenchmarkResult {
    BenchmarkConfig config;
    std::uint64_t master_seed = 0;
    std::vector<InstanceDraw> draws;
    std::vector<IndicatorTaus> taus;  ///< ordered as config.indicators
};

/// Schedule of one case of an instance (fold for the true case, constant for the null).
ParameterSchedule instance_schedule(const InstanceDraw& d, const BenchmarkConfig& cfg, bool true_case);

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg, std::uint64_t master_seed);

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocResult {
    std::vector<RocPoint> points;  ///< threshold from +inf down to -inf
    double auc = 0.0;
    RocPoint zero_threshold;       ///< rates at threshold 0
    std::size_t n_true = 0;
    std::size_t n_null = 0;
};

/// Positive call when tau > threshold.  NaN entries are ignored.
RocResult roc_curve(std::span<const double> taus_true, std::span<const double> taus_null);

/// P(tau_true > tau_null) + P(tie) / 2 over all pairs.  NaN entries are ignored.
double mann_whitney_auc(std::span<const double> taus_true, std::span<const double> taus_null);

struct GridCell {
    Indicator indicator = Indicator::Variance;
    double length = 0.0;
    double fraction = 0.0;
    bool feasible = false;
    double auc = 0.0;
    std::size_t n_effective = 0;
};

struct GridResult {
    std::vector<double> lengths;
    std::vector<double> fractions;
    std::vector<GridCell> cells;  ///< indicator-major, then length, then fraction

    const GridCell& at(Indicator ind, std::size_t length_idx, std::size_t fraction_idx) const;
};

/// One AUC per (indicator, length, fraction); each length is split into
/// cfg.n_windows windows of length / n_windows samples.
GridResult grid_benchmark(std::span<const double> lengths, std::span<const double> fractions,
                          const BenchmarkConfig& cfg_template, std::uint64_t master_seed);

}  // namespace redcsd
