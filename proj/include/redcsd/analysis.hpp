#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "redcsd/simulate.hpp"

namespace redcsd {

struct WindowPlan {
    enum class Mode { Disjoint, Overlapping };

    std::size_t n_windows = 0;  ///< 0: as many as fit
    std::size_t window_len = 700;
    Mode mode = Mode::Disjoint;
    std::size_t stride = 0;  ///< Overlapping only

    static WindowPlan disjoint(std::size_t n_windows, std::size_t window_len) {
        return {n_windows, window_len, Mode::Disjoint, 0};
    }
    static WindowPlan overlapping(std::size_t window_len, std::size_t stride, std::size_t n_windows = 0) {
        return {n_windows, window_len, Mode::Overlapping, stride};
    }

    /// Number of windows this plan yields on a series of the given length.
    /// Throws DomainError when the plan is infeasible.
    std::size_t count_for(std::size_t length) const;
};

/// Consecutive windows from the start of the series; a short tail is dropped.
std::vector<TimeSeries> window_partition(const TimeSeries& x, const WindowPlan& plan);

enum class Indicator {
    Variance,
    Ac1,
    Glsar,
    AcsLambda,
    PsdLambda,
    AcsTheta,
    PsdTheta,
    OuTheta,
};

std::string_view to_string(Indicator ind);
Indicator indicator_from_string(std::string_view name);

/// +1 when an increase of the raw value signals slowing down, -1 when a
/// decrease does (restoring-rate estimates).
int csd_sign(Indicator ind);

/// The five indicators compared by the benchmark.
std::vector<Indicator> default_indicators();

struct EstimatorOptions {
    std::size_t tau_max = 3;
    std::size_t psd_block = 10;
    bool center_windows = true;  ///< subtract each window's mean before estimating
};

/// Value of one indicator on one window; NaN when the estimator fails.
double evaluate_indicator(Indicator ind, std::span<const double> window, const EstimatorOptions& opts = {});

struct IndicatorTrace {
    Indicator indicator = Indicator::Variance;
    std::vector<double> values;      ///< raw estimates per window, NaN when failed
    std::vector<bool> failed;
    std::vector<double> window_start;  ///< time of each window's first sample
    /// Kendall tau of csd_sign * value over the non-failed windows, so a
    /// positive value is an alarm.  NaN when fewer than two windows succeeded.
    double kendall_tau = 0.0;
    int sign = 1;

    std::size_t n_valid() const;
};

/// Traces for several indicators; estimator fits are shared between
/// indicators that need the same fit.  Does not throw on failed windows.
std::vector<IndicatorTrace> indicator_traces(const TimeSeries& x, const WindowPlan& plan,
                                             std::span<const Indicator> indicators,
                                             const EstimatorOptions& opts = {});

/// Single trace; throws AnalysisError when every window failed.
IndicatorTrace indicator_trace(const TimeSeries& x, const WindowPlan& plan, Indicator indicator,
                               const EstimatorOptions& opts = {});

/// Tau-b of the values against their index.  Zero when every value ties.
double kendall_tau(std::span<const double> values);

struct DetrendResult {
    TimeSeries trend;
    TimeSeries residual;
    double bandwidth = 0.0;
};

/// Gaussian smoothing (std = bandwidth samples, truncated at 4 std,
/// half-sample reflection at both ends).  Requires 0 < bandwidth < n / 2.
DetrendResult gaussian_detrend(const TimeSeries& x, double bandwidth);

/// Tie tolerance and "no pronounced curvature" threshold, relative to the trend range.
inline constexpr double NOCURV_EPS_REL = 1e-9;

struct TippingPoint {
    std::size_t index = 0;
    double curvature = 0.0;  ///< second difference at the index
    bool pronounced = true;  ///< false when no second difference is notably negative
};

/// Sample of most negative centered second difference; earliest among ties.
TippingPoint detect_tipping(const TimeSeries& trend);

struct DualThetaRow {
    double window_start = 0.0;
    double theta_from_v = std::numeric_limits<double>::quiet_NaN();
    double theta_from_p = std::numeric_limits<double>::quiet_NaN();
    double ratio = std::numeric_limits<double>::quiet_NaN();  ///< theta_from_v / theta_from_p
};

/// Noise correlation rate estimated twice per window: from the observable
/// (theta of the ACS or PSD fit) and from the forcing (OU lag-1 inversion).
std::vector<DualThetaRow> dual_theta_consistency(const TimeSeries& v, const TimeSeries& p, const WindowPlan& plan,
                                                 const EstimatorOptions& opts = {}, bool use_psd = false);

// ---------------------------------------------------------------------------

struct AnalyzeOptions {
    double bandwidth = 200.0;
    std::size_t window_len = 500;
    std::size_t n_windows = 0;  ///< 0: as many as fit before the tipping point
    std::optional<std::size_t> stride;  ///< overlapping windows when set
    bool truncate_at_tipping = true;    ///< false: analyze the full series
    EstimatorOptions estimators;
};

struct AnalyzeReport {
    DetrendResult v_detrend;
    std::optional<DetrendResult> p_detrend;
    TippingPoint tipping;
    std::size_t analyzed_length = 0;
    WindowPlan plan;
    std::vector<IndicatorTrace> v_traces;  ///< var, ac1, acs, psd, acs_theta, psd_theta
    std::optional<IndicatorTrace> p_theta;
    std::vector<DualThetaRow> dual_theta;
};

/// Detrend, locate the tipping point on the smoothed observable, and run the
/// windowed estimators on the residuals before it.  Throws AnalysisError when
/// not even one window fits before the tipping point.
AnalyzeReport analyze(const TimeSeries& v, const TimeSeries* p, const AnalyzeOptions& opts);

}  // namespace redcsd
