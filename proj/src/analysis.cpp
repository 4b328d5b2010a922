#include "redcsd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "redcsd/error.hpp"
#include "redcsd/estimators.hpp"

namespace redcsd {

std::size_t WindowPlan::count_for(std::size_t length) const {
    if (window_len < 2) {
        throw DomainError("window length must be at least 2");
    }
    if (length < window_len) {
        throw DomainError("series shorter than one window");
    }
    std::size_t fit = 0;
    if (mode == Mode::Disjoint) {
        fit = length / window_len;
    } else {
        if (stride < 1) {
            throw DomainError("overlapping windows need stride >= 1");
        }
        fit = (length - window_len) / stride + 1;
    }
    if (n_windows == 0) {
        return fit;
    }
    if (n_windows > fit) {
        throw DomainError("window plan needs " + std::to_string(n_windows) + " windows but only " +
                          std::to_string(fit) + " fit");
    }
    return n_windows;
}

std::vector<TimeSeries> window_partition(const TimeSeries& x, const WindowPlan& plan) {
    const std::size_t count = plan.count_for(x.size());
    const std::size_t step = plan.mode == WindowPlan::Mode::Disjoint ? plan.window_len : plan.stride;
    std::vector<TimeSeries> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(x.slice(i * step, plan.window_len));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Indicator ind) {
    switch (ind) {
        case Indicator::Variance: return "var";
        case Indicator::Ac1: return "ac1";
        case Indicator::Glsar: return "glsar";
        case Indicator::AcsLambda: return "acs";
        case Indicator::PsdLambda: return "psd";
        case Indicator::AcsTheta: return "acs_theta";
        case Indicator::PsdTheta: return "psd_theta";
        case Indicator::OuTheta: return "ou_theta";
    }
    return "?";
}

Indicator indicator_from_string(std::string_view name) {
    for (Indicator ind : {Indicator::Variance, Indicator::Ac1, Indicator::Glsar, Indicator::AcsLambda,
                          Indicator::PsdLambda, Indicator::AcsTheta, Indicator::PsdTheta, Indicator::OuTheta}) {
        if (to_string(ind) == name) {
            return ind;
        }
    }
    throw ConfigError("unknown indicator \"" + std::string(name) + "\"");
}

int csd_sign(Indicator ind) {
    return (ind == Indicator::AcsLambda || ind == Indicator::PsdLambda) ? -1 : 1;
}

std::vector<Indicator> default_indicators() {
    return {Indicator::Variance, Indicator::Ac1, Indicator::Glsar, Indicator::AcsLambda, Indicator::PsdLambda};
}

namespace {

// Per-window estimates, computing each fit at most once.
class WindowEstimates {
public:
    WindowEstimates(std::span<const double> window, const EstimatorOptions& opts) : opts_(opts) {
        if (opts.center_windows) {
            data_ = centered(window);
        } else {
            data_.assign(window.begin(), window.end());
        }
    }

    double value(Indicator ind) {
        switch (ind) {
            case Indicator::Variance: return var_hat(data_);
            case Indicator::Ac1: return ac_hat(data_, 1);
            case Indicator::Glsar: {
                const auto r = fit_glsar(data_);
                return r.ok() ? r.value : nan();
            }
            case Indicator::AcsLambda: return acs().ok() ? acs().lambda : nan();
            case Indicator::PsdLambda: return psd().ok() ? psd().lambda : nan();
            case Indicator::AcsTheta: return acs().kind == FitResult::Kind::Red ? acs().theta : nan();
            case Indicator::PsdTheta: return psd().kind == FitResult::Kind::Red ? psd().theta : nan();
            case Indicator::OuTheta: {
                const auto r = theta_from_ou(data_);
                return r.ok() ? r.value : nan();
            }
        }
        return nan();
    }

private:
    static double nan() { return std::numeric_limits<double>::quiet_NaN(); }

    const FitResult& acs() {
        if (!acs_) {
            acs_ = data_.size() > opts_.tau_max ? fit_acs(data_, opts_.tau_max)
                                                : FitResult::failed("window too short");
        }
        return *acs_;
    }
    const FitResult& psd() {
        if (!psd_) {
            psd_ = data_.size() >= 3 ? fit_psd(data_, opts_.psd_block) : FitResult::failed("window too short");
        }
        return *psd_;
    }

    EstimatorOptions opts_;
    std::vector<double> data_;
    std::optional<FitResult> acs_;
    std::optional<FitResult> psd_;
};

}  // namespace

double evaluate_indicator(Indicator ind, std::span<const double> window, const EstimatorOptions& opts) {
    WindowEstimates est(window, opts);
    const double v = est.value(ind);
    return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
}

std::size_t IndicatorTrace::n_valid() const {
    return static_cast<std::size_t>(std::count(failed.begin(), failed.end(), false));
}

std::vector<IndicatorTrace> indicator_traces(const TimeSeries& x, const WindowPlan& plan,
                                             std::span<const Indicator> indicators, const EstimatorOptions& opts) {
    const auto windows = window_partition(x, plan);
    std::vector<IndicatorTrace> traces(indicators.size());
    for (std::size_t k = 0; k < indicators.size(); ++k) {
        traces[k].indicator = indicators[k];
        traces[k].sign = csd_sign(indicators[k]);
    }
    for (const auto& w : windows) {
        WindowEstimates est(w.view(), opts);
        for (std::size_t k = 0; k < indicators.size(); ++k) {
            const double v = est.value(indicators[k]);
            const bool bad = !std::isfinite(v);
            traces[k].values.push_back(bad ? std::numeric_limits<double>::quiet_NaN() : v);
            traces[k].failed.push_back(bad);
            traces[k].window_start.push_back(w.t0);
        }
    }
    for (auto& tr : traces) {
        std::vector<double> oriented;
        for (std::size_t i = 0; i < tr.values.size(); ++i) {
            if (!tr.failed[i]) {
                oriented.push_back(tr.sign * tr.values[i]);
            }
        }
        tr.kendall_tau = oriented.size() >= 2 ? kendall_tau(oriented) : std::numeric_limits<double>::quiet_NaN();
    }
    return traces;
}

IndicatorTrace indicator_trace(const TimeSeries& x, const WindowPlan& plan, Indicator indicator,
                               const EstimatorOptions& opts) {
    const Indicator one[] = {indicator};
    auto traces = indicator_traces(x, plan, one, opts);
    if (traces[0].n_valid() == 0) {
        throw AnalysisError("estimator \"" + std::string(to_string(indicator)) + "\" failed on every window");
    }
    return std::move(traces[0]);
}

double kendall_tau(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) {
        throw DomainError("Kendall tau needs at least two values");
    }
    // Index has no ties, so tau-b = (C - D) / sqrt(n0 (n0 - n_ties)).
    long long concordant_minus_discordant = 0;
    long long tied = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (values[j] > values[i]) {
                ++concordant_minus_discordant;
            } else if (values[j] < values[i]) {
                --concordant_minus_discordant;
            } else {
                ++tied;
            }
        }
    }
    const double n0 = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    const double denom = std::sqrt(n0 * (n0 - static_cast<double>(tied)));
    if (denom == 0.0) {
        return 0.0;
    }
    return static_cast<double>(concordant_minus_discordant) / denom;
}

// ---------------------------------------------------------------------------

DetrendResult gaussian_detrend(const TimeSeries& x, double bandwidth) {
    const std::size_t n = x.size();
    if (!(bandwidth > 0.0)) {
        throw DomainError("bandwidth must be positive");
    }
    if (!(bandwidth < static_cast<double>(n) / 2.0)) {
        throw DomainError("bandwidth must be below half the series length");
    }
    const auto radius = static_cast<std::ptrdiff_t>(4.0 * bandwidth + 0.5);
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double norm = 0.0;
    for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        const double z = static_cast<double>(k) / bandwidth;
        kernel[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * z * z);
        norm += kernel[static_cast<std::size_t>(k + radius)];
    }
    for (double& w : kernel) {
        w /= norm;
    }

    const auto len = static_cast<std::ptrdiff_t>(n);
    auto reflect = [len](std::ptrdiff_t i) {
        // half-sample symmetric extension: ... b a | a b c ... x y | y x ...
        const std::ptrdiff_t period = 2 * len;
        std::ptrdiff_t j = i % period;
        if (j < 0) {
            j += period;
        }
        return j < len ? j : period - 1 - j;
    };

    DetrendResult out;
    out.bandwidth = bandwidth;
    out.trend = x;
    out.residual = x;
    for (std::ptrdiff_t i = 0; i < len; ++i) {
        double s = 0.0;
        if (i - radius >= 0 && i + radius < len) {
            for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
                s += kernel[static_cast<std::size_t>(k + radius)] * x.values[static_cast<std::size_t>(i + k)];
            }
        } else {
            for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
                s += kernel[static_cast<std::size_t>(k + radius)] * x.values[static_cast<std::size_t>(reflect(i + k))];
            }
        }
        out.trend.values[static_cast<std::size_t>(i)] = s;
        out.residual.values[static_cast<std::size_t>(i)] = x.values[static_cast<std::size_t>(i)] - s;
    }
    return out;
}

TippingPoint detect_tipping(const TimeSeries& trend) {
    const auto& y = trend.values;
    if (y.size() < 3) {
        throw DomainError("tipping detection needs at least three samples");
    }
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double eps = NOCURV_EPS_REL * (*hi - *lo);

    double min_curv = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        min_curv = std::min(min_curv, y[i - 1] - 2.0 * y[i] + y[i + 1]);
    }
    TippingPoint tp;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        const double c = y[i - 1] - 2.0 * y[i] + y[i + 1];
        if (c <= min_curv + eps) {
            tp.index = i;
            tp.curvature = c;
            break;
        }
    }
    tp.pronounced = min_curv < -eps;
    return tp;
}

std::vector<DualThetaRow> dual_theta_consistency(const TimeSeries& v, const TimeSeries& p, const WindowPlan& plan,
                                                 const EstimatorOptions& opts, bool use_psd) {
    if (v.size() != p.size()) {
        throw DomainError("paired series must have equal length");
    }
    const auto wv = window_partition(v, plan);
    const auto wp = window_partition(p, plan);
    std::vector<DualThetaRow> rows(wv.size());
    const Indicator from_v = use_psd ? Indicator::PsdTheta : Indicator::AcsTheta;
    for (std::size_t i = 0; i < wv.size(); ++i) {
        rows[i].window_start = wv[i].t0;
        rows[i].theta_from_v = evaluate_indicator(from_v, wv[i].view(), opts);
        rows[i].theta_from_p = evaluate_indicator(Indicator::OuTheta, wp[i].view(), opts);
        rows[i].ratio = rows[i].theta_from_v / rows[i].theta_from_p;
    }
    return rows;
}

// ---------------------------------------------------------------------------

AnalyzeReport analyze(const TimeSeries& v, const TimeSeries* p, const AnalyzeOptions& opts) {
    v.validate();
    if (p && p->size() != v.size()) {
        throw DomainError("paired series must have equal length");
    }
    AnalyzeReport rep;
    rep.v_detrend = gaussian_detrend(v, opts.bandwidth);
    rep.tipping = detect_tipping(rep.v_detrend.trend);
    rep.analyzed_length = opts.truncate_at_tipping ? rep.tipping.index : v.size();

    rep.plan = opts.stride ? WindowPlan::overlapping(opts.window_len, *opts.stride, opts.n_windows)
                           : WindowPlan::disjoint(opts.n_windows, opts.window_len);
    if (rep.analyzed_length < opts.window_len) {
        throw AnalysisError("tipping point at sample " + std::to_string(rep.tipping.index) +
                            " leaves fewer samples than one window of " + std::to_string(opts.window_len));
    }
    const TimeSeries v_res = rep.v_detrend.residual.slice(0, rep.analyzed_length);
    try {
        rep.plan.count_for(rep.analyzed_length);
    } catch (const DomainError& e) {
        throw AnalysisError(std::string("window plan infeasible before the tipping point: ") + e.what());
    }

    const Indicator v_inds[] = {Indicator::Variance, Indicator::Ac1,      Indicator::AcsLambda,
                                Indicator::PsdLambda, Indicator::AcsTheta, Indicator::PsdTheta};
    rep.v_traces = indicator_traces(v_res, rep.plan, v_inds, opts.estimators);

    if (p) {
        rep.p_detrend = gaussian_detrend(*p, opts.bandwidth);
        const TimeSeries p_res = rep.p_detrend->residual.slice(0, rep.analyzed_length);
        const Indicator p_inds[] = {Indicator::OuTheta};
        rep.p_theta = indicator_traces(p_res, rep.plan, p_inds, opts.estimators)[0];
        rep.dual_theta = dual_theta_consistency(v_res, p_res, rep.plan, opts.estimators);
    }
    return rep;
}

}  // namespace redcsd
