#include "redcsd/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "redcsd/error.hpp"
#include "redcsd/rng.hpp"
#include "redcsd/simulate.hpp"

namespace redcsd {

InstanceDraw draw_instance(std::uint64_t master_seed, std::size_t index) {
    Rng rng(derive_seed(master_seed, index, 0));
    InstanceDraw d;
    d.index = index;
    d.lambda0 = rng.uniform(0.3, 0.5);
    d.theta0 = rng.uniform(0.5, 4.0);
    d.thetaT = rng.uniform(0.5, 4.0);
    d.kappa0 = rng.uniform(0.5, 4.0);
    d.kappaT = rng.uniform(0.5, 4.0);
    d.seed_true = derive_seed(master_seed, index, 1);
    d.seed_null = derive_seed(master_seed, index, 2);
    return d;
}

std::size_t BenchmarkConfig::windows_used() const {
    return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n_windows)));
}

void BenchmarkConfig::validate() const {
    if (n_instances < 1) {
        throw ConfigError("need at least one instance");
    }
    if (n_windows < 1 || window_len < 2) {
        throw ConfigError("need at least one window of two samples");
    }
    if (std::abs(static_cast<double>(n_windows * window_len) - T) > 1e-9 * T) {
        throw ConfigError("n_windows * window_len must equal T (unit sampling)");
    }
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ConfigError("fraction must lie in (0, 1]");
    }
    const double used = fraction * static_cast<double>(n_windows);
    if (std::abs(used - std::round(used)) > 1e-9 * static_cast<double>(n_windows)) {
        throw ConfigError("fraction * n_windows must be a whole number of windows");
    }
    if (windows_used() < 2) {
        throw ConfigError("fraction selects fewer than two windows; no trend statistic");
    }
    if (indicators.empty()) {
        throw ConfigError("no indicators selected");
    }
    if (!(integrator_step > 0.0)) {
        throw ConfigError("integrator step must be positive");
    }
}

ParameterSchedule instance_schedule(const InstanceDraw& d, const BenchmarkConfig& cfg, bool true_case) {
    ParameterSchedule s;
    s.T = cfg.T;
    s.lambda_path = true_case ? LambdaPath::Fold : LambdaPath::Constant;
    s.lambda0 = d.lambda0;
    s.theta0 = d.theta0;
    s.thetaT = d.thetaT;
    s.kappa0 = d.kappa0;
    s.kappaT = d.kappaT;
    s.trend_fraction = cfg.fraction;
    return s;
}

namespace {

std::vector<double> case_taus(const InstanceDraw& d, const BenchmarkConfig& cfg, bool true_case) {
    SimConfig sim;
    sim.schedule = instance_schedule(d, cfg, true_case);
    sim.integrator_step = cfg.integrator_step;
    sim.output_step = 1.0;
    sim.duration = static_cast<double>(cfg.windows_used() * cfg.window_len);
    sim.seed = true_case ? d.seed_true : d.seed_null;
    const TimeSeries x = integrate(sim);

    const auto plan = WindowPlan::disjoint(cfg.windows_used(), cfg.window_len);
    const auto traces = indicator_traces(x, plan, cfg.indicators, cfg.estimators);
    std::vector<double> taus(traces.size());
    for (std::size_t k = 0; k < traces.size(); ++k) {
        taus[k] = traces[k].kendall_tau;
    }
    return taus;
}

template <class Work>
void parallel_for(std::size_t n, unsigned threads, Work&& work) {
    unsigned nt = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto loop = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                work(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (nt <= 1) {
        loop();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < nt; ++t) pool.emplace_back(loop);
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg, std::uint64_t master_seed) {
    cfg.validate();
    BenchmarkResult res;
    res.config = cfg;
    res.master_seed = master_seed;
    res.draws.resize(cfg.n_instances);
    res.taus.resize(cfg.indicators.size());
    for (std::size_t k = 0; k < cfg.indicators.size(); ++k) {
        res.taus[k].indicator = cfg.indicators[k];
        res.taus[k].true_taus.assign(cfg.n_instances, std::numeric_limits<double>::quiet_NaN());
        res.taus[k].null_taus.assign(cfg.n_instances, std::numeric_limits<double>::quiet_NaN());
    }
    // Each instance writes only its own slots.
    parallel_for(cfg.n_instances, cfg.threads, [&](std::size_t i) {
        const InstanceDraw d = draw_instance(master_seed, i);
        res.draws[i] = d;
        const auto t_true = case_taus(d, cfg, true);
        const auto t_null = case_taus(d, cfg, false);
        for (std::size_t k = 0; k < t_true.size(); ++k) {
            res.taus[k].true_taus[i] = t_true[k];
            res.taus[k].null_taus[i] = t_null[k];
        }
    });
    return res;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> finite_sorted(std::span<const double> v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (double x : v) {
        if (std::isfinite(x)) out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Fraction of sorted values strictly above h.
double share_above(const std::vector<double>& sorted, double h) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), h);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

}  // namespace

RocResult roc_curve(std::span<const double> taus_true, std::span<const double> taus_null) {
    const auto t = finite_sorted(taus_true);
    const auto f = finite_sorted(taus_null);
    if (t.empty() || f.empty()) {
        throw DomainError("ROC needs at least one value in each class");
    }
    std::vector<double> thresholds;
    thresholds.reserve(t.size() + f.size());
    std::merge(t.begin(), t.end(), f.begin(), f.end(), std::back_inserter(thresholds));
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    std::reverse(thresholds.begin(), thresholds.end());

    RocResult r;
    r.n_true = t.size();
    r.n_null = f.size();
    const double inf = std::numeric_limits<double>::infinity();
    r.points.push_back({inf, 0.0, 0.0});
    for (double h : thresholds) {
        r.points.push_back({h, share_above(f, h), share_above(t, h)});
    }
    r.points.push_back({-inf, 1.0, 1.0});

    double area = 0.0;
    for (std::size_t i = 1; i < r.points.size(); ++i) {
        const auto& a = r.points[i - 1];
        const auto& b = r.points[i];
        area += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
    }
    r.auc = area;
    r.zero_threshold = {0.0, share_above(f, 0.0), share_above(t, 0.0)};
    return r;
}

double mann_whitney_auc(std::span<const double> taus_true, std::span<const double> taus_null) {
    const auto t = finite_sorted(taus_true);
    const auto f = finite_sorted(taus_null);
    if (t.empty() || f.empty()) {
        throw DomainError("AUC needs at least one value in each class");
    }
    double wins = 0.0;
    for (double a : t) {
        for (double b : f) {
            wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
        }
    }
    return wins / (static_cast<double>(t.size()) * static_cast<double>(f.size()));
}

// ---------------------------------------------------------------------------

const GridCell& GridResult::at(Indicator ind, std::size_t li, std::size_t fi) const {
    for (const auto& c : cells) {
        if (c.indicator == ind && c.length == lengths.at(li) && c.fraction == fractions.at(fi)) {
            return c;
        }
    }
    throw DomainError("no grid cell for the requested indicator");
}

GridResult grid_benchmark(std::span<const double> lengths, std::span<const double> fractions,
                          const BenchmarkConfig& cfg_template, std::uint64_t master_seed) {
    GridResult g;
    g.lengths.assign(lengths.begin(), lengths.end());
    g.fractions.assign(fractions.begin(), fractions.end());
    const std::size_t nl = lengths.size();
    const std::size_t nf = fractions.size();
    const std::size_t ni = cfg_template.indicators.size();
    g.cells.resize(ni * nl * nf);
    for (std::size_t k = 0; k < ni; ++k) {
        for (std::size_t li = 0; li < nl; ++li) {
            for (std::size_t fi = 0; fi < nf; ++fi) {
                auto& c = g.cells[(k * nl + li) * nf + fi];
                c.indicator = cfg_template.indicators[k];
                c.length = lengths[li];
                c.fraction = fractions[fi];
            }
        }
    }
    for (std::size_t li = 0; li < nl; ++li) {
        for (std::size_t fi = 0; fi < nf; ++fi) {
            BenchmarkConfig cfg = cfg_template;
            cfg.T = lengths[li];
            cfg.fraction = fractions[fi];
            const double wl = lengths[li] / static_cast<double>(cfg.n_windows);
            cfg.window_len = static_cast<std::size_t>(std::llround(wl));
            try {
                if (std::abs(wl - std::round(wl)) > 1e-9 * wl) {
                    throw ConfigError("length not divisible into whole windows");
                }
                cfg.validate();
            } catch (const ConfigError&) {
                continue;  // cell stays infeasible
            }
            const BenchmarkResult res = run_benchmark(cfg, master_seed);
            for (std::size_t k = 0; k < ni; ++k) {
                auto& c = g.cells[(k * nl + li) * nf + fi];
                const auto roc = roc_curve(res.taus[k].true_taus, res.taus[k].null_taus);
                c.feasible = true;
                c.auc = roc.auc;
                c.n_effective = std::min(roc.n_true, roc.n_null);
            }
        }
    }
    return g;
}

}  // namespace redcsd
