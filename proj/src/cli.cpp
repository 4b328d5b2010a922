#include "redcsd/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "redcsd/error.hpp"
#include "redcsd/serialization.hpp"
#include "redcsd/timeseries_io.hpp"

#ifndef REDCSD_VERSION
#define REDCSD_VERSION "dev"
#endif

namespace redcsd {

namespace fs = std::filesystem;

namespace {

Json load_json(const fs::path& path) {
    const std::string text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::vector<Indicator> parse_indicators(const std::vector<std::string>& names) {
    std::vector<Indicator> out;
    for (const auto& n : names) out.push_back(indicator_from_string(n));
    return out;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + dir.string());
    }
}

std::string pick_column(const CsvSeries& csv, const std::string& column, TimeSeries& out) {
    if (column.empty() || column == csv.columns[0]) {
        out = csv.first;
        return csv.columns[0];
    }
    if (csv.second && column == csv.columns[1]) {
        out = *csv.second;
        return csv.columns[1];
    }
    throw ConfigError("input has no column '" + column + "'");
}

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::uint64_t seed = 0;
    std::string output;
    std::string binary;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& /*out*/, std::ostream& err) {
    SimConfig cfg = sim_config_from_json(load_json(a.config));
    cfg.seed = a.seed;
    err << to_json(cfg).dump() << '\n';
    const TimeSeries x = integrate(cfg);
    write_file_atomic(a.output, format_series_csv(x, "x"));
    if (!a.binary.empty()) write_series_binary(a.binary, x);
    return EXIT_OK;
}

struct EstimateArgs {
    std::string input;
    std::string column;
    std::vector<std::string> estimators{"acs", "psd"};
    std::size_t tau_max = 3;
    std::size_t psd_block = 10;
    std::string output;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream&) {
    const CsvSeries csv = read_series_csv(a.input);
    TimeSeries x;
    const std::string col = pick_column(csv, a.column, x);
    x.validate();
    const std::vector<double> xc = centered(x.view());

    Json estimates = Json::object();
    bool all_ok = true;
    for (const auto& name : a.estimators) {
        if (name == "var") {
            estimates[name] = var_hat(xc);
        } else if (name == "ac1") {
            const double r = ac_hat(xc, 1);
            all_ok = all_ok && std::isfinite(r);
            estimates[name] = std::isfinite(r) ? Json(r) : Json(nullptr);
        } else if (name == "acs" || name == "psd") {
            const FitResult r = name == "acs" ? fit_acs(xc, a.tau_max) : fit_psd(xc, a.psd_block);
            all_ok = all_ok && r.ok();
            estimates[name] = to_json(r);
        } else if (name == "glsar" || name == "ou_theta") {
            const ScalarEstimate e = name == "glsar" ? fit_glsar(xc) : theta_from_ou(xc);
            all_ok = all_ok && e.ok();
            estimates[name] = to_json(e);
        } else {
            throw ConfigError("unknown estimator '" + name + "' (var, ac1, glsar, acs, psd, ou_theta)");
        }
    }
    Json doc = Json::object();
    doc["config"] = Json{{"input", a.input},
                         {"column", col},
                         {"n", x.size()},
                         {"dt", x.dt},
                         {"tau_max", a.tau_max},
                         {"psd_block", a.psd_block}};
    doc["estimates"] = std::move(estimates);
    const std::string text = doc.dump(2) + "\n";
    if (a.output.empty()) {
        out << text;
    } else {
        write_file_atomic(a.output, text);
    }
    return all_ok ? EXIT_OK : EXIT_ESTIMATION;
}

struct PlanArgs {
    std::size_t window_len = 700;
    std::size_t windows = 0;
    std::size_t stride = 0;

    WindowPlan plan() const {
        return stride ? WindowPlan::overlapping(window_len, stride, windows)
                      : WindowPlan::disjoint(windows, window_len);
    }
};

std::string traces_csv(const std::vector<const IndicatorTrace*>& traces, const std::vector<std::string>& names) {
    std::string csv = "window_start";
    for (const auto& n : names) csv += "," + n;
    csv += "\n";
    const std::size_t nw = traces.empty() ? 0 : traces[0]->values.size();
    for (std::size_t w = 0; w < nw; ++w) {
        csv += fmt(traces[0]->window_start[w]);
        for (const auto* t : traces) csv += "," + fmt(t->values[w]);
        csv += "\n";
    }
    return csv;
}

struct TraceArgs {
    std::string input;
    std::string column;
    std::vector<std::string> indicators{"var", "ac1", "glsar", "acs", "psd"};
    PlanArgs plan;
    std::string output;
    std::string csv;
};

int cmd_trace(const TraceArgs& a, std::ostream& out, std::ostream&) {
    const CsvSeries csv = read_series_csv(a.input);
    TimeSeries x;
    const std::string col = pick_column(csv, a.column, x);
    const WindowPlan plan = a.plan.plan();
    const auto inds = parse_indicators(a.indicators);
    try {
        plan.count_for(x.size());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const auto traces = indicator_traces(x, plan, inds);

    Json doc = Json::object();
    doc["config"] = Json{{"input", a.input}, {"column", col}, {"n", x.size()}, {"plan", to_json(plan)},
                         {"estimators", to_json(EstimatorOptions{})}};
    Json tj = Json::array();
    bool any_valid = false;
    for (const auto& t : traces) {
        tj.push_back(to_json(t));
        any_valid = any_valid || t.n_valid() > 0;
    }
    doc["traces"] = std::move(tj);
    const std::string text = doc.dump(2) + "\n";
    if (a.output.empty()) {
        out << text;
    } else {
        write_file_atomic(a.output, text);
    }
    if (!a.csv.empty()) {
        std::vector<const IndicatorTrace*> ptrs;
        for (const auto& t : traces) ptrs.push_back(&t);
        write_file_atomic(a.csv, traces_csv(ptrs, a.indicators));
    }
    return any_valid ? EXIT_OK : EXIT_ESTIMATION;
}

struct AnalyzeArgs {
    std::string input;
    double bandwidth = 200.0;
    PlanArgs plan{500, 0, 0};
    bool full = false;
    std::string out_dir = ".";
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream&) {
    const CsvSeries csv = read_series_csv(a.input);
    AnalyzeOptions opts;
    opts.bandwidth = a.bandwidth;
    opts.window_len = a.plan.window_len;
    opts.n_windows = a.plan.windows;
    if (a.plan.stride) opts.stride = a.plan.stride;
    opts.truncate_at_tipping = !a.full;

    const TimeSeries* p = csv.second ? &*csv.second : nullptr;
    AnalyzeReport rep;
    try {
        rep = analyze(csv.first, p, opts);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }

    const fs::path dir(a.out_dir);
    ensure_dir(dir);

    const auto& vd = rep.v_detrend;
    const std::string vname = csv.columns[0];
    std::string det = "t," + vname + "," + vname + "_trend," + vname + "_residual";
    if (rep.p_detrend) det += ",p,p_trend,p_residual";
    det += "\n";
    for (std::size_t k = 0; k < csv.first.size(); ++k) {
        det += fmt(csv.first.time(k)) + "," + fmt(csv.first.values[k]) + "," + fmt(vd.trend.values[k]) + "," +
               fmt(vd.residual.values[k]);
        if (rep.p_detrend) {
            det += "," + fmt(p->values[k]) + "," + fmt(rep.p_detrend->trend.values[k]) + "," +
                   fmt(rep.p_detrend->residual.values[k]);
        }
        det += "\n";
    }
    write_file_atomic(dir / "detrended.csv", det);

    std::vector<const IndicatorTrace*> ptrs;
    std::vector<std::string> names;
    for (const auto& t : rep.v_traces) {
        ptrs.push_back(&t);
        names.emplace_back(to_string(t.indicator));
    }
    if (rep.p_theta) {
        ptrs.push_back(&*rep.p_theta);
        names.emplace_back("p_ou_theta");
    }
    write_file_atomic(dir / "windows.csv", traces_csv(ptrs, names));

    Json doc = Json::object();
    doc["config"] = Json{{"input", a.input},
                         {"n", csv.first.size()},
                         {"dt", csv.first.dt},
                         {"paired", p != nullptr},
                         {"bandwidth", a.bandwidth},
                         {"truncate_at_tipping", !a.full},
                         {"plan", to_json(rep.plan)},
                         {"estimators", to_json(opts.estimators)}};
    doc["tipping"] = to_json(rep.tipping);
    doc["tipping"]["time"] = csv.first.time(rep.tipping.index);
    doc["analyzed_length"] = rep.analyzed_length;
    Json tj = Json::array();
    for (const auto& t : rep.v_traces) tj.push_back(to_json(t));
    doc["traces"] = std::move(tj);
    if (rep.p_theta) {
        doc["p_theta"] = to_json(*rep.p_theta);
        std::string dual = "window_start,theta_from_v,theta_from_p,ratio\n";
        Json dj = Json::array();
        for (const auto& r : rep.dual_theta) {
            dual += fmt(r.window_start) + "," + fmt(r.theta_from_v) + "," + fmt(r.theta_from_p) + "," +
                    fmt(r.ratio) + "\n";
            Json row = Json::object();
            row["window_start"] = r.window_start;
            row["theta_from_v"] = std::isfinite(r.theta_from_v) ? Json(r.theta_from_v) : Json(nullptr);
            row["theta_from_p"] = std::isfinite(r.theta_from_p) ? Json(r.theta_from_p) : Json(nullptr);
            row["ratio"] = std::isfinite(r.ratio) ? Json(r.ratio) : Json(nullptr);
            dj.push_back(std::move(row));
        }
        doc["dual_theta"] = std::move(dj);
        write_file_atomic(dir / "dual_theta.csv", dual);
    }
    write_file_atomic(dir / "report.json", doc.dump(2) + "\n");

    out << "tipping index " << rep.tipping.index << (rep.tipping.pronounced ? "" : " (no pronounced curvature)")
        << ", analyzed " << rep.analyzed_length << " samples in " << rep.v_traces.front().values.size()
        << " windows\n";
    out << std::left << std::setw(12) << "indicator" << std::setw(10) << "tau" << "valid\n";
    auto row = [&](const std::string& name, const IndicatorTrace& t) {
        out << std::left << std::setw(12) << name << std::setw(10) << std::setprecision(4)
            << (std::isfinite(t.kendall_tau) ? fmt(std::round(t.kendall_tau * 1e4) / 1e4) : "nan") << t.n_valid()
            << "\n";
    };
    for (std::size_t k = 0; k < rep.v_traces.size(); ++k) row(names[k], rep.v_traces[k]);
    if (rep.p_theta) row("p_ou_theta", *rep.p_theta);
    return EXIT_OK;
}

struct BenchmarkArgs {
    std::string config;
    std::size_t instances = 500;
    std::uint64_t seed = 0;
    double fraction = 1.0;
    double T = 14000.0;
    std::size_t windows = 20;
    std::size_t window_len = 700;
    unsigned threads = 0;
    std::vector<std::string> indicators;
    std::string out_dir = ".";
    // grid only
    std::vector<double> lengths{3500, 7000, 14000, 28000};
    std::vector<double> fractions{0.2, 0.4, 0.6, 0.8, 1.0};
};

BenchmarkConfig make_benchmark_config(const BenchmarkArgs& a, const CLI::App& sub) {
    BenchmarkConfig cfg;
    if (!a.config.empty()) cfg = benchmark_config_from_json(load_json(a.config));
    if (a.config.empty() || sub.count("--instances")) cfg.n_instances = a.instances;
    if (a.config.empty() || sub.count("--fraction")) cfg.fraction = a.fraction;
    if (a.config.empty() || sub.count("--T")) cfg.T = a.T;
    if (a.config.empty() || sub.count("--windows")) cfg.n_windows = a.windows;
    if (a.config.empty() || sub.count("--window-len")) cfg.window_len = a.window_len;
    if (!a.indicators.empty()) cfg.indicators = parse_indicators(a.indicators);
    cfg.threads = a.threads;
    return cfg;
}

std::string roc_csv(const RocResult& r) {
    std::string csv = "threshold,fpr,tpr\n";
    for (const auto& p : r.points) {
        csv += fmt(p.threshold) + "," + fmt(p.fpr) + "," + fmt(p.tpr) + "\n";
    }
    return csv;
}

int cmd_benchmark(const BenchmarkArgs& a, const CLI::App& sub, std::ostream& out, std::ostream&) {
    BenchmarkConfig cfg = make_benchmark_config(a, sub);
    cfg.validate();
    const fs::path dir(a.out_dir);
    ensure_dir(dir);
    const BenchmarkResult res = run_benchmark(cfg, a.seed);

    Json doc = Json::object();
    doc["config"] = to_json(cfg);
    doc["master_seed"] = a.seed;
    Json inds = Json::object();
    std::string taus = "instance,indicator,tau_true,tau_null\n";
    out << "windows used: " << cfg.windows_used() << " of " << cfg.n_windows << " (" << cfg.window_len
        << " samples each), " << cfg.n_instances << " instances\n";
    out << std::left << std::setw(12) << "indicator" << std::setw(10) << "auc" << std::setw(10) << "fpr@0"
        << std::setw(10) << "tpr@0" << "n\n";
    for (const auto& it : res.taus) {
        const std::string name(to_string(it.indicator));
        const RocResult roc = roc_curve(it.true_taus, it.null_taus);
        write_file_atomic(dir / ("roc_" + name + ".csv"), roc_csv(roc));
        inds[name] = to_json(roc);
        for (std::size_t i = 0; i < it.true_taus.size(); ++i) {
            taus += std::to_string(i) + "," + name + "," + fmt(it.true_taus[i]) + "," + fmt(it.null_taus[i]) + "\n";
        }
        auto r3 = [](double v) { return fmt(std::round(v * 1e3) / 1e3); };
        out << std::left << std::setw(12) << name << std::setw(10) << r3(roc.auc) << std::setw(10)
            << r3(roc.zero_threshold.fpr) << std::setw(10) << r3(roc.zero_threshold.tpr)
            << std::min(roc.n_true, roc.n_null) << "\n";
    }
    doc["indicators"] = std::move(inds);
    write_file_atomic(dir / "taus.csv", taus);
    write_file_atomic(dir / "auc_summary.json", doc.dump(2) + "\n");
    return EXIT_OK;
}

int cmd_grid(const BenchmarkArgs& a, const CLI::App& sub, std::ostream& out, std::ostream&) {
    BenchmarkConfig cfg = make_benchmark_config(a, sub);
    if (a.indicators.empty()) cfg.indicators = {Indicator::Variance, Indicator::Ac1};
    if (a.lengths.empty() || a.fractions.empty()) {
        throw ConfigError("grid needs at least one length and one fraction");
    }
    const fs::path dir(a.out_dir);
    ensure_dir(dir);
    const GridResult g = grid_benchmark(a.lengths, a.fractions, cfg, a.seed);

    std::string csv = "indicator,length,fraction,auc,n_effective\n";
    Json cells = Json::array();
    std::size_t feasible = 0;
    for (const auto& c : g.cells) {
        const std::string name(to_string(c.indicator));
        csv += name + "," + fmt(c.length) + "," + fmt(c.fraction) + "," + (c.feasible ? fmt(c.auc) : "") + "," +
               std::to_string(c.n_effective) + "\n";
        cells.push_back(Json{{"indicator", name},
                             {"length", c.length},
                             {"fraction", c.fraction},
                             {"auc", c.feasible ? Json(c.auc) : Json(nullptr)},
                             {"n_effective", c.n_effective}});
        feasible += c.feasible;
    }
    Json doc = Json::object();
    Json cj = to_json(cfg);
    cj.erase("T");
    cj.erase("window_len");
    cj.erase("fraction");
    cj.erase("windows_used");
    cj["lengths"] = a.lengths;
    cj["fractions"] = a.fractions;
    doc["config"] = std::move(cj);
    doc["master_seed"] = a.seed;
    doc["cells"] = std::move(cells);
    write_file_atomic(dir / "auc_grid.csv", csv);
    write_file_atomic(dir / "auc_grid.json", doc.dump(2) + "\n");

    out << g.cells.size() / cfg.indicators.size() << " cells per indicator, " << feasible << " of "
        << g.cells.size() << " feasible\n";
    for (auto ind : cfg.indicators) {
        out << to_string(ind) << "\n" << std::left << std::setw(10) << "length";
        for (double f : a.fractions) out << std::setw(8) << fmt(f);
        out << "\n";
        for (std::size_t li = 0; li < a.lengths.size(); ++li) {
            out << std::setw(10) << fmt(a.lengths[li]);
            for (std::size_t fi = 0; fi < a.fractions.size(); ++fi) {
                const auto& c = g.at(ind, li, fi);
                out << std::setw(8) << (c.feasible ? fmt(std::round(c.auc * 1e3) / 1e3) : "-");
            }
            out << "\n";
        }
    }
    return EXIT_OK;
}

}  // namespace

int run_cli(int argc, char** argv) { return run_cli(argc, argv, std::cout, std::cerr); }

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Restoring-rate estimation and critical-slowing-down indicator benchmarks", "redcsd"};
    app.require_subcommand(0, 1);
    bool version = false;
    app.add_flag("--version", version, "Print the build identifier");

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Integrate the red-noise model under a parameter schedule");
    s->add_option("--config", sim.config, "Schedule/simulation JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--seed", sim.seed, "Random seed")->required();
    s->add_option("-o,--output", sim.output, "Output CSV")->required();
    s->add_option("--binary", sim.binary, "Also write a binary dump");

    EstimateArgs est;
    auto* e = app.add_subcommand("estimate", "Fit estimators to a whole (centered) series");
    e->add_option("input", est.input, "Input CSV")->required()->check(CLI::ExistingFile);
    e->add_option("--column", est.column, "Value column of a paired input");
    e->add_option("--estimator", est.estimators, "var, ac1, glsar, acs, psd, ou_theta (repeatable)")
        ->capture_default_str();
    e->add_option("--tau-max", est.tau_max, "Largest lag of the ACS fit")->capture_default_str();
    e->add_option("--psd-block", est.psd_block, "Periodogram bins averaged per block")->capture_default_str();
    e->add_option("-o,--output", est.output, "Write JSON here instead of stdout");

    TraceArgs tr;
    auto* t = app.add_subcommand("trace", "Windowed indicator traces with Kendall tau");
    t->add_option("input", tr.input, "Input CSV")->required()->check(CLI::ExistingFile);
    t->add_option("--column", tr.column, "Value column of a paired input");
    t->add_option("--indicator", tr.indicators, "Indicators (repeatable)")->capture_default_str();
    t->add_option("--window-len", tr.plan.window_len, "Samples per window")->capture_default_str();
    t->add_option("--windows", tr.plan.windows, "Number of windows (0: as many as fit)");
    t->add_option("--stride", tr.plan.stride, "Overlapping windows with this stride");
    t->add_option("-o,--output", tr.output, "Write JSON here instead of stdout");
    t->add_option("--csv", tr.csv, "Also write per-window values as CSV");

    AnalyzeArgs an;
    auto* a = app.add_subcommand("analyze", "Detrend, locate the tipping point, and trace the estimators");
    a->add_option("input", an.input, "CSV with header t,value or t,v,p")->required()->check(CLI::ExistingFile);
    a->add_option("--bandwidth", an.bandwidth, "Gaussian filter width in samples")->capture_default_str();
    a->add_option("--window-len", an.plan.window_len, "Samples per window")->capture_default_str();
    a->add_option("--windows", an.plan.windows, "Number of windows (0: as many as fit)");
    a->add_option("--stride", an.plan.stride, "Overlapping windows with this stride");
    a->add_flag("--full", an.full, "Analyze the whole series instead of stopping at the tipping point");
    a->add_option("--out-dir", an.out_dir, "Directory for report files")->capture_default_str();

    BenchmarkArgs bm;
    auto add_bench_opts = [](CLI::App* c, BenchmarkArgs& b) {
        c->add_option("--config", b.config, "Benchmark config JSON")->check(CLI::ExistingFile);
        c->add_option("--instances", b.instances, "Random instances")->capture_default_str();
        c->add_option("--seed", b.seed, "Master seed")->required();
        c->add_option("--windows", b.windows, "Windows covering the full length")->capture_default_str();
        c->add_option("--threads", b.threads, "Worker threads (0: all cores)");
        c->add_option("--indicator", b.indicators, "Indicators (repeatable)");
        c->add_option("--out-dir", b.out_dir, "Output directory")->capture_default_str();
    };
    auto* b = app.add_subcommand("benchmark", "ROC/AUC comparison of indicators on random instances");
    add_bench_opts(b, bm);
    b->add_option("--fraction", bm.fraction, "Share of the trend and of the windows used")->capture_default_str();
    b->add_option("--T", bm.T, "Series length")->capture_default_str();
    b->add_option("--window-len", bm.window_len, "Samples per window")->capture_default_str();

    BenchmarkArgs gr;
    auto* g = app.add_subcommand("grid", "AUC over series lengths and observed fractions");
    add_bench_opts(g, gr);
    g->add_option("--lengths", gr.lengths, "Comma-separated lengths")->delimiter(',')->capture_default_str();
    g->add_option("--fractions", gr.fractions, "Comma-separated fractions")->delimiter(',')->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return EXIT_OK;
    } catch (const CLI::ParseError& pe) {
        // Subcommand help is also reported through CallForHelp above.
        err << "error: " << pe.what() << "\n";
        const CLI::App* failed = &app;
        for (auto* sub : app.get_subcommands()) failed = sub;
        err << failed->help();
        return EXIT_CONFIG;
    }

    if (version) {
        out << "redcsd " << REDCSD_VERSION << "\n";
        return EXIT_OK;
    }
    try {
        if (*s) return cmd_simulate(sim, out, err);
        if (*e) return cmd_estimate(est, out, err);
        if (*t) return cmd_trace(tr, out, err);
        if (*a) return cmd_analyze(an, out, err);
        if (*b) return cmd_benchmark(bm, *b, out, err);
        if (*g) return cmd_grid(gr, *g, out, err);
        err << app.help();
        return EXIT_CONFIG;
    } catch (const IoError& ex) {
        err << "error: " << ex.what() << "\n";
        return EXIT_IO;
    } catch (const ConfigError& ex) {
        err << "error: " << ex.what() << "\n";
        return EXIT_CONFIG;
    } catch (const InputError& ex) {
        err << "error: " << ex.what() << "\n";
        return EXIT_CONFIG;
    } catch (const DomainError& ex) {
        err << "error: " << ex.what() << "\n";
        return EXIT_CONFIG;
    } catch (const EstimationError& ex) {
        err << "error: " << ex.what() << "\n";
        return EXIT_ESTIMATION;
    } catch (const AnalysisError& ex) {
        err << "error: " << ex.what() << "\n";
        return EXIT_ESTIMATION;
    }
}

}  // namespace redcsd
