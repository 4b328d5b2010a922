#include "redcsd/serialization.hpp"

#include <cmath>
#include <initializer_list>
#include <string>

#include "redcsd/error.hpp"

namespace redcsd {

namespace {

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view what) {
    if (!j.is_object()) {
        throw ConfigError(std::string(what) + " must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) {
            throw ConfigError("unknown key '" + key + "' in " + std::string(what));
        }
    }
}

template <class T>
void read(const Json& j, const char* key, T& out) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("wrong type for '") + key + "'");
    }
}

double read_number(const Json& j, const char* key, double fallback) {
    read(j, key, fallback);
    return fallback;
}

// NaN encodes as null.
Json num(double v) {
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

const std::initializer_list<std::string_view> schedule_keys = {
    "lambda0", "theta0", "thetaT", "kappa0", "kappaT", "T", "trend_fraction", "lambda_path"};

void read_schedule(const Json& j, ParameterSchedule& s) {
    read(j, "lambda0", s.lambda0);
    read(j, "theta0", s.theta0);
    read(j, "thetaT", s.thetaT);
    read(j, "kappa0", s.kappa0);
    read(j, "kappaT", s.kappaT);
    read(j, "T", s.T);
    read(j, "trend_fraction", s.trend_fraction);
    std::string path(to_string(s.lambda_path));
    read(j, "lambda_path", path);
    s.lambda_path = lambda_path_from_string(path);
}

void write_schedule(Json& j, const ParameterSchedule& s) {
    j["lambda0"] = s.lambda0;
    j["theta0"] = s.theta0;
    j["thetaT"] = s.thetaT;
    j["kappa0"] = s.kappa0;
    j["kappaT"] = s.kappaT;
    j["T"] = s.T;
    j["trend_fraction"] = s.trend_fraction;
    j["lambda_path"] = std::string(to_string(s.lambda_path));
}

}  // namespace

Json to_json(const ParameterSchedule& s) {
    Json j = Json::object();
    write_schedule(j, s);
    return j;
}

ParameterSchedule schedule_from_json(const Json& j) {
    check_keys(j, schedule_keys, "schedule");
    ParameterSchedule s;
    read_schedule(j, s);
    s.validate();
    return s;
}

Json to_json(const StabilityParams& p) {
    Json j = Json::object();
    if (p.is_red()) {
        j["kind"] = "red";
        j["lambda"] = p.lambda();
        j["theta"] = p.theta();
        j["kappa"] = p.kappa();
    } else {
        j["kind"] = "white";
        j["lambda"] = p.lambda();
        j["sigma"] = p.sigma();
    }
    return j;
}

StabilityParams params_from_json(const Json& j) {
    check_keys(j, {"kind", "lambda", "theta", "kappa", "sigma"}, "parameters");
    std::string kind = j.contains("sigma") ? "white" : "red";
    read(j, "kind", kind);
    const double nan = std::nan("");
    try {
        if (kind == "red") {
            return StabilityParams::red(read_number(j, "lambda", nan), read_number(j, "theta", nan),
                                        read_number(j, "kappa", nan));
        }
        if (kind == "white") {
            return StabilityParams::white(read_number(j, "lambda", nan), read_number(j, "sigma", nan));
        }
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("parameter kind must be 'red' or 'white'");
}

Json to_json(const SimConfig& c) {
    Json j = Json::object();
    write_schedule(j, c.schedule);
    j["integrator_step"] = c.integrator_step;
    j["output_step"] = c.output_step;
    j["duration"] = c.effective_duration();
    j["scheme"] = c.scheme == Scheme::Euler ? "euler" : "exact";
    j["x0"] = c.x0;
    j["u0"] = c.u0;
    j["burn_in"] = c.burn_in;
    j["seed"] = c.seed;
    return j;
}

SimConfig sim_config_from_json(const Json& j) {
    std::initializer_list<std::string_view> keys = {
        "lambda0", "theta0", "thetaT", "kappa0", "kappaT", "T", "trend_fraction", "lambda_path",
        "integrator_step", "output_step", "duration", "scheme", "x0", "u0", "burn_in", "seed"};
    check_keys(j, keys, "simulation config");
    SimConfig c;
    read_schedule(j, c.schedule);
    read(j, "integrator_step", c.integrator_step);
    read(j, "output_step", c.output_step);
    if (j.contains("duration") && !j["duration"].is_null()) {
        double d = 0.0;
        read(j, "duration", d);
        c.duration = d;
    }
    std::string scheme = "euler";
    read(j, "scheme", scheme);
    if (scheme == "euler") {
        c.scheme = Scheme::Euler;
    } else if (scheme == "exact") {
        c.scheme = Scheme::Exact;
    } else {
        throw ConfigError("scheme must be 'euler' or 'exact'");
    }
    read(j, "x0", c.x0);
    read(j, "u0", c.u0);
    read(j, "burn_in", c.burn_in);
    read(j, "seed", c.seed);
    c.validate();
    return c;
}

Json to_json(const FitResult& r) {
    Json j = Json::object();
    j["kind"] = std::string(to_string(r.kind));
    j["lambda"] = num(r.lambda);
    j["theta"] = num(r.theta);
    j["kappa"] = num(r.kappa);
    j["objective"] = num(r.objective);
    j["iters"] = r.iterations;
    if (std::isfinite(r.sigma)) j["sigma"] = r.sigma;
    if (!r.reason.empty()) j["reason"] = r.reason;
    return j;
}

Json to_json(const ScalarEstimate& e) {
    Json j = Json::object();
    j["value"] = num(e.value);
    j["iters"] = e.iterations;
    if (!e.ok()) j["reason"] = e.reason;
    return j;
}

Json to_json(const EstimatorOptions& o) {
    return Json{{"tau_max", o.tau_max}, {"psd_block", o.psd_block}, {"center_windows", o.center_windows}};
}

Json to_json(const WindowPlan& p) {
    Json j = Json::object();
    j["mode"] = p.mode == WindowPlan::Mode::Disjoint ? "disjoint" : "overlapping";
    j["n_windows"] = p.n_windows;
    j["window_len"] = p.window_len;
    if (p.mode == WindowPlan::Mode::Overlapping) j["stride"] = p.stride;
    return j;
}

Json to_json(const IndicatorTrace& t) {
    Json j = Json::object();
    j["indicator"] = std::string(to_string(t.indicator));
    j["sign"] = t.sign;
    j["kendall_tau"] = num(t.kendall_tau);
    j["n_valid"] = t.n_valid();
    Json values = Json::array();
    for (double v : t.values) values.push_back(num(v));
    j["window_start"] = t.window_start;
    j["values"] = std::move(values);
    return j;
}

Json to_json(const TippingPoint& t) {
    return Json{{"index", t.index}, {"curvature", t.curvature}, {"pronounced", t.pronounced}};
}

Json to_json(const BenchmarkConfig& c) {
    Json j = Json::object();
    j["n_instances"] = c.n_instances;
    j["T"] = c.T;
    j["n_windows"] = c.n_windows;
    j["window_len"] = c.window_len;
    j["fraction"] = c.fraction;
    j["windows_used"] = c.windows_used();
    j["integrator_step"] = c.integrator_step;
    Json inds = Json::array();
    for (auto ind : c.indicators) inds.push_back(std::string(to_string(ind)));
    j["indicators"] = std::move(inds);
    j["estimators"] = to_json(c.estimators);
    return j;
}

BenchmarkConfig benchmark_config_from_json(const Json& j) {
    check_keys(j, {"n_instances", "T", "n_windows", "window_len", "fraction", "windows_used",
                   "integrator_step", "indicators", "estimators", "threads"},
               "benchmark config");
    BenchmarkConfig c;
    read(j, "n_instances", c.n_instances);
    read(j, "T", c.T);
    read(j, "n_windows", c.n_windows);
    read(j, "window_len", c.window_len);
    read(j, "fraction", c.fraction);
    read(j, "integrator_step", c.integrator_step);
    read(j, "threads", c.threads);
    if (j.contains("indicators")) {
        std::vector<std::string> names;
        read(j, "indicators", names);
        c.indicators.clear();
        for (const auto& n : names) {
            try {
                c.indicators.push_back(indicator_from_string(n));
            } catch (const std::exception& e) {
                throw ConfigError(e.what());
            }
        }
    }
    if (j.contains("estimators")) {
        const auto& e = j["estimators"];
        check_keys(e, {"tau_max", "psd_block", "center_windows"}, "estimators");
        read(e, "tau_max", c.estimators.tau_max);
        read(e, "psd_block", c.estimators.psd_block);
        read(e, "center_windows", c.estimators.center_windows);
    }
    c.validate();
    return c;
}

Json to_json(const RocResult& r, bool with_points) {
    Json j = Json::object();
    j["auc"] = r.auc;
    j["n_true"] = r.n_true;
    j["n_null"] = r.n_null;
    j["zero_threshold"] = Json{{"fpr", r.zero_threshold.fpr}, {"tpr", r.zero_threshold.tpr}};
    if (with_points) {
        Json pts = Json::array();
        for (const auto& p : r.points) {
            pts.push_back(Json{{"threshold", num(p.threshold)}, {"fpr", p.fpr}, {"tpr", p.tpr}});
        }
        j["points"] = std::move(pts);
    }
    return j;
}

}  // namespace redcsd
