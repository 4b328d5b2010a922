#pragma once

#include "json.hpp"

#include "redcsd/analysis.hpp"
#include "redcsd/benchmark.hpp"
#include "redcsd/estimators.hpp"
#include "redcsd/model.hpp"
#include "redcsd/simulate.hpp"

namespace redcsd {

using Json = nlohmann::ordered_json;

// Readers throw ConfigError on unknown keys, wrong types, or invalid values.
// Missing keys keep their defaults.

Json to_json(const ParameterSchedule& s);
ParameterSchedule schedule_from_json(const Json& j);

/// {"kind":"red","lambda","theta","kappa"} or {"kind":"white","lambda","sigma"}
Json to_json(const StabilityParams& p);
StabilityParams params_from_json(const Json& j);

/// Schedule keys plus integrator_step, output_step, duration, scheme, x0, u0, burn_in, seed.
Json to_json(const SimConfig& c);
SimConfig sim_config_from_json(const Json& j);

Json to_json(const FitResult& r);
Json to_json(const ScalarEstimate& e);

Json to_json(const EstimatorOptions& o);
Json to_json(const WindowPlan& p);
Json to_json(const IndicatorTrace& t);
Json to_json(const TippingPoint& t);

Json to_json(const BenchmarkConfig& c);
BenchmarkConfig benchmark_config_from_json(const Json& j);
Json to_json(const RocResult& r, bool with_points = false);

}  // namespace redcsd
