#pragma once

// Fits up to three free model parameters to anchor points by Nelder-Mead in
// log space, minimizing the weighted squared log residuals.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qkdwdm/harness/evaluate.hpp"
#include "qkdwdm/harness/scenario.hpp"

namespace qkdwdm {

enum class FreeParam { raman_scale, e_det, dark_rate };
enum class Metric { secure_bps, qber_z, qber_x };

inline std::string_view to_string(FreeParam p) {
  switch (p) {
    case FreeParam::raman_scale: return "raman_scale";
    case FreeParam::e_det: return "e_det";
    case FreeParam::dark_rate: return "dark_rate_hz";
  }
  return "?";
}

inline FreeParam free_param_from_string(std::string_view s) {
  if (s == "raman_scale") return FreeParam::raman_scale;
  if (s == "e_det") return FreeParam::e_det;
  if (s == "dark_rate_hz") return FreeParam::dark_rate;
  throw std::invalid_argument("unknown free parameter '" + std::string(s) + "'");
}

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::secure_bps: return "secure_bps";
    case Metric::qber_z: return "qber_z";
    case Metric::qber_x: return "qber_x";
  }
  return "?";
}

inline Metric metric_from_string(std::string_view s) {
  if (s == "secure_bps") return Metric::secure_bps;
  if (s == "qber_z") return Metric::qber_z;
  if (s == "qber_x") return Metric::qber_x;
  throw std::invalid_argument("unknown metric '" + std::string(s) + "'");
}

/// Hard range for each parameter. The fit works on the log of the value and
/// clamps into this range, so an unidentified parameter flattens out instead
/// of running off to zero.
struct ParamRange {
  double lo;
  double hi;
};

inline ParamRange param_range(FreeParam p) {
  switch (p) {
    case FreeParam::raman_scale: return {1e-15, 1e-5};
    case FreeParam::e_det: return {1e-6, 0.5};
    case FreeParam::dark_rate: return {1e-3, 1e7};
  }
  return {0.0, 0.0};
}

using ParamSet = std::map<FreeParam, double>;

inline void apply_params(Scenario& s, const ParamSet& params) {
  for (const auto& [k, v] : params) {
    switch (k) {
      case FreeParam::raman_scale: s.raman.set_scale(v); break;
      case FreeParam::e_det: s.protocol.e_det = v; break;
      case FreeParam::dark_rate: s.detector.dark_rate_hz = v; break;
    }
  }
}

struct Anchor {
  std::string label;
  Scenario scenario;
  /// Axis value to evaluate at; empty for a scenario without a sweep axis.
  std::optional<double> at;
  Metric metric = Metric::secure_bps;
  double target{};
  double weight = 1.0;
};

struct CalibrationSpec {
  std::vector<FreeParam> free;
  ParamSet initial;
  std::vector<Anchor> anchors;
  int restarts = 5;
  std::uint64_t seed = 1;
  int max_iterations = 2000;
  double size_tolerance = 1e-9;
  int stall_iterations = 300;
};

struct AnchorResidual {
  std::string label;
  Metric metric{};
  double target{};
  double model{};
  /// model / target - 1.
  double relative{};
};

struct CalibrationResult {
  ParamSet params;
  std::vector<AnchorResidual> residuals;
  double objective{};
  bool converged{};
  int iterations{};
  /// Every anchor evaluates to a feasible point with the fitted parameters.
  bool anchors_feasible{};
  /// Fitted parameters sitting at their range limit; the anchors do not
  /// identify them.
  std::vector<FreeParam> at_limit;
};

/// Model value of one anchor under `params`.
inline double anchor_value(const Anchor& a, const ParamSet& params) {
  Scenario s = a.scenario;
  apply_params(s, params);
  const double x = a.at.value_or(s.values.empty() ? 0.0 : s.values.front());
  const SimulationResult r = evaluate_point(s, x);
  switch (a.metric) {
    case Metric::secure_bps: return r.secure_bps();
    case Metric::qber_z: return r.qkd.qber_z;
    case Metric::qber_x: return r.qkd.qber_x;
  }
  return 0.0;
}

/// Values at or below this floor are treated as the floor in the log
/// residual: 1 b/s for rates and 1e-6 for error rates.
inline double metric_floor(Metric m) { return m == Metric::secure_bps ? 1.0 : 1e-6; }

inline double calibration_objective(const CalibrationSpec& spec, const ParamSet& params) {
  double sum = 0.0;
  for (const auto& a : spec.anchors) {
    const double v = std::max(anchor_value(a, params), metric_floor(a.metric));
    const double d = std::log(v) - std::log(a.target);
    sum += a.weight * d * d;
  }
  return sum;
}

namespace detail {

struct FitContext {
  const CalibrationSpec* spec;
  ParamSet base;
};

inline ParamSet params_from_log(const FitContext& ctx, const gsl_vector* x) {
  ParamSet p = ctx.base;
  for (std::size_t i = 0; i < ctx.spec->free.size(); ++i) {
    const FreeParam k = ctx.spec->free[i];
    const auto r = param_range(k);
    p[k] = std::clamp(std::exp(gsl_vector_get(x, i)), r.lo, r.hi);
  }
  return p;
}

inline double gsl_objective(const gsl_vector* x, void* data) {
  const auto& ctx = *static_cast<const FitContext*>(data);
  try {
    return calibration_objective(*ctx.spec, params_from_log(ctx, x));
  } catch (const std::exception&) {
    return std::numeric_limits<double>::max();
  }
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

struct RunResult {
  ParamSet params;
  double objective{};
  bool converged{};
  int iterations{};
};

inline RunResult nelder_mead(const CalibrationSpec& spec, const ParamSet& start) {
  const std::size_t n = spec.free.size();
  FitContext ctx{&spec, start};
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(n));
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, std::log(start.at(spec.free[i])));
    gsl_vector_set(step.get(), i, 0.5);
  }
  gsl_multimin_function f{&gsl_objective, n, &ctx};
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  gsl_multimin_fminimizer_set(m.get(), &f, x.get(), step.get());

  // A parameter pushed against its range limit leaves a flat direction in
  // which the simplex never shrinks. Treat a best value that has stopped
  // moving for `stall_iterations` as converged too.
  RunResult out;
  int status = GSL_CONTINUE;
  double best = gsl_multimin_fminimizer_minimum(m.get());
  int since_improvement = 0;
  while (status == GSL_CONTINUE && out.iterations < spec.max_iterations) {
    ++out.iterations;
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), spec.size_tolerance);
    const double fmin = gsl_multimin_fminimizer_minimum(m.get());
    if (fmin < best - 1e-13 * (1.0 + std::abs(best))) {
      best = fmin;
      since_improvement = 0;
    } else if (++since_improvement >= spec.stall_iterations) {
      status = GSL_SUCCESS;
    }
  }
  out.converged = status == GSL_SUCCESS;
  out.params = params_from_log(ctx, gsl_multimin_fminimizer_x(m.get()));
  out.objective = gsl_multimin_fminimizer_minimum(m.get());
  return out;
}

}  // namespace detail

/// Best of `restarts` Nelder-Mead runs. The first starts at the declared
/// initial values; the rest start at points drawn log-uniformly within a
/// decade of them from a generator seeded by `spec.seed`.
inline CalibrationResult calibrate(const CalibrationSpec& spec) {
  if (spec.free.empty() || spec.free.size() > 3) throw std::invalid_argument("calibration needs 1 to 3 free parameters");
  if (spec.anchors.size() < spec.free.size()) {
    throw std::invalid_argument("calibration needs at least as many anchors as free parameters");
  }
  if (spec.restarts < 1) throw std::invalid_argument("calibration needs at least one start");
  for (std::size_t i = 0; i < spec.free.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (spec.free[i] == spec.free[k]) throw std::invalid_argument("free parameter listed twice");
    }
    const auto it = spec.initial.find(spec.free[i]);
    if (it == spec.initial.end()) {
      throw std::invalid_argument("missing initial value for " + std::string(to_string(spec.free[i])));
    }
    const auto r = param_range(spec.free[i]);
    if (!(it->second >= r.lo && it->second <= r.hi)) {
      throw std::invalid_argument("initial value for " + std::string(to_string(spec.free[i])) + " out of range");
    }
  }
  for (const auto& a : spec.anchors) {
    if (!(a.target > 0.0)) throw std::invalid_argument("anchor '" + a.label + "' needs a positive target");
    if (!(a.weight > 0.0)) throw std::invalid_argument("anchor '" + a.label + "' needs a positive weight");
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> jitter(-std::log(10.0), std::log(10.0));
  detail::RunResult best;
  best.objective = std::numeric_limits<double>::infinity();
  int total_iterations = 0;
  for (int k = 0; k < spec.restarts; ++k) {
    ParamSet start = spec.initial;
    if (k > 0) {
      for (FreeParam p : spec.free) {
        const auto r = param_range(p);
        start[p] = std::clamp(spec.initial.at(p) * std::exp(jitter(rng)), r.lo, r.hi);
      }
    }
    const auto run = detail::nelder_mead(spec, start);
    total_iterations += run.iterations;
    if (run.objective < best.objective) best = run;
  }

  CalibrationResult out;
  out.params = best.params;
  out.objective = best.objective;
  out.converged = best.converged;
  out.iterations = total_iterations;
  out.anchors_feasible = true;
  for (const auto& a : spec.anchors) {
    const double v = anchor_value(a, out.params);
    out.residuals.push_back({a.label, a.metric, a.target, v, v / a.target - 1.0});
    if (a.metric == Metric::secure_bps && !(v > 0.0)) out.anchors_feasible = false;
  }
  for (FreeParam p : spec.free) {
    const auto r = param_range(p);
    const double v = out.params.at(p);
    if (v <= r.lo * (1.0 + 1e-9) || v >= r.hi * (1.0 - 1e-9)) out.at_limit.push_back(p);
  }
  return out;
}

/// Reads a calibration spec (`.calib`, JSON). Anchor scenario paths are
/// relative to the spec file.
inline CalibrationSpec load_calibration_spec(const std::filesystem::path& path) {
  using nlohmann::json;
  std::ifstream in(path);
  if (!in) throw ValidationError({path.string() + ": cannot open calibration file"});
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ValidationError({path.filename().string() + ": syntax: " + e.what()});
  }
  detail::Reader r;
  CalibrationSpec spec;
  if (!r.object(j, "")) throw ValidationError(r.errors);
  r.keys(j, "", {"schema_version", "free", "initial", "anchors", "restarts", "seed", "max_iterations"});
  int version = 0;
  r.integer(j, "", "schema_version", version);
  if (version != scenario_schema_version) r.error("schema_version", "missing or unsupported");
  r.integer(j, "", "restarts", spec.restarts);
  r.integer(j, "", "seed", spec.seed);
  r.integer(j, "", "max_iterations", spec.max_iterations);

  if (!j.contains("free") || !j.at("free").is_array()) {
    r.error("free", "expected a list of parameter names");
  } else {
    for (const auto& f : j.at("free")) {
      r.guard("free", [&] { spec.free.push_back(free_param_from_string(f.get<std::string>())); });
    }
  }
  if (j.contains("initial") && r.object(j.at("initial"), "initial")) {
    for (const auto& [k, v] : j.at("initial").items()) {
      r.guard("initial." + k, [&] {
        if (!v.is_number()) throw std::invalid_argument("expected a number");
        spec.initial[free_param_from_string(k)] = v.get<double>();
      });
    }
  }

  std::map<std::string, Scenario> cache;
  const auto base = path.parent_path();
  if (!j.contains("anchors") || !j.at("anchors").is_array()) {
    r.error("anchors", "expected a list of anchors");
  } else {
    const auto& arr = j.at("anchors");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto& e = arr[i];
      const std::string p = "anchors[" + std::to_string(i) + "]";
      if (!r.object(e, p)) continue;
      r.keys(e, p, {"label", "scenario", "at", "metric", "target", "weight"});
      Anchor a;
      a.label = r.string(e, p, "label").value_or(p);
      a.target = r.required_number(e, p, "target");
      r.number(e, p, "weight", a.weight);
      if (e.contains("at")) {
        double at = 0.0;
        r.number(e, p, "at", at);
        a.at = at;
      }
      if (auto m = r.string(e, p, "metric")) {
        r.guard(p + ".metric", [&] { a.metric = metric_from_string(*m); });
      }
      auto file = r.string(e, p, "scenario");
      if (!file) {
        r.error(p + ".scenario", "missing required field");
        continue;
      }
      try {
        auto it = cache.find(*file);
        if (it == cache.end()) it = cache.emplace(*file, load_scenario(base / *file)).first;
        a.scenario = it->second;
      } catch (const ValidationError& ve) {
        for (const auto& msg : ve.errors()) r.error(p + ".scenario", msg);
        continue;
      }
      spec.anchors.push_back(std::move(a));
    }
  }
  if (!r.errors.empty()) {
    std::vector<std::string> errs;
    for (const auto& m : r.errors) errs.push_back(path.filename().string() + ": " + m);
    throw ValidationError(std::move(errs));
  }
  return spec;
}

inline nlohmann::ordered_json calibration_to_json(const CalibrationResult& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = scenario_schema_version;
  auto& p = j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) p[std::string(to_string(k))] = v;
  j["objective"] = r.objective;
  j["converged"] = r.converged;
  j["anchors_feasible"] = r.anchors_feasible;
  j["iterations"] = r.iterations;
  auto& lim = j["at_limit"] = nlohmann::ordered_json::array();
  for (FreeParam fp : r.at_limit) lim.push_back(std::string(to_string(fp)));
  auto& res = j["residuals"] = nlohmann::ordered_json::array();
  for (const auto& a : r.residuals) {
    res.push_back({{"label", a.label},
                   {"metric", std::string(to_string(a.metric))},
                   {"target", a.target},
                   {"model", a.model},
                   {"relative", a.relative}});
  }
  return j;
}

/// Reads the `params` block of a saved calibration result.
inline ParamSet load_calibration_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError({path.string() + ": cannot open calibration result"});
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError({path.filename().string() + ": syntax: " + e.what()});
  }
  if (!j.contains("params") || !j.at("params").is_object()) {
    throw ValidationError({path.filename().string() + ": params: missing block"});
  }
  ParamSet out;
  std::vector<std::string> errs;
  for (const auto& [k, v] : j.at("params").items()) {
    try {
      if (!v.is_number()) throw std::invalid_argument("expected a number");
      out[free_param_from_string(k)] = v.get<double>();
    } catch (const std::exception& e) {
      errs.push_back(path.filename().string() + ": params." + k + ": " + e.what());
    }
  }
  if (!errs.empty()) throw ValidationError(std::move(errs));
  return out;
}

}  // namespace qkdwdm
