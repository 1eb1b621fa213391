#pragma once

// Scenario files: JSON (comments allowed) with strict key checking. Every
// problem found is collected before failing, so one run reports them all.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qkdwdm/channel_plan.hpp"
#include "qkdwdm/classical10g.hpp"
#include "qkdwdm/detection.hpp"
#include "qkdwdm/filterchain.hpp"
#include "qkdwdm/keyrate.hpp"
#include "qkdwdm/linkmodel.hpp"
#include "qkdwdm/planner.hpp"
#include "qkdwdm/raman.hpp"

namespace qkdwdm {

inline constexpr int scenario_schema_version = 1;

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

  [[nodiscard]] const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errs) {
    std::string s;
    for (const auto& e : errs) s += (s.empty() ? "" : "\n") + e;
    return s;
  }
  std::vector<std::string> errors_;
};

enum class SweepAxis { none, distance, bandwidth, combined_power };
enum class LossConvention { end_to_end, fiber_only };
enum class FilterOption { measured, tbp_ideal };

inline std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::none: return "none";
    case SweepAxis::distance: return "distance";
    case SweepAxis::bandwidth: return "bandwidth";
    case SweepAxis::combined_power: return "combined_power";
  }
  return "?";
}

inline std::string_view to_string(FilterOption f) { return f == FilterOption::measured ? "measured" : "tbp_ideal"; }

inline std::string_view to_string(LossConvention c) {
  return c == LossConvention::end_to_end ? "end_to_end" : "fiber_only";
}

struct Scenario {
  int schema_version = scenario_schema_version;
  std::string name;
  FiberSpec fiber;
  MuxModel mux;
  IsolationModel isolation;
  ChannelPlan plan;
  std::vector<SpectralFilter> filters;
  std::vector<std::string> filter_labels;
  DetectorSpec detector;
  ProtocolParams protocol;
  TransceiverSpec transceiver;
  LaunchPolicy policy;
  RamanProfile raman;
  SweepAxis axis = SweepAxis::none;
  std::vector<double> values;
  LossConvention loss_convention = LossConvention::end_to_end;
  FilterOption filter_option = FilterOption::measured;
  /// Draw Poisson counts instead of using expected values.
  bool sampling = false;
  std::uint64_t seed = 1;
  int bandwidth_grid_max = 32;
  int distance_min_km = 1;
  int distance_max_km = 300;
  /// Human-readable notes on every value that fell back to a default.
  std::vector<std::string> defaulted;

  [[nodiscard]] FilterChain chain() const {
    FilterChain c{filters, detector.gate};
    return filter_option == FilterOption::tbp_ideal ? tbp_ideal(c) : c;
  }
  [[nodiscard]] const ItuChannel& quantum() const { return find_quantum(plan)->channel; }
};

namespace detail {

using nlohmann::json;

/// Walks a JSON tree, recording errors with a dotted path.
class Reader {
 public:
  std::vector<std::string> errors;
  std::vector<std::string> defaulted;

  void error(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    error(path, "expected an object");
    return false;
  }

  void keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) return;
    for (const auto& [k, v] : j.items()) {
      bool ok = false;
      for (auto a : allowed) ok = ok || k == a;
      if (!ok) error(join(path, k), "unknown key");
    }
  }

  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }

  void number(const json& j, const std::string& path, std::string_view key, double& out) {
    const auto p = join(path, key);
    if (!j.contains(key)) {
      defaulted.push_back(p + " = " + fmt(out) + " (default)");
      return;
    }
    const auto& v = j.at(std::string(key));
    if (!v.is_number()) {
      error(p, "expected a number");
      return;
    }
    out = v.get<double>();
    if (!std::isfinite(out)) error(p, "must be finite");
  }

  double required_number(const json& j, const std::string& path, std::string_view key) {
    const auto p = join(path, key);
    if (!j.contains(key)) {
      error(p, "missing required field");
      return 0.0;
    }
    const auto& v = j.at(std::string(key));
    if (!v.is_number()) {
      error(p, "expected a number");
      return 0.0;
    }
    return v.get<double>();
  }

  template <class Int>
  void integer(const json& j, const std::string& path, std::string_view key, Int& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(std::string(key));
    if (!v.is_number_integer()) {
      error(join(path, key), "expected an integer");
      return;
    }
    out = v.get<Int>();
  }

  void boolean(const json& j, const std::string& path, std::string_view key, bool& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(std::string(key));
    if (!v.is_boolean()) {
      error(join(path, key), "expected true or false");
      return;
    }
    out = v.get<bool>();
  }

  std::optional<std::string> string(const json& j, const std::string& path, std::string_view key) {
    if (!j.contains(key)) return std::nullopt;
    const auto& v = j.at(std::string(key));
    if (!v.is_string()) {
      error(join(path, key), "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<ItuChannel> channel(const json& j, const std::string& path, std::string_view key) {
    const auto p = join(path, key);
    if (!j.contains(key)) {
      error(p, "missing required field");
      return std::nullopt;
    }
    const auto& v = j.at(std::string(key));
    if (!v.is_number_integer()) {
      error(p, "expected an ITU channel number");
      return std::nullopt;
    }
    try {
      return itu_channel(v.get<int>());
    } catch (const std::exception& e) {
      error(p, e.what());
      return std::nullopt;
    }
  }

  /// Runs `check` and records any exception it throws against `path`.
  template <class F>
  void guard(const std::string& path, F&& check) {
    try {
      check();
    } catch (const std::exception& e) {
      error(path, e.what());
    }
  }

  static std::string fmt(double v) {
    std::ostringstream s;
    s.precision(9);
    s << v;
    return s.str();
  }
};

inline void read_fiber(Reader& r, const json& j, Scenario& s) {
  const std::string p = "fiber";
  if (!r.object(j, p)) return;
  r.keys(j, p, {"length_km", "attenuation_db_per_km"});
  s.fiber.length_km = r.required_number(j, p, "length_km");
  r.number(j, p, "attenuation_db_per_km", s.fiber.attenuation_db_per_km);
  r.guard(p, [&] { s.fiber.validate(); });
}

inline void read_mux(Reader& r, const json& j, Scenario& s) {
  const std::string p = "mux";
  if (!r.object(j, p)) return;
  r.keys(j, p, {"loss_db", "channel_loss_db"});
  r.number(j, p, "loss_db", s.mux.default_loss_db);
  if (s.mux.default_loss_db < 0.0) r.error(p + ".loss_db", "must be >= 0");
  if (j.contains("channel_loss_db")) {
    const auto& m = j.at("channel_loss_db");
    const std::string mp = p + ".channel_loss_db";
    if (!r.object(m, mp)) return;
    for (const auto& [k, v] : m.items()) {
      int ch = 0;
      try {
        std::size_t used = 0;
        ch = std::stoi(k, &used);
        if (used != k.size()) throw std::invalid_argument(k);
      } catch (const std::exception&) {
        r.error(Reader::join(mp, k), "key must be an ITU channel number");
        continue;
      }
      if (!v.is_number() || v.get<double>() < 0.0) {
        r.error(Reader::join(mp, k), "expected a loss >= 0 dB");
        continue;
      }
      s.mux.channel_loss_db[ch] = v.get<double>();
    }
  }
}

inline void read_isolation(Reader& r, const json& j, Scenario& s) {
  const std::string p = "isolation";
  if (!r.object(j, p)) return;
  r.keys(j, p, {"adjacent_db", "non_adjacent_db", "budget_fraction"});
  r.number(j, p, "adjacent_db", s.isolation.adjacent_db);
  r.number(j, p, "non_adjacent_db", s.isolation.non_adjacent_db);
  r.number(j, p, "budget_fraction", s.isolation.budget_fraction);
  if (s.isolation.adjacent_db < 0.0 || s.isolation.non_adjacent_db < 0.0) r.error(p, "isolation must be >= 0 dB");
}

inline void read_plan(Reader& r, const json& j, Scenario& s) {
  const std::string p = "plan";
  if (!j.is_array()) {
    r.error(p, "expected a list of channel assignments");
    return;
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    const std::string ep = p + "[" + std::to_string(i) + "]";
    if (!r.object(e, ep)) continue;
    r.keys(e, ep, {"channel", "role", "launch_dbm"});
    auto ch = r.channel(e, ep, "channel");
    auto role_name = r.string(e, ep, "role");
    if (!role_name) {
      if (!e.contains("role")) r.error(ep + ".role", "missing required field");
      continue;
    }
    Role role{};
    try {
      role = role_from_string(*role_name);
    } catch (const std::exception& ex) {
      r.error(ep + ".role", ex.what());
      continue;
    }
    std::optional<Dbm> launch;
    if (e.contains("launch_dbm")) {
      const auto& v = e.at("launch_dbm");
      if (v.is_number()) {
        launch = Dbm{v.get<double>()};
      } else if (!(v.is_string() && v.get<std::string>() == "adapted")) {
        r.error(ep + ".launch_dbm", "expected a number or \"adapted\"");
      }
    }
    if (role == Role::quantum && launch) r.error(ep + ".launch_dbm", "quantum channel takes no launch power");
    if (role == Role::clock && !launch) r.error(ep + ".launch_dbm", "clock channel needs a launch power");
    if (ch) s.plan.push_back({*ch, role, launch});
  }
}

inline void read_filters(Reader& r, const json& j, Scenario& s) {
  const std::string p = "filters";
  if (!j.is_array() || j.empty()) {
    r.error(p, "expected a non-empty list of filters");
    return;
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    const std::string ep = p + "[" + std::to_string(i) + "]";
    if (!r.object(e, ep)) continue;
    r.keys(e, ep, {"label", "channel", "fwhm_ghz", "insertion_db"});
    auto ch = r.channel(e, ep, "channel");
    SpectralFilter f;
    f.fwhm_ghz = r.required_number(e, ep, "fwhm_ghz");
    f.insertion_loss_db = r.required_number(e, ep, "insertion_db");
    if (!ch) continue;
    f.center = *ch;
    r.guard(ep, [&] { f.validate(); });
    s.filters.push_back(f);
    s.filter_labels.push_back(r.string(e, ep, "label").value_or("filter " + std::to_string(i)));
  }
}

inline void read_detector(Reader& r, const json& j, Scenario& s) {
  const std::string p = "detector";
  if (!r.object(j, p)) return;
  r.keys(j, p, {"efficiency", "dark_rate_hz", "afterpulse", "gate_window_ps", "clock_ghz"});
  auto& d = s.detector;
  r.number(j, p, "efficiency", d.efficiency);
  r.number(j, p, "dark_rate_hz", d.dark_rate_hz);
  r.number(j, p, "afterpulse", d.afterpulse);
  r.number(j, p, "gate_window_ps", d.gate.window_ps);
  r.number(j, p, "clock_ghz", d.gate.clock_ghz);
  r.guard(p, [&] { d.validate(); });
}

inline void read_protocol(Reader& r, const json& j, Scenario& s) {
  const std::string p = "protocol";
  if (!r.object(j, p)) return;
  r.keys(j, p, {"intensities", "intensity_probabilities", "basis_bias_z", "f_ec", "epsilon", "session_s",
                "e_det", "finite_size"});
  auto& q = s.protocol;
  auto triple = [&](std::string_view key, std::array<double, 3>& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(std::string(key));
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
      r.error(Reader::join(p, key), "expected three numbers");
      return;
    }
    for (std::size_t i = 0; i < 3; ++i) out[i] = v[i].get<double>();
  };
  triple("intensities", q.intensities);
  triple("intensity_probabilities", q.intensity_probabilities);
  r.number(j, p, "basis_bias_z", q.basis_bias_z);
  r.number(j, p, "f_ec", q.f_ec);
  r.number(j, p, "epsilon", q.epsilon);
  r.number(j, p, "session_s", q.session_s);
  r.number(j, p, "e_det", q.e_det);
  r.boolean(j, p, "finite_size", q.finite_size);
}

inline void read_transceiver(Reader& r, const json& j, Scenario& s) {
  const std::string p = "transceiver";
  if (!r.object(j, p)) return;
  r.keys(j, p, {"sensitivity_dbm", "max_launch_dbm", "bitrate_gbps", "target_ber"});
  auto& t = s.transceiver;
  r.number(j, p, "sensitivity_dbm", t.sensitivity_dbm);
  r.number(j, p, "max_launch_dbm", t.max_launch_dbm);
  r.number(j, p, "bitrate_gbps", t.bitrate_gbps);
  r.number(j, p, "target_ber", t.target_ber);
  r.guard(p, [&] { t.validate(); });
}

inline void read_policy(Reader& r, const json& j, Scenario& s) {
  const std::string p = "policy";
  if (!r.object(j, p)) return;
  r.keys(j, p, {"kind", "launch_dbm", "margin_db"});
  const auto kind = r.string(j, p, "kind").value_or("adapted");
  if (kind == "adapted") {
    s.policy = LaunchPolicy::adapted();
    r.number(j, p, "margin_db", s.policy.margin_db);
    if (s.policy.margin_db < 0.0) r.error(p + ".margin_db", "must be >= 0");
    if (j.contains("launch_dbm")) r.error(p + ".launch_dbm", "only valid with kind \"fixed\"");
  } else if (kind == "fixed") {
    s.policy = LaunchPolicy::fixed(r.required_number(j, p, "launch_dbm"));
    if (j.contains("margin_db")) r.error(p + ".margin_db", "only valid with kind \"adapted\"");
  } else {
    r.error(p + ".kind", "expected \"adapted\" or \"fixed\"");
  }
}

inline void read_raman(Reader& r, const json& j, Scenario& s, const std::filesystem::path& base) {
  const std::string p = "raman";
  if (!r.object(j, p)) return;
  r.keys(j, p, {"scale", "table", "table_file"});
  double scale = 0.0;
  if (!j.contains("scale")) {
    r.defaulted.push_back("raman.scale = 0 (not calibrated; Raman noise off)");
  }
  r.number(j, p, "scale", scale);
  std::vector<RamanProfile::Knot> knots = RamanProfile::default_shape();
  if (j.contains("table") && j.contains("table_file")) r.error(p, "give either table or table_file, not both");
  if (j.contains("table")) {
    knots.clear();
    const auto& t = j.at("table");
    if (!t.is_array()) r.error(p + ".table", "expected a list of [detuning_nm, factor] pairs");
    for (std::size_t i = 0; t.is_array() && i < t.size(); ++i) {
      if (!t[i].is_array() || t[i].size() != 2 || !t[i][0].is_number() || !t[i][1].is_number()) {
        r.error(p + ".table[" + std::to_string(i) + "]", "expected [detuning_nm, factor]");
        continue;
      }
      knots.emplace_back(t[i][0].get<double>(), t[i][1].get<double>());
    }
  } else if (auto file = r.string(j, p, "table_file")) {
    r.guard(p + ".table_file", [&] { knots = load_raman_table((base / *file).string()); });
  } else {
    r.defaulted.push_back("raman.table = default shape (dip 0.5 within 4 nm, 1.0 beyond 10 nm)");
  }
  r.guard(p, [&] { s.raman = RamanProfile(scale, knots); });
}

inline void read_sweep(Reader& r, const json& j, Scenario& s) {
  const std::string p = "sweep";
  if (!r.object(j, p)) return;
  r.keys(j, p, {"axis", "values"});
  const auto axis = r.string(j, p, "axis").value_or("none");
  if (axis == "none") {
    s.axis = SweepAxis::none;
  } else if (axis == "distance") {
    s.axis = SweepAxis::distance;
  } else if (axis == "bandwidth") {
    s.axis = SweepAxis::bandwidth;
  } else if (axis == "combined_power") {
    s.axis = SweepAxis::combined_power;
  } else {
    r.error(p + ".axis", "expected none, distance, bandwidth or combined_power");
  }
  if (j.contains("values")) {
    const auto& v = j.at("values");
    if (!v.is_array()) {
      r.error(p + ".values", "expected a list of numbers");
      return;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        r.error(p + ".values[" + std::to_string(i) + "]", "expected a number");
        continue;
      }
      const double x = v[i].get<double>();
      if (!s.values.empty() && !(x > s.values.back())) {
        r.error(p + ".values[" + std::to_string(i) + "]", "values must be strictly increasing");
      }
      s.values.push_back(x);
    }
  }
  if (s.axis == SweepAxis::none && !s.values.empty()) r.error(p + ".values", "axis none takes no values");
  if (s.axis != SweepAxis::none && s.values.empty()) r.error(p + ".values", "sweep axis needs at least one value");
  if (s.axis == SweepAxis::distance && !s.values.empty() && s.values.front() < 0.0) {
    r.error(p + ".values", "distances must be >= 0");
  }
  if (s.axis == SweepAxis::bandwidth && !s.values.empty() && s.values.front() < 0.0) {
    r.error(p + ".values", "channel counts must be >= 0");
  }
}

inline void read_search(Reader& r, const json& j, Scenario& s) {
  const std::string p = "search";
  if (!r.object(j, p)) return;
  r.keys(j, p, {"bandwidth_grid_max", "distance_min_km", "distance_max_km"});
  r.integer(j, p, "bandwidth_grid_max", s.bandwidth_grid_max);
  r.integer(j, p, "distance_min_km", s.distance_min_km);
  r.integer(j, p, "distance_max_km", s.distance_max_km);
  if (s.bandwidth_grid_max < 0) r.error(p + ".bandwidth_grid_max", "must be >= 0");
  if (s.distance_min_km < 0 || s.distance_max_km < s.distance_min_km) r.error(p, "invalid distance range");
}

/// Checks that need the whole scenario.
inline void cross_check(Reader& r, Scenario& s) {
  r.guard("protocol", [&] {
    s.protocol.clock_ghz = s.detector.gate.clock_ghz;
    s.protocol.validate();
  });
  if (s.plan.empty()) {
    r.error("plan", "missing quantum channel (role \"quantum\")");
    return;
  }
  if (s.axis == SweepAxis::bandwidth && count_data(s.plan) == 0) {
    r.error("sweep.axis", "bandwidth sweep needs at least one data channel in the plan");
  }
  if (s.axis == SweepAxis::combined_power) {
    if (count_data(s.plan) == 0) r.error("sweep.axis", "combined_power sweep needs data channels");
    if (s.policy.kind != LaunchPolicy::Kind::fixed) r.error("policy.kind", "combined_power sweep needs a fixed policy");
  }
  r.guard("plan", [&] { validate_plan(s.plan, s.isolation, 0.0); });
  if (const auto* q = find_quantum(s.plan)) {
    for (std::size_t i = 0; i < s.filters.size(); ++i) {
      if (!(s.filters[i].center == q->channel)) {
        r.error("filters[" + std::to_string(i) + "].channel", "must be centered on the quantum channel");
      }
    }
  }
}

}  // namespace detail

/// Parses scenario text. `base` resolves relative file references.
inline Scenario parse_scenario(std::string_view text, const std::filesystem::path& base = {}) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("syntax: ") + e.what()});
  }
  detail::Reader r;
  Scenario s;
  if (!r.object(j, "")) throw ValidationError(r.errors);
  r.keys(j, "", {"schema_version", "name", "fiber", "mux", "isolation", "plan", "filters", "detector", "protocol",
                 "transceiver", "policy", "raman", "sweep", "loss_convention", "filter_option", "sampling", "seed",
                 "search"});

  if (!j.contains("schema_version")) {
    r.error("schema_version", "missing required field");
  } else {
    r.integer(j, "", "schema_version", s.schema_version);
    if (s.schema_version != scenario_schema_version) {
      r.error("schema_version", "unsupported version " + std::to_string(s.schema_version));
    }
  }
  s.name = r.string(j, "", "name").value_or("scenario");

  auto required_block = [&](std::string_view key, auto&& read) {
    if (!j.contains(key)) {
      r.error(std::string(key), "missing required block");
      return;
    }
    read(j.at(std::string(key)));
  };
  auto optional_block = [&](std::string_view key, auto&& read) {
    if (j.contains(key)) read(j.at(std::string(key)));
  };

  required_block("fiber", [&](const json& b) { detail::read_fiber(r, b, s); });
  required_block("plan", [&](const json& b) { detail::read_plan(r, b, s); });
  required_block("filters", [&](const json& b) { detail::read_filters(r, b, s); });
  optional_block("mux", [&](const json& b) { detail::read_mux(r, b, s); });
  optional_block("isolation", [&](const json& b) { detail::read_isolation(r, b, s); });
  optional_block("transceiver", [&](const json& b) { detail::read_transceiver(r, b, s); });
  optional_block("policy", [&](const json& b) { detail::read_policy(r, b, s); });
  optional_block("sweep", [&](const json& b) { detail::read_sweep(r, b, s); });
  optional_block("search", [&](const json& b) { detail::read_search(r, b, s); });

  // Blocks whose individual fields default are read even when absent, so the
  // defaults show up in the report.
  const json empty = json::object();
  detail::read_detector(r, j.contains("detector") ? j.at("detector") : empty, s);
  detail::read_protocol(r, j.contains("protocol") ? j.at("protocol") : empty, s);
  detail::read_raman(r, j.contains("raman") ? j.at("raman") : empty, s, base);

  if (auto c = r.string(j, "", "loss_convention")) {
    if (*c == "end_to_end") {
      s.loss_convention = LossConvention::end_to_end;
    } else if (*c == "fiber_only") {
      s.loss_convention = LossConvention::fiber_only;
    } else {
      r.error("loss_convention", "expected end_to_end or fiber_only");
    }
  }
  if (auto f = r.string(j, "", "filter_option")) {
    if (*f == "measured") {
      s.filter_option = FilterOption::measured;
    } else if (*f == "tbp_ideal") {
      s.filter_option = FilterOption::tbp_ideal;
    } else {
      r.error("filter_option", "expected measured or tbp_ideal");
    }
  }
  r.boolean(j, "", "sampling", s.sampling);
  r.integer(j, "", "seed", s.seed);

  detail::cross_check(r, s);
  if (!r.errors.empty()) throw ValidationError(r.errors);
  s.defaulted = std::move(r.defaulted);
  return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError({path.string() + ": cannot open scenario file"});
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str(), path.parent_path());
  } catch (const ValidationError& e) {
    std::vector<std::string> errs;
    for (const auto& m : e.errors()) errs.push_back(path.filename().string() + ": " + m);
    throw ValidationError(std::move(errs));
  }
}

/// Normalized JSON echo of a loaded scenario, defaults filled in.
inline nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  nlohmann::ordered_json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;
  j["fiber"] = {{"length_km", s.fiber.length_km}, {"attenuation_db_per_km", s.fiber.attenuation_db_per_km}};
  nlohmann::ordered_json overrides = nlohmann::ordered_json::object();
  for (const auto& [ch, l] : s.mux.channel_loss_db) overrides[std::to_string(ch)] = l;
  j["mux"] = {{"loss_db", s.mux.default_loss_db}, {"channel_loss_db", overrides}};
  j["isolation"] = {{"adjacent_db", s.isolation.adjacent_db},
                    {"non_adjacent_db", s.isolation.non_adjacent_db},
                    {"budget_fraction", s.isolation.budget_fraction}};
  auto& plan = j["plan"] = nlohmann::ordered_json::array();
  for (const auto& a : s.plan) {
    nlohmann::ordered_json e{{"channel", a.channel.index}, {"role", std::string(to_string(a.role))}};
    if (a.launch) e["launch_dbm"] = a.launch->value;
    plan.push_back(e);
  }
  auto& filters = j["filters"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < s.filters.size(); ++i) {
    filters.push_back({{"label", s.filter_labels[i]},
                       {"channel", s.filters[i].center.index},
                       {"fwhm_ghz", s.filters[i].fwhm_ghz},
                       {"insertion_db", s.filters[i].insertion_loss_db}});
  }
  const auto& d = s.detector;
  j["detector"] = {{"efficiency", d.efficiency},
                   {"dark_rate_hz", d.dark_rate_hz},
                   {"afterpulse", d.afterpulse},
                   {"gate_window_ps", d.gate.window_ps},
                   {"clock_ghz", d.gate.clock_ghz}};
  const auto& p = s.protocol;
  j["protocol"] = {{"intensities", p.intensities},
                   {"intensity_probabilities", p.intensity_probabilities},
                   {"basis_bias_z", p.basis_bias_z},
                   {"f_ec", p.f_ec},
                   {"epsilon", p.epsilon},
                   {"session_s", p.session_s},
                   {"e_det", p.e_det},
                   {"finite_size", p.finite_size}};
  const auto& t = s.transceiver;
  j["transceiver"] = {{"sensitivity_dbm", t.sensitivity_dbm},
                      {"max_launch_dbm", t.max_launch_dbm},
                      {"bitrate_gbps", t.bitrate_gbps},
                      {"target_ber", t.target_ber}};
  if (s.policy.kind == LaunchPolicy::Kind::adapted) {
    j["policy"] = {{"kind", "adapted"}, {"margin_db", s.policy.margin_db}};
  } else {
    j["policy"] = {{"kind", "fixed"}, {"launch_dbm", s.policy.launch_dbm}};
  }
  auto table = nlohmann::ordered_json::array();
  for (const auto& [x, g] : s.raman.shape()) table.push_back({x, g});
  j["raman"] = {{"scale", s.raman.scale()}, {"table", table}};
  j["sweep"] = {{"axis", std::string(to_string(s.axis))}, {"values", s.values}};
  j["loss_convention"] = std::string(to_string(s.loss_convention));
  j["filter_option"] = std::string(to_string(s.filter_option));
  j["sampling"] = s.sampling;
  j["seed"] = s.seed;
  j["search"] = {{"bandwidth_grid_max", s.bandwidth_grid_max},
                 {"distance_min_km", s.distance_min_km},
                 {"distance_max_km", s.distance_max_km}};
  return j;
}

}  // namespace qkdwdm
