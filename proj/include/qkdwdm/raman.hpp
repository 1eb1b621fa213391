#pragma once

// Spontaneous Raman scattering from classical channels into the quantum
// passband, plus mux crosstalk leakage.
//
// Single-pump model: the pump decays only by fiber loss and scattered light
// is attenuated at the same rate as the pump. Scattering density is taken as
// flat across the receiver passband.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qkdwdm/channel_plan.hpp"
#include "qkdwdm/linkmodel.hpp"

namespace qkdwdm {

/// Raman scattering density versus pump-to-quantum detuning.
///
/// `scale` is rho_0 in 1/(km*nm) per unit pump power; `shape` is a
/// dimensionless factor g(detuning_nm) tabulated at strictly increasing knots
/// and linearly interpolated. Outside the table, g holds its end values.
class RamanProfile {
 public:
  using Knot = std::pair<double, double>;

  RamanProfile() : RamanProfile(0.0, default_shape()) {}
  RamanProfile(double scale, std::vector<Knot> shape) : scale_(scale), shape_(std::move(shape)) { validate(); }

  /// Symmetric dip of depth 0.5 for |detuning| <= 4 nm, rising to 1.0 at 10 nm.
  static std::vector<Knot> default_shape() { return {{-10.0, 1.0}, {-4.0, 0.5}, {4.0, 0.5}, {10.0, 1.0}}; }

  [[nodiscard]] double scale() const { return scale_; }
  void set_scale(double s) {
    require_finite(s, "Raman scale");
    if (s < 0.0) throw std::invalid_argument("Raman scale must be >= 0");
    scale_ = s;
  }
  [[nodiscard]] const std::vector<Knot>& shape() const { return shape_; }

  [[nodiscard]] double shape_factor(double detuning_nm) const {
    if (detuning_nm <= shape_.front().first) return shape_.front().second;
    if (detuning_nm >= shape_.back().first) return shape_.back().second;
    auto hi = std::upper_bound(shape_.begin(), shape_.end(), detuning_nm,
                               [](double x, const Knot& k) { return x < k.first; });
    auto lo = std::prev(hi);
    if (detuning_nm == lo->first) return lo->second;
    const double t = (detuning_nm - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
  }

  /// rho = scale * g(detuning), in 1/(km*nm).
  [[nodiscard]] double density(double detuning_nm) const { return scale_ * shape_factor(detuning_nm); }

 private:
  void validate() const {
    require_finite(scale_, "Raman scale");
    if (scale_ < 0.0) throw std::invalid_argument("Raman scale must be >= 0");
    if (shape_.empty()) throw std::invalid_argument("Raman shape table is empty");
    for (std::size_t i = 0; i < shape_.size(); ++i) {
      require_finite(shape_[i].first, "Raman detuning knot");
      require_finite(shape_[i].second, "Raman shape value");
      if (shape_[i].second < 0.0) throw std::invalid_argument("Raman shape values must be >= 0");
      if (i > 0 && !(shape_[i].first > shape_[i - 1].first)) {
        throw std::invalid_argument("Raman detuning knots must be strictly increasing");
      }
    }
  }

  double scale_;
  std::vector<Knot> shape_;
};

/// Parses a two-column (detuning nm, g) table. Blank lines and `#` comments
/// are skipped; columns may be separated by whitespace or a comma.
inline std::vector<RamanProfile::Knot> parse_raman_table(std::istream& in) {
  std::vector<RamanProfile::Knot> knots;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double d = 0.0;
    double g = 0.0;
    if (!(ss >> d)) continue;
    if (!(ss >> g)) throw std::invalid_argument("Raman table line " + std::to_string(lineno) + ": expected two columns");
    std::string extra;
    if (ss >> extra) throw std::invalid_argument("Raman table line " + std::to_string(lineno) + ": trailing data");
    knots.emplace_back(d, g);
  }
  return knots;
}

inline std::vector<RamanProfile::Knot> load_raman_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open Raman table '" + path + "'");
  return parse_raman_table(in);
}

inline void check_raman_args(double pump_w, double rho, double bandwidth_nm) {
  require_finite(pump_w, "pump power");
  require_finite(rho, "Raman density");
  require_finite(bandwidth_nm, "bandwidth");
  if (pump_w < 0.0) throw std::invalid_argument("pump power must be >= 0");
  if (rho < 0.0) throw std::invalid_argument("Raman density must be >= 0");
  if (bandwidth_nm < 0.0) throw std::invalid_argument("bandwidth must be >= 0");
}

/// Co-propagating Raman power at the fiber output: P0 e^(-aL) rho L dl.
inline double forward_raman_power(double pump_w, const FiberSpec& fiber, double rho, double bandwidth_nm) {
  check_raman_args(pump_w, rho, bandwidth_nm);
  const double L = fiber.length_km;
  return pump_w * std::exp(-fiber.attenuation_linear() * L) * rho * L * bandwidth_nm;
}

/// Counter-propagating (backscattered) Raman power returned to the pump's
/// launch end: P0 rho dl (1 - e^(-2aL)) / (2a).
inline double backward_raman_power(double pump_w, const FiberSpec& fiber, double rho, double bandwidth_nm) {
  check_raman_args(pump_w, rho, bandwidth_nm);
  const double a = fiber.attenuation_linear();
  const double L = fiber.length_km;
  const double effective_length = a == 0.0 ? L : -std::expm1(-2.0 * a * L) / (2.0 * a);
  return pump_w * rho * bandwidth_nm * effective_length;
}

inline double crosstalk_leakage(double power_w, double isolation_db) {
  require_finite(power_w, "power");
  require_finite(isolation_db, "isolation");
  if (isolation_db < 0.0) throw std::invalid_argument("isolation must be >= 0 dB");
  return power_w * std::pow(10.0, -isolation_db / 10.0);
}

/// Mux port isolation toward the quantum port. Defaults are the worst cases
/// of the measured ranges (adjacent 43-84 dB, non-adjacent 77-90 dB).
struct IsolationModel {
  double adjacent_db = 43.0;
  double non_adjacent_db = 77.0;
  std::map<int, double> overrides_db;
  /// Leakage is flagged once it exceeds this fraction of the Raman budget.
  double budget_fraction = 0.1;

  [[nodiscard]] double isolation_db(int source_index, int quantum_index) const {
    if (auto it = overrides_db.find(source_index); it != overrides_db.end()) return it->second;
    return std::abs(source_index - quantum_index) == 1 ? adjacent_db : non_adjacent_db;
  }
};

enum class Direction { co, counter };

struct RamanContribution {
  ItuChannel source_channel;
  Role role{};
  Direction direction{};
  double in_band_power_w{};
  double crosstalk_power_w{};

  [[nodiscard]] double total_w() const { return in_band_power_w + crosstalk_power_w; }
};

struct NoiseBreakdown {
  std::vector<RamanContribution> items;

  [[nodiscard]] double total_w() const {
    double s = 0.0;
    for (const auto& c : items) s += c.total_w();
    return s;
  }
  /// Total with data-channel terms multiplied by `data_scale`.
  [[nodiscard]] double scaled_total_w(double data_scale) const {
    double s = 0.0;
    for (const auto& c : items) s += (is_data(c.role) ? data_scale : 1.0) * c.total_w();
    return s;
  }
};

/// In-band noise power at the receiving demux input, per source.
///
/// Launch powers are taken before the mux, so each source first pays its own
/// mux port loss. Co-propagating sources add forward Raman plus leakage of
/// their arriving power through the demux; counter-propagating sources add
/// backscattered Raman only.
inline NoiseBreakdown aggregate_noise(const ChannelPlan& plan, const ItuChannel& quantum, const FiberSpec& fiber,
                                      const RamanProfile& profile, double bandwidth_nm, const MuxModel& mux = {},
                                      const IsolationModel& isolation = {}) {
  fiber.validate();
  NoiseBreakdown out;
  for (const auto& a : plan) {
    if (a.role == Role::quantum) continue;
    if (a.channel.index == quantum.index) {
      throw std::invalid_argument("channel " + std::to_string(a.channel.index) + " collides with the quantum slot");
    }
    if (!a.launch) {
      throw std::invalid_argument("channel " + std::to_string(a.channel.index) + " has no launch power");
    }
    const double pump_w = a.launch->watts() * db_to_linear(-mux.loss(a.channel.index));
    const double rho = profile.density(a.channel.wavelength_nm - quantum.wavelength_nm);
    RamanContribution c{a.channel, a.role, co_propagating(a.role) ? Direction::co : Direction::counter, 0.0, 0.0};
    if (c.direction == Direction::co) {
      c.in_band_power_w = forward_raman_power(pump_w, fiber, rho, bandwidth_nm);
      c.crosstalk_power_w = crosstalk_leakage(pump_w * fiber.transmittance(),
                                              isolation.isolation_db(a.channel.index, quantum.index));
    } else {
      c.in_band_power_w = backward_raman_power(pump_w, fiber, rho, bandwidth_nm);
    }
    out.items.push_back(c);
  }
  return out;
}

}  // namespace qkdwdm
