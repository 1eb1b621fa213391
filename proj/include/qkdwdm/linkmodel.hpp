#pragma once

// Units, ITU grid arithmetic, fiber/component loss accounting and
// optical power <-> photon flux conversion.

#include <cmath>
#include <compare>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qkdwdm {

namespace constants {
/// Speed of light in nm * THz.
inline constexpr double c_nm_thz = 299792.458;
/// Speed of light in m/s.
inline constexpr double c_m_s = 299792458.0;
/// Planck constant in J*s.
inline constexpr double planck = 6.62607015e-34;
}  // namespace constants

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

/// 10^(x/10).
inline double db_to_linear(double db) {
  require_finite(db, "dB value");
  return std::pow(10.0, db / 10.0);
}

/// 10*log10(ratio); ratio must be positive.
inline double linear_to_db(double ratio) {
  require_finite(ratio, "linear ratio");
  if (ratio <= 0.0) {
    throw std::invalid_argument("linear ratio must be positive to express in dB");
  }
  return 10.0 * std::log10(ratio);
}

struct Milliwatts;

/// Optical power on the log scale.
struct Dbm {
  double value{};

  [[nodiscard]] Milliwatts milliwatts() const;
  [[nodiscard]] double watts() const { return 1e-3 * db_to_linear(value); }

  friend Dbm operator+(Dbm p, double db) { return Dbm{p.value + db}; }
  friend Dbm operator-(Dbm p, double db) { return Dbm{p.value - db}; }
  friend auto operator<=>(const Dbm&, const Dbm&) = default;
};

/// Optical power on the linear scale; never negative.
struct Milliwatts {
  double value{};

  explicit Milliwatts(double mw = 0.0) : value(mw) {
    require_finite(mw, "power");
    if (mw < 0.0) {
      throw std::invalid_argument("linear power must be >= 0");
    }
  }

  [[nodiscard]] Dbm dbm() const { return Dbm{linear_to_db(value)}; }
  [[nodiscard]] double watts() const { return 1e-3 * value; }

  friend Milliwatts operator+(Milliwatts a, Milliwatts b) { return Milliwatts{a.value + b.value}; }
};

inline Milliwatts Dbm::milliwatts() const { return Milliwatts{db_to_linear(value)}; }

inline Milliwatts watts_to_mw(double w) { return Milliwatts{w * 1e3}; }

/// A slot on the 100 GHz ITU grid.
struct ItuChannel {
  int index{};
  double frequency_thz{};
  double wavelength_nm{};

  friend bool operator==(const ItuChannel& a, const ItuChannel& b) { return a.index == b.index; }
};

struct GridLimits {
  int min_index = 1;
  int max_index = 72;
};

inline constexpr double itu_anchor_thz = 190.0;
inline constexpr double itu_spacing_thz = 0.1;

inline ItuChannel itu_channel(int index, GridLimits limits = {}) {
  if (index < limits.min_index || index > limits.max_index) {
    throw std::out_of_range("ITU channel " + std::to_string(index) + " outside supported range [" +
                            std::to_string(limits.min_index) + ", " +
                            std::to_string(limits.max_index) + "]");
  }
  const double f = itu_anchor_thz + itu_spacing_thz * index;
  return ItuChannel{index, f, constants::c_nm_thz / f};
}

/// Optical bandwidth in nm equivalent to `ghz` at `wavelength_nm`.
inline double ghz_to_nm(double ghz, double wavelength_nm) {
  return ghz * 1e-3 * wavelength_nm * wavelength_nm / constants::c_nm_thz;
}

struct FiberSpec {
  double length_km{};
  double attenuation_db_per_km = 0.2;

  FiberSpec() = default;
  FiberSpec(double length, double attenuation) : length_km(length), attenuation_db_per_km(attenuation) {
    validate();
  }

  void validate() const {
    require_finite(length_km, "fiber length");
    require_finite(attenuation_db_per_km, "fiber attenuation");
    if (length_km < 0.0) throw std::invalid_argument("fiber length must be >= 0");
    if (attenuation_db_per_km <= 0.0) throw std::invalid_argument("fiber attenuation must be > 0");
  }

  /// Power attenuation coefficient in 1/km.
  [[nodiscard]] double attenuation_linear() const { return attenuation_db_per_km * std::log(10.0) / 10.0; }
  [[nodiscard]] double loss_db() const { return attenuation_db_per_km * length_km; }
  [[nodiscard]] double transmittance() const { return std::exp(-attenuation_linear() * length_km); }
};

struct ComponentLoss {
  std::string label;
  double loss_db{};
};

struct LinkBudget {
  double fiber_loss_db{};
  std::vector<ComponentLoss> components;
  double total_db{};

  [[nodiscard]] double transmittance() const { return db_to_linear(-total_db); }
};

inline LinkBudget total_link_loss(const FiberSpec& fiber, std::vector<ComponentLoss> components = {}) {
  fiber.validate();
  for (const auto& c : components) {
    require_finite(c.loss_db, "component loss");
    if (c.loss_db < 0.0) throw std::invalid_argument("component loss '" + c.label + "' must be >= 0");
  }
  LinkBudget b;
  b.fiber_loss_db = fiber.loss_db();
  b.total_db = std::accumulate(components.begin(), components.end(), b.fiber_loss_db,
                               [](double acc, const ComponentLoss& c) { return acc + c.loss_db; });
  b.components = std::move(components);
  return b;
}

/// Per-port mux/demux insertion loss, one traversal.
struct MuxModel {
  double default_loss_db = 1.2;
  std::map<int, double> channel_loss_db;

  [[nodiscard]] double loss(int channel_index) const {
    auto it = channel_loss_db.find(channel_index);
    return it == channel_loss_db.end() ? default_loss_db : it->second;
  }
};

/// Photon energy in J at `wavelength_nm`.
inline double photon_energy(double wavelength_nm) {
  require_finite(wavelength_nm, "wavelength");
  if (wavelength_nm <= 0.0) throw std::invalid_argument("wavelength must be > 0");
  return constants::planck * constants::c_m_s / (wavelength_nm * 1e-9);
}

/// Photons per second carried by `power_w` watts.
inline double photon_flux(double power_w, double wavelength_nm) {
  require_finite(power_w, "power");
  if (power_w < 0.0) throw std::invalid_argument("power must be >= 0");
  return power_w / photon_energy(wavelength_nm);
}

inline double photon_flux(Dbm power, double wavelength_nm) { return photon_flux(power.watts(), wavelength_nm); }

}  // namespace qkdwdm
