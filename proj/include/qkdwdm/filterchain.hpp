#pragma once

// Spectral filters, the detector's temporal gate, and the time-bandwidth
// product audit.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qkdwdm/linkmodel.hpp"

namespace qkdwdm {

/// Lower bound on FWHM(freq) x FWHM(time) for a Gaussian pulse: 2 ln2 / pi.
inline constexpr double tbp_limit = 2.0 * std::numbers::ln2 / std::numbers::pi;

struct SpectralFilter {
  ItuChannel center;
  double fwhm_ghz{};
  double insertion_loss_db{};

  void validate() const {
    require_finite(fwhm_ghz, "filter FWHM");
    require_finite(insertion_loss_db, "filter insertion loss");
    if (fwhm_ghz <= 0.0) throw std::invalid_argument("filter FWHM must be > 0");
    if (insertion_loss_db < 0.0) throw std::invalid_argument("filter insertion loss must be >= 0");
  }

  /// Rectangular equivalent width in nm at the center wavelength.
  [[nodiscard]] double equivalent_bandwidth_nm() const { return ghz_to_nm(fwhm_ghz, center.wavelength_nm); }
};

struct TemporalGate {
  double window_ps = 100.0;
  double clock_ghz = 1.0;

  void validate() const {
    require_finite(window_ps, "gate window");
    require_finite(clock_ghz, "gate clock");
    if (window_ps <= 0.0 || clock_ghz <= 0.0) throw std::invalid_argument("gate window and clock must be > 0");
    if (duty_cycle() > 1.0) throw std::invalid_argument("gate window exceeds the gate period");
  }

  [[nodiscard]] double duty_cycle() const { return window_ps * clock_ghz / 1000.0; }
  [[nodiscard]] double window_s() const { return window_ps * 1e-12; }
  [[nodiscard]] double clock_hz() const { return clock_ghz * 1e9; }
};

struct FilterChain {
  std::vector<SpectralFilter> spectral;
  TemporalGate gate;

  void validate() const {
    if (spectral.empty()) throw std::invalid_argument("filter chain needs at least one spectral filter");
    for (const auto& f : spectral) f.validate();
    gate.validate();
  }

  [[nodiscard]] const SpectralFilter& narrowest() const {
    return *std::min_element(spectral.begin(), spectral.end(),
                             [](const auto& a, const auto& b) { return a.fwhm_ghz < b.fwhm_ghz; });
  }
  [[nodiscard]] double net_fwhm_ghz() const { return narrowest().fwhm_ghz; }
  [[nodiscard]] double net_bandwidth_nm() const { return narrowest().equivalent_bandwidth_nm(); }
  [[nodiscard]] double insertion_loss_db() const {
    double s = 0.0;
    for (const auto& f : spectral) s += f.insertion_loss_db;
    return s;
  }
  [[nodiscard]] double transmittance() const { return db_to_linear(-insertion_loss_db()); }
};

/// Fraction of CW noise falling inside the gate window.
inline double temporal_acceptance(const TemporalGate& gate) {
  gate.validate();
  return gate.duty_cycle();
}

inline double tbp(double fwhm_ghz, double fwhm_ps) {
  if (!(fwhm_ghz > 0.0) || !(fwhm_ps > 0.0)) throw std::invalid_argument("TBP arguments must be > 0");
  return fwhm_ghz * fwhm_ps / 1000.0;
}

struct TbpAudit {
  double product{};
  double ratio_to_limit{};
  bool feasible{};
};

inline TbpAudit tbp_feasible(double fwhm_ghz, double fwhm_ps) {
  const double p = tbp(fwhm_ghz, fwhm_ps);
  const double r = p / tbp_limit;
  return {p, r, r >= 1.0};
}

/// Narrowest FWHM (GHz) that a gate of `window_ps` permits.
inline double tbp_limited_fwhm_ghz(double window_ps) { return tbp_limit * 1000.0 / window_ps; }

/// Chain with every filter narrowed to the TBP limit at the gate's window.
/// Insertion losses are kept.
inline FilterChain tbp_ideal(FilterChain chain) {
  const double ideal = tbp_limited_fwhm_ghz(chain.gate.window_ps);
  for (auto& f : chain.spectral) f.fwhm_ghz = std::min(f.fwhm_ghz, ideal);
  return chain;
}

struct SpectralRejection {
  double db{};
  /// Set when the chain is wider than the reference (negative rejection).
  bool wider_than_reference{};
};

/// Extra broadband-noise rejection of `chain` relative to a passband of
/// `reference_fwhm_ghz`, assuming a flat noise spectrum.
inline SpectralRejection spectral_rejection(const FilterChain& chain, double reference_fwhm_ghz) {
  if (!(reference_fwhm_ghz > 0.0)) throw std::invalid_argument("reference FWHM must be > 0");
  const double net = chain.net_fwhm_ghz();
  return {10.0 * std::log10(reference_fwhm_ghz / net), net > reference_fwhm_ghz};
}

}  // namespace qkdwdm
