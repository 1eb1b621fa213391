#pragma once

// Gated single-photon detector: optical rates -> per-gate click probabilities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "qkdwdm/filterchain.hpp"
#include "qkdwdm/linkmodel.hpp"

namespace qkdwdm {

struct DetectorSpec {
  double efficiency = 0.20;
  double dark_rate_hz = 1e3;
  /// Probability of an afterpulse per detected click.
  double afterpulse = 0.04;
  TemporalGate gate;

  void validate() const {
    require_finite(efficiency, "detector efficiency");
    require_finite(dark_rate_hz, "dark count rate");
    require_finite(afterpulse, "afterpulse probability");
    if (efficiency < 0.0 || efficiency > 1.0) throw std::invalid_argument("detector efficiency must be in [0, 1]");
    if (afterpulse < 0.0 || afterpulse > 1.0) throw std::invalid_argument("afterpulse probability must be in [0, 1]");
    if (dark_rate_hz < 0.0) throw std::invalid_argument("dark count rate must be >= 0");
    gate.validate();
  }

  [[nodiscard]] double dark_per_gate() const { return dark_rate_hz / gate.clock_hz(); }
};

/// Per-gate click probability for a mean of `mean_photons` incident photons,
/// with afterpulsing applied as a (1 + p_ap) multiplier.
inline double click_probability(double mean_photons, const DetectorSpec& det) {
  require_finite(mean_photons, "mean photon number");
  if (mean_photons < 0.0) throw std::invalid_argument("mean photon number must be >= 0");
  const double p = -std::expm1(-det.efficiency * mean_photons);
  return std::min(1.0, p * (1.0 + det.afterpulse));
}

struct NoiseClicks {
  double probability{};
  /// Raw value exceeded 1 and was clamped.
  bool saturated{};
  /// Above 0.1 per gate; dead time is no longer negligible.
  bool dead_time_warning{};
};

/// Noise click probability per gate from CW power `noise_w` plus dark counts.
inline NoiseClicks noise_click_probability(double noise_w, double wavelength_nm, const DetectorSpec& det) {
  det.validate();
  const double flux = photon_flux(noise_w, wavelength_nm);
  const double per_gate_photons = flux / det.gate.clock_hz();
  const double p = det.efficiency * per_gate_photons * temporal_acceptance(det.gate) + det.dark_per_gate();
  return {std::min(p, 1.0), p > 1.0, p > 0.1};
}

struct ClickRates {
  double signal_per_gate{};
  double noise_per_gate{};
  double dark_per_gate{};
  double afterpulse_factor = 1.0;

  void validate() const {
    for (double p : {signal_per_gate, noise_per_gate, dark_per_gate}) {
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("click probabilities must be in [0, 1]");
    }
    if (!(afterpulse_factor >= 1.0)) throw std::invalid_argument("afterpulse factor must be >= 1");
  }

  [[nodiscard]] double total_per_gate() const {
    return std::min(1.0, (signal_per_gate + noise_per_gate + dark_per_gate) * afterpulse_factor);
  }
};

/// Poisson draw; mean 0 always yields 0.
template <class Rng>
std::int64_t poisson_draw(double mean, Rng& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("Poisson mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng);
}

struct SampledCounts {
  std::int64_t signal{};
  std::int64_t noise{};
  std::int64_t dark{};
};

/// Independent Poisson counts over `gates` gates. The generator is owned by
/// the caller; a fixed seed reproduces the sequence.
template <class Rng>
SampledCounts sample_counts(const ClickRates& rates, std::int64_t gates, Rng& rng) {
  rates.validate();
  if (gates < 0) throw std::invalid_argument("gate count must be >= 0");
  const auto g = static_cast<double>(gates);
  SampledCounts out;
  out.signal = poisson_draw(rates.signal_per_gate * rates.afterpulse_factor * g, rng);
  out.noise = poisson_draw(rates.noise_per_gate * rates.afterpulse_factor * g, rng);
  out.dark = poisson_draw(rates.dark_per_gate * rates.afterpulse_factor * g, rng);
  return out;
}

}  // namespace qkdwdm
