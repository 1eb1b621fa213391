#pragma once

// Decoy-state BB84 gain/QBER model and secure key rate.
//
// Yield bounds are the standard two-decoy (signal mu, decoys nu1 > nu2)
// bounds. Finite-size effects shift every observed gain and error rate by a
// Hoeffding deviation in the adversarial direction, with the failure budget
// split evenly over all estimated quantities plus the correctness and
// secrecy terms.
//
// Gains are pooled over both bases (detection does not depend on basis);
// error rates are per basis. Z carries the key, X estimates phase errors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "qkdwdm/detection.hpp"
#include "qkdwdm/filterchain.hpp"
#include "qkdwdm/linkmodel.hpp"

namespace qkdwdm {

enum IntensityIndex : std::size_t { kSignal = 0, kDecoy = 1, kVacuum = 2 };

struct ProtocolParams {
  /// Mean photon numbers {mu, nu1, nu2}.
  std::array<double, 3> intensities{0.5, 0.1, 0.0007};
  std::array<double, 3> intensity_probabilities{0.7, 0.2, 0.1};
  /// Probability of choosing Z, same for sender and receiver.
  double basis_bias_z = 0.9;
  double f_ec = 1.15;
  double epsilon = 1e-10;
  double session_s = 1200.0;
  double clock_ghz = 1.0;
  /// Intrinsic (misalignment) error probability.
  double e_det = 0.01;
  bool finite_size = true;

  /// Quantities estimated with a Hoeffding bound: pooled gains (3), the Z
  /// signal error rate (1) and the X decoy error rates (2).
  static constexpr int estimation_terms = 6;
  static constexpr int epsilon_terms = estimation_terms + 2;

  void validate() const {
    const auto [mu, nu1, nu2] = intensities;
    if (!(mu > nu1 && nu1 > nu2 && nu2 >= 0.0)) throw std::invalid_argument("intensities must satisfy mu > nu1 > nu2 >= 0");
    double psum = 0.0;
    for (double p : intensity_probabilities) {
      if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("intensity probabilities must be in (0, 1]");
      psum += p;
    }
    if (std::abs(psum - 1.0) > 1e-9) throw std::invalid_argument("intensity probabilities must sum to 1");
    if (!(basis_bias_z > 0.0 && basis_bias_z < 1.0)) throw std::invalid_argument("basis bias must be in (0, 1)");
    if (!(f_ec >= 1.0)) throw std::invalid_argument("error-correction inefficiency must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0, 1)");
    if (!(session_s > 0.0)) throw std::invalid_argument("session length must be > 0");
    if (!(clock_ghz > 0.0)) throw std::invalid_argument("clock must be > 0");
    if (!(e_det >= 0.0 && e_det <= 0.5)) throw std::invalid_argument("e_det must be in [0, 0.5]");
  }

  [[nodiscard]] double clock_hz() const { return clock_ghz * 1e9; }
  [[nodiscard]] double pulses() const { return session_s * clock_hz(); }
  [[nodiscard]] double sifting() const { return basis_bias_z * basis_bias_z; }
  [[nodiscard]] double x_sifting() const { return (1.0 - basis_bias_z) * (1.0 - basis_bias_z); }
  [[nodiscard]] double epsilon_each() const { return epsilon / epsilon_terms; }
};

/// Shannon binary entropy in bits.
inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binary_entropy argument must be in [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

struct IntensityStats {
  double gain{};
  double error{};
};

/// Gain and error rate for a Poisson source of mean `intensity` through a
/// channel of total transmittance `eta` with background yield `y0`.
inline IntensityStats channel_gain(double intensity, double eta, double y0, double e_det) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("transmittance must be in [0, 1]");
  if (!(y0 >= 0.0 && y0 <= 1.0)) throw std::invalid_argument("background yield must be in [0, 1]");
  if (!(intensity >= 0.0)) throw std::invalid_argument("intensity must be >= 0");
  if (!(e_det >= 0.0 && e_det <= 0.5)) throw std::invalid_argument("e_det must be in [0, 0.5]");
  const double click = -std::expm1(-eta * intensity);
  const double q = y0 + click - y0 * click;
  if (q == 0.0) return {0.0, 0.0};
  const double eq = 0.5 * y0 * (1.0 - click) + e_det * click;
  return {q, eq / q};
}

struct BasisStats {
  std::array<IntensityStats, 3> at{};
};

struct GainStats {
  /// Gains pooled over both bases, per intensity.
  std::array<double, 3> pooled_gain{};
  BasisStats z;
  BasisStats x;
};

/// Adversarial shifts applied to observed values before bounding.
struct Deviations {
  std::array<double, 3> gain{};
  std::array<double, 3> error{};
};

struct DecoyBounds {
  double y0_lower{};
  double y1_lower{};
  double e1_upper{0.5};
  bool feasible{};
};

/// Two-decoy bounds. `gain` are the per-intensity gains used for yields and
/// `error` the error rates used for the single-photon phase error; with zero
/// deviations and same-basis inputs this is the textbook formula.
inline DecoyBounds decoy_bounds(const std::array<double, 3>& intensities, const std::array<double, 3>& gain,
                                const std::array<double, 3>& error, const Deviations& dev = {}) {
  const auto [mu, nu1, nu2] = intensities;
  if (!(mu > nu1 && nu1 > nu2 && nu2 >= 0.0)) throw std::invalid_argument("intensities must satisfy mu > nu1 > nu2 >= 0");
  auto up = [](double v, double d) { return std::min(1.0, v + d); };
  auto down = [](double v, double d) { return std::max(0.0, v - d); };

  const double e_nu1 = std::exp(nu1);
  const double e_nu2 = std::exp(nu2);

  DecoyBounds b;
  b.y0_lower = std::max(0.0, (nu1 * down(gain[kVacuum], dev.gain[kVacuum]) * e_nu2 -
                              nu2 * up(gain[kDecoy], dev.gain[kDecoy]) * e_nu1) /
                                 (nu1 - nu2));
  const double pre = mu / (mu * nu1 - mu * nu2 - nu1 * nu1 + nu2 * nu2);
  b.y1_lower = pre * (down(gain[kDecoy], dev.gain[kDecoy]) * e_nu1 - up(gain[kVacuum], dev.gain[kVacuum]) * e_nu2 -
                      (nu1 * nu1 - nu2 * nu2) / (mu * mu) *
                          (up(gain[kSignal], dev.gain[kSignal]) * std::exp(mu) - b.y0_lower));
  if (!(b.y1_lower > 0.0)) {
    b.y1_lower = std::max(0.0, b.y1_lower);
    b.e1_upper = 0.5;
    b.feasible = false;
    return b;
  }
  const double num = up(error[kDecoy], dev.error[kDecoy]) * up(gain[kDecoy], dev.gain[kDecoy]) * e_nu1 -
                     down(error[kVacuum], dev.error[kVacuum]) * down(gain[kVacuum], dev.gain[kVacuum]) * e_nu2;
  b.e1_upper = std::clamp(num / ((nu1 - nu2) * b.y1_lower), 0.0, 0.5);
  b.feasible = true;
  return b;
}

/// sqrt(ln(2/eps) / (2n)); a bound is meaningless below one sample.
inline double hoeffding_deviation(double samples, double eps) {
  if (!(samples >= 1.0)) return 1.0;
  return std::sqrt(std::log(2.0 / eps) / (2.0 * samples));
}

struct NoiseBudget {
  double noise_at_detector_w{};
  double noise_per_gate{};
  double dark_per_gate{};
  double afterpulse_per_gate{};
  double y0{};
  bool detector_saturated{};
  bool dead_time_warning{};
};

struct SecureRateResult {
  double qber_z{};
  double qber_x{};
  double secure_bps{};
  double sifted_bps{};
  bool feasible{};
  DecoyBounds bounds;
  double eta_total{};
  NoiseBudget noise;
};

inline Deviations finite_size_deviations(const ProtocolParams& params, const GainStats& gains) {
  Deviations d;
  if (!params.finite_size) return d;
  const double eps = params.epsilon_each();
  for (std::size_t i = 0; i < 3; ++i) {
    const double n = params.pulses() * params.intensity_probabilities[i];
    d.gain[i] = hoeffding_deviation(n, eps);
    d.error[i] = hoeffding_deviation(n * params.x_sifting() * gains.x.at[i].gain, eps);
  }
  return d;
}

inline SecureRateResult secure_key_rate(const ProtocolParams& params, const GainStats& gains) {
  params.validate();
  const auto& mu = params.intensities[kSignal];
  const double eps = params.epsilon_each();
  const Deviations dev = finite_size_deviations(params, gains);

  std::array<double, 3> x_err{};
  for (std::size_t i = 0; i < 3; ++i) x_err[i] = gains.x.at[i].error;

  SecureRateResult r;
  r.qber_z = gains.z.at[kSignal].error;
  r.qber_x = gains.x.at[kSignal].error;
  r.bounds = decoy_bounds(params.intensities, gains.pooled_gain, x_err, dev);

  const double scale = params.clock_hz() * params.intensity_probabilities[kSignal] * params.sifting();
  r.sifted_bps = scale * gains.z.at[kSignal].gain;
  if (!r.bounds.feasible) return r;

  double z_err_dev = 0.0;
  double z_gain_dev = 0.0;
  if (params.finite_size) {
    const double n = params.pulses() * params.intensity_probabilities[kSignal];
    z_err_dev = hoeffding_deviation(n * params.sifting() * gains.z.at[kSignal].gain, eps);
    z_gain_dev = dev.gain[kSignal];
  }
  const double q1 = r.bounds.y1_lower * mu * std::exp(-mu);
  const double e_mu = std::min(0.5, gains.z.at[kSignal].error + z_err_dev);
  const double q_mu = std::min(1.0, gains.z.at[kSignal].gain + z_gain_dev);
  double rate = scale * (q1 * (1.0 - binary_entropy(r.bounds.e1_upper)) - params.f_ec * q_mu * binary_entropy(e_mu));
  if (params.finite_size) {
    rate -= (std::log2(2.0 / eps) + 2.0 * std::log2(2.0 / eps)) / params.session_s;
  }
  r.secure_bps = std::clamp(rate, 0.0, r.sifted_bps);
  r.feasible = r.secure_bps > 0.0;
  return r;
}

/// Expected statistics for one operating point, before key-rate extraction.
struct ScenarioStats {
  GainStats gains;
  double eta_total{};
  NoiseBudget noise;
};

/// `noise_w` is in-band noise at the receiver's filter chain input and
/// `link` the quantum channel loss up to that point. Both signal and noise
/// pay the chain's insertion loss; the chain bandwidth is already folded into
/// `noise_w`. Afterpulses add a basis-independent background equal to the
/// afterpulse probability times the mean click rate over all intensities.
inline ScenarioStats scenario_stats(double noise_w, const LinkBudget& link, const FilterChain& chain,
                                    const DetectorSpec& det, const ProtocolParams& params, double wavelength_nm) {
  chain.validate();
  det.validate();
  params.validate();
  const double noise_det_w = noise_w * chain.transmittance();
  const NoiseClicks nc = noise_click_probability(noise_det_w, wavelength_nm, det);
  const double eta = link.transmittance() * chain.transmittance() * det.efficiency;

  const double y0_raw = nc.probability;
  double mean_click = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    mean_click += params.intensity_probabilities[i] * (1.0 - (1.0 - y0_raw) * std::exp(-eta * params.intensities[i]));
  }
  const double ap = det.afterpulse * mean_click;
  const double y0 = std::min(1.0, y0_raw + ap);

  ScenarioStats out;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto s = channel_gain(params.intensities[i], eta, y0, params.e_det);
    out.gains.pooled_gain[i] = s.gain;
    out.gains.z.at[i] = s;
    out.gains.x.at[i] = s;
  }
  out.eta_total = eta;
  out.noise.noise_at_detector_w = noise_det_w;
  out.noise.dark_per_gate = det.dark_per_gate();
  out.noise.noise_per_gate = nc.probability - std::min(nc.probability, det.dark_per_gate());
  out.noise.afterpulse_per_gate = ap;
  out.noise.y0 = y0;
  out.noise.detector_saturated = nc.saturated;
  out.noise.dead_time_warning = nc.dead_time_warning;
  return out;
}

inline SecureRateResult finish_rate(const ProtocolParams& params, const ScenarioStats& st, const GainStats& observed) {
  SecureRateResult r = secure_key_rate(params, observed);
  r.eta_total = st.eta_total;
  r.noise = st.noise;
  return r;
}

/// End-to-end evaluation of one operating point with expected statistics.
inline SecureRateResult qber_of_scenario(double noise_w, const LinkBudget& link, const FilterChain& chain,
                                         const DetectorSpec& det, const ProtocolParams& params,
                                         double wavelength_nm) {
  const ScenarioStats st = scenario_stats(noise_w, link, chain, det, params, wavelength_nm);
  return finish_rate(params, st, st.gains);
}

/// One simulated session: detections per intensity are Poisson, split into
/// matched-Z, matched-X and discarded by binomial draws, and errors are
/// binomial within each basis.
template <class Rng>
GainStats sample_gain_stats(const ProtocolParams& params, const GainStats& expected, Rng& rng) {
  params.validate();
  GainStats out;
  const double pz2 = params.sifting();
  const double px2_rest = params.x_sifting() / (1.0 - pz2);
  auto binom = [&rng](std::int64_t n, double p) -> std::int64_t {
    if (n <= 0 || p <= 0.0) return 0;
    return std::binomial_distribution<std::int64_t>(n, std::min(p, 1.0))(rng);
  };
  for (std::size_t i = 0; i < 3; ++i) {
    const double n = params.pulses() * params.intensity_probabilities[i];
    const std::int64_t total = poisson_draw(n * expected.pooled_gain[i], rng);
    const std::int64_t dz = binom(total, pz2);
    const std::int64_t dx = binom(total - dz, px2_rest);
    const std::int64_t ez = binom(dz, expected.z.at[i].error);
    const std::int64_t ex = binom(dx, expected.x.at[i].error);
    out.pooled_gain[i] = std::min(1.0, static_cast<double>(total) / n);
    out.z.at[i] = {std::min(1.0, static_cast<double>(dz) / (n * pz2)),
                   dz > 0 ? static_cast<double>(ez) / static_cast<double>(dz) : 0.0};
    out.x.at[i] = {std::min(1.0, static_cast<double>(dx) / (n * params.x_sifting())),
                   dx > 0 ? static_cast<double>(ex) / static_cast<double>(dx) : 0.0};
  }
  return out;
}

}  // namespace qkdwdm
