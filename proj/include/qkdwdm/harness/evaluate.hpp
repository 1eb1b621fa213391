#pragma once

// One sweep point: provision the classical channels, collect the noise
// budget, and run the key-rate pipeline.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qkdwdm/harness/scenario.hpp"
#include "qkdwdm/keyrate.hpp"
#include "qkdwdm/planner.hpp"
#include "qkdwdm/raman.hpp"

namespace qkdwdm {

struct SimulationResult {
  double axis_value{};
  double distance_km{};
  /// Multiplier on data-channel noise (bandwidth axis); 1 otherwise.
  double data_scale{1.0};
  /// Per-channel data launch used at this point, if uniform.
  double data_launch_dbm{};
  /// Quantum channel loss under the scenario's loss convention.
  double link_loss_db{};
  /// In-band noise at the receiver filter chain input.
  double noise_power_w{};
  SecureRateResult qkd;
  NoiseBreakdown noise;
  std::vector<ClassicalStatus> classical;
  /// Some data channel needed more than the transceiver's maximum launch.
  bool launch_infeasible{};
  bool classical_ok{};

  /// Key is produced and every classical channel is error-free.
  [[nodiscard]] bool feasible() const { return qkd.feasible && classical_ok; }
  [[nodiscard]] double secure_bps() const { return feasible() ? qkd.secure_bps : 0.0; }
};

/// Per-channel launch that gives `combined_dbm` summed over `n_data` channels.
inline double per_channel_launch(double combined_dbm, int n_data) {
  return combined_dbm - 10.0 * std::log10(static_cast<double>(n_data));
}

/// Axis value that reproduces the scenario's own settings: its fiber length,
/// its real data channels, or its fixed launch summed over the data channels.
inline double base_axis_value(const Scenario& s) {
  switch (s.axis) {
    case SweepAxis::none: return 0.0;
    case SweepAxis::distance: return s.fiber.length_km;
    case SweepAxis::bandwidth: return count_data(s.plan);
    case SweepAxis::combined_power:
      return s.policy.launch_dbm + 10.0 * std::log10(static_cast<double>(count_data(s.plan)));
  }
  return 0.0;
}

/// Evaluates `s` at one axis value. `index` seeds the point's own generator
/// when sampling, so results do not depend on evaluation order.
inline SimulationResult evaluate_point(const Scenario& s, double axis_value, std::uint64_t index = 0) {
  FiberSpec fiber = s.fiber;
  LaunchPolicy policy = s.policy;
  ChannelPlan plan = s.plan;
  SimulationResult out;
  out.axis_value = axis_value;
  const int n_data = count_data(plan);

  switch (s.axis) {
    case SweepAxis::none:
      break;
    case SweepAxis::distance:
      fiber.length_km = axis_value;
      break;
    case SweepAxis::bandwidth:
      out.data_scale = n_data > 0 ? axis_value / n_data : 0.0;
      break;
    case SweepAxis::combined_power:
      policy = LaunchPolicy::fixed(per_channel_launch(axis_value, n_data));
      for (auto& a : plan) {
        if (is_data(a.role)) a.launch.reset();
      }
      break;
  }
  fiber.validate();
  out.distance_km = fiber.length_km;

  Provisioned prov;
  try {
    prov = provision(plan, fiber, s.mux, s.transceiver, policy);
  } catch (const InfeasibleLaunch&) {
    // Report the point at maximum launch rather than dropping it.
    out.launch_infeasible = true;
    prov = provision(plan, fiber, s.mux, s.transceiver, LaunchPolicy::fixed(s.transceiver.max_launch_dbm));
  }
  out.classical = prov.classical;
  out.classical_ok = prov.all_error_free();
  if (!out.classical.empty()) out.data_launch_dbm = out.classical.front().launch_dbm;

  const FilterChain chain = s.chain();
  const ItuChannel q = s.quantum();
  out.noise = aggregate_noise(prov.plan, q, fiber, s.raman, chain.net_bandwidth_nm(), s.mux, s.isolation);
  out.noise_power_w = out.noise.scaled_total_w(out.data_scale);

  const LinkBudget link = total_link_loss(fiber, {{"mux", s.mux.loss(q.index)}});
  out.link_loss_db =
      s.loss_convention == LossConvention::end_to_end ? link.total_db + chain.insertion_loss_db() : link.fiber_loss_db;

  const ScenarioStats st = scenario_stats(out.noise_power_w, link, chain, s.detector, s.protocol, q.wavelength_nm);
  if (s.sampling) {
    std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                      static_cast<std::uint32_t>(index)};
    std::mt19937_64 rng(seq);
    out.qkd = finish_rate(s.protocol, st, sample_gain_stats(s.protocol, st.gains, rng));
  } else {
    out.qkd = finish_rate(s.protocol, st, st.gains);
  }
  return out;
}

/// Evaluates with the scenario's axis replaced by a distance, keeping every
/// other setting. Used by the reach search.
inline SimulationResult evaluate_at_distance(Scenario s, double km) {
  s.axis = SweepAxis::distance;
  return evaluate_point(s, km);
}

/// Evaluates with `n` equivalent data channels at the scenario's distance.
inline SimulationResult evaluate_at_channels(Scenario s, double n) {
  s.axis = SweepAxis::bandwidth;
  return evaluate_point(s, n);
}

}  // namespace qkdwdm
