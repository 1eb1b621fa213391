#pragma once

// Text report for the `plan` command: plan checks, provisioning, and the
// optional bandwidth and reach searches.

#include <ostream>
#include <string>

#include "qkdwdm/harness/emit.hpp"
#include "qkdwdm/harness/evaluate.hpp"
#include "qkdwdm/harness/scenario.hpp"
#include "qkdwdm/planner.hpp"

namespace qkdwdm {

struct PlanOptions {
  bool max_bandwidth = false;
  bool max_distance = false;
};

inline BandwidthSearch search_bandwidth(const Scenario& s) {
  const bool noise_free =
      evaluate_at_channels(s, 0.0).noise_power_w == evaluate_at_channels(s, 1.0).noise_power_w;
  return max_data_bandwidth(
      [&](int n) {
        const auto r = evaluate_at_channels(s, n);
        return BandwidthPoint{n, r.secure_bps(), r.qkd.qber_z};
      },
      s.bandwidth_grid_max, s.transceiver.bitrate_gbps, noise_free);
}

inline DistanceSearch search_distance(const Scenario& s) {
  return max_distance([&](int km) { return evaluate_at_distance(s, km).feasible(); }, s.distance_min_km,
                      s.distance_max_km);
}

inline void write_plan_report(const Scenario& s, const PlanOptions& opt, std::ostream& out) {
  out << "# Plan: " << s.name << "\n\n## Channel plan\n\n";
  for (const auto& a : s.plan) {
    out << "- ch" << a.channel.index << " (" << fmt9(a.channel.wavelength_nm) << " nm) " << to_string(a.role);
    if (a.launch) out << " at " << fmt9(a.launch->value) << " dBm";
    out << '\n';
  }

  const auto at_base = evaluate_point(s, base_axis_value(s));
  // Budget: the Raman noise the plan itself generates at the base point.
  double raman_w = 0.0;
  for (const auto& c : at_base.noise.items) raman_w += c.in_band_power_w;
  Provisioned prov;
  bool launch_ok = true;
  try {
    prov = provision(s.plan, s.fiber, s.mux, s.transceiver, s.policy);
  } catch (const InfeasibleLaunch& e) {
    launch_ok = false;
    out << "\nProvisioning failed: " << e.what() << '\n';
  }
  if (launch_ok) {
    const PlanCheck check = validate_plan(prov.plan, s.isolation, raman_w, {s.fiber.transmittance(), s.mux});
    out << "\n## Crosstalk into ch" << check.quantum_channel << "\n\n";
    for (const auto& l : check.leakage) {
      out << "- ch" << l.channel << ": isolation " << fmt9(l.isolation_db) << " dB, leakage " << fmt9(l.leakage_w)
          << " W" << (l.flagged ? " (exceeds budget)" : "") << '\n';
    }
    out << "- flagged above " << fmt9(s.isolation.budget_fraction) << " x Raman " << fmt9(raman_w) << " W\n";
    if (!check.adjacent_to_quantum.empty()) {
      out << "- adjacent to the quantum slot:";
      for (int c : check.adjacent_to_quantum) out << " ch" << c;
      out << '\n';
    }
    out << "\n## Provisioning at " << fmt9(s.fiber.length_km) << " km\n\n";
    for (const auto& c : prov.classical) {
      out << "- ch" << c.channel << ": launch " << fmt9(c.launch_dbm) << " dBm, loss " << fmt9(c.link_loss_db)
          << " dB, received " << fmt9(c.received_dbm) << " dBm, BER " << fmt9(c.ber) << ", "
          << (c.error_free ? "error-free" : "NOT error-free") << '\n';
    }
  }
  out << "\n## Quantum channel at " << to_string(s.axis) << " = " << fmt9(base_axis_value(s)) << "\n\n";
  out << "- secure " << fmt9(at_base.secure_bps()) << " b/s, QBER Z " << fmt9(at_base.qkd.qber_z) << ", X "
      << fmt9(at_base.qkd.qber_x) << '\n';

  if (opt.max_bandwidth) {
    out << "\n## Maximum data bandwidth at " << fmt9(s.fiber.length_km) << " km\n\n";
    try {
      const auto b = search_bandwidth(s);
      out << "- " << b.max_channels << " channels, " << fmt9(b.aggregated_gbps) << " Gb/s"
          << (b.noise_free ? " (data adds no noise; grid limit)" : "") << "\n\n";
      out << "channels,secure_bps,qber_z\n";
      for (const auto& p : b.curve) out << p.channels << ',' << fmt9(p.secure_bps) << ',' << fmt9(p.qber_z) << '\n';
    } catch (const std::runtime_error& e) {
      out << "- " << e.what() << '\n';
    }
  }
  if (opt.max_distance) {
    out << "\n## Maximum distance (" << to_string(s.filter_option) << " filters)\n\n";
    try {
      const auto d = search_distance(s);
      out << "- " << d.km << " km" << (d.capped ? " (search limit)" : "") << " after " << d.evaluations
          << " evaluations\n";
    } catch (const std::runtime_error& e) {
      out << "- " << e.what() << '\n';
    }
  }
}

}  // namespace qkdwdm
