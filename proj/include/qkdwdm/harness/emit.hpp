#pragma once

// Table output: a fixed-column CSV and a plain-text report that echoes the
// scenario and every assumed value.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "qkdwdm/harness/scenario.hpp"
#include "qkdwdm/harness/sweep.hpp"

namespace qkdwdm {

inline constexpr const char* csv_header =
    "axis_value,link_loss_db,noise_power_w,y0,qber_z,qber_x,sifted_bps,secure_bps,feasible";

/// %.9g formatting, independent of stream state and locale.
inline std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void write_csv(const SimulationTable& rows, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("nothing to emit: table is empty");
  out << csv_header << '\n';
  for (const auto& r : rows) {
    out << fmt9(r.axis_value) << ',' << fmt9(r.link_loss_db) << ',' << fmt9(r.noise_power_w) << ','
        << fmt9(r.qkd.noise.y0) << ',' << fmt9(r.qkd.qber_z) << ',' << fmt9(r.qkd.qber_x) << ','
        << fmt9(r.qkd.sifted_bps) << ',' << fmt9(r.secure_bps()) << ',' << (r.feasible() ? 1 : 0) << '\n';
  }
}

/// Modelling assumptions that hold for every row, plus the defaulted fields.
inline std::vector<std::string> scenario_assumptions(const Scenario& s) {
  std::vector<std::string> a;
  const auto chain = s.chain();
  for (std::size_t i = 0; i < s.filters.size(); ++i) {
    const auto& f = chain.spectral[i];
    a.push_back("filter '" + s.filter_labels[i] + "': FWHM " + fmt9(f.fwhm_ghz) + " GHz, insertion loss " +
                fmt9(f.insertion_loss_db) + " dB");
  }
  a.push_back("filter option: " + std::string(to_string(s.filter_option)));
  a.push_back("net filter bandwidth " + fmt9(chain.net_bandwidth_nm()) + " nm, chain insertion loss " +
              fmt9(chain.insertion_loss_db()) + " dB");
  a.push_back("gate " + fmt9(s.detector.gate.window_ps) + " ps at " + fmt9(s.detector.gate.clock_ghz) +
              " GHz: temporal acceptance " + fmt9(10.0 * std::log10(temporal_acceptance(s.detector.gate))) + " dB");
  a.push_back("Raman scale " + fmt9(s.raman.scale()) + " /(km nm)");
  a.push_back("mux loss " + fmt9(s.mux.default_loss_db) + " dB per pass unless overridden");
  for (const auto& [ch, l] : s.mux.channel_loss_db) {
    a.push_back("mux loss for channel " + std::to_string(ch) + ": " + fmt9(l) + " dB");
  }
  a.push_back("crosstalk isolation " + fmt9(s.isolation.adjacent_db) + " dB adjacent, " +
              fmt9(s.isolation.non_adjacent_db) + " dB non-adjacent; counter-propagating sources leak nothing");
  a.push_back("link loss column: " + std::string(to_string(s.loss_convention)));
  a.push_back("noise_power_w column: in-band noise at the receiver filter chain input");
  for (const auto& d : s.defaulted) a.push_back(d);
  return a;
}

inline void write_report(const Scenario& s, const SimulationTable& rows, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("nothing to emit: table is empty");
  out << "# Scenario: " << s.name << "\n\n## Scenario echo\n\n" << scenario_to_json(s).dump(2) << "\n\n";
  out << "## Assumptions\n\n";
  for (const auto& a : scenario_assumptions(s)) out << "- " << a << '\n';
  out << "\n## Results\n\n";
  write_csv(rows, out);
  out << "\n## Noise budget per point\n";
  for (const auto& r : rows) {
    out << "\n### axis_value " << fmt9(r.axis_value) << " (fiber " << fmt9(r.distance_km) << " km, data scale "
        << fmt9(r.data_scale) << ")\n";
    for (const auto& c : r.noise.items) {
      out << "- ch" << c.source_channel.index << ' ' << to_string(c.role) << ' '
          << (c.direction == Direction::co ? "co" : "counter") << ": raman " << fmt9(c.in_band_power_w)
          << " W, crosstalk " << fmt9(c.crosstalk_power_w) << " W\n";
    }
    const auto& n = r.qkd.noise;
    out << "- at detector " << fmt9(n.noise_at_detector_w) << " W; per gate: noise " << fmt9(n.noise_per_gate)
        << ", dark " << fmt9(n.dark_per_gate) << ", afterpulse " << fmt9(n.afterpulse_per_gate) << ", y0 "
        << fmt9(n.y0) << '\n';
    out << "- eta " << fmt9(r.qkd.eta_total) << "; Y1 >= " << fmt9(r.qkd.bounds.y1_lower) << ", e1 <= "
        << fmt9(r.qkd.bounds.e1_upper) << '\n';
    for (const auto& c : r.classical) {
      out << "- 10G ch" << c.channel << ": launch " << fmt9(c.launch_dbm) << " dBm, loss " << fmt9(c.link_loss_db)
          << " dB, received " << fmt9(c.received_dbm) << " dBm, BER " << fmt9(c.ber)
          << (c.error_free ? "" : " (NOT error-free)") << '\n';
    }
    if (r.launch_infeasible) out << "- required launch exceeds the transceiver maximum\n";
    if (n.detector_saturated) out << "- detector saturated\n";
    if (n.dead_time_warning) out << "- noise click probability above 0.1 per gate; dead time not modelled\n";
  }
}

namespace detail {
inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  return f;
}
}  // namespace detail

/// Writes `<dir>/<name>.csv` and, if asked, `<dir>/<name>.report.md`.
/// Returns the CSV path.
inline std::filesystem::path emit(const Scenario& s, const SimulationTable& rows, const std::filesystem::path& dir,
                                  bool report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto csv = dir / (s.name + ".csv");
  {
    auto f = detail::open_output(csv);
    write_csv(rows, f);
    if (!f) throw std::runtime_error("write failed for '" + csv.string() + "'");
  }
  if (report) {
    const auto rep = dir / (s.name + ".report.md");
    auto f = detail::open_output(rep);
    write_report(s, rows, f);
    if (!f) throw std::runtime_error("write failed for '" + rep.string() + "'");
  }
  return csv;
}

}  // namespace qkdwdm
