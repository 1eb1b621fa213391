// Command-line front end: simulate, sweep, calibrate, plan, audit-tbp.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid input, 3 calibration
// did not converge or left an anchor infeasible.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "qkdwdm/qkdwdm.hpp"

namespace fs = std::filesystem;
using namespace qkdwdm;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitCalibration = 3;

struct Globals {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;
  std::string calibration;
};

Scenario load(const Globals& g) {
  if (g.scenario.empty()) throw ValidationError({"--scenario is required for this command"});
  Scenario s = load_scenario(g.scenario);
  if (g.seed) s.seed = *g.seed;
  if (!g.calibration.empty()) apply_params(s, load_calibration_params(g.calibration));
  return s;
}

unsigned jobs(const Globals& g) {
  if (g.jobs > 0) return g.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Writes `text` to `<out>/<file>` or stdout when no output dir is set.
void deliver(const Globals& g, const std::string& file, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(g.out);
  const fs::path p = fs::path(g.out) / file;
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  f << text;
  std::cerr << "wrote " << p.string() << '\n';
}

int run_simulate(const Globals& g, std::optional<double> at, bool report) {
  Scenario s = load(g);
  const double x = at.value_or(base_axis_value(s));
  if (at && s.axis == SweepAxis::none) throw ValidationError({"--at needs a scenario with a sweep axis"});
  const SimulationTable rows{evaluate_point(s, x)};
  std::ostringstream o;
  report ? write_report(s, rows, o) : write_csv(rows, o);
  deliver(g, s.name + (report ? ".point.report.md" : ".point.csv"), o.str());
  return 0;
}

int run_sweep_cmd(const Globals& g, bool report) {
  const Scenario s = load(g);
  const auto rows = run_sweep(s, jobs(g));
  if (g.out.empty()) {
    report ? write_report(s, rows, std::cout) : write_csv(rows, std::cout);
  } else {
    const auto csv = emit(s, rows, g.out, report);
    std::cerr << "wrote " << csv.string() << (report ? " and report" : "") << '\n';
  }
  return 0;
}

int run_calibrate(const Globals& g, const std::string& spec_path) {
  CalibrationSpec spec = load_calibration_spec(spec_path);
  if (g.seed) spec.seed = *g.seed;
  const auto result = calibrate(spec);
  for (const auto& r : result.residuals) {
    std::cerr << r.label << ": model " << fmt9(r.model) << " target " << fmt9(r.target) << " ("
              << fmt9(100.0 * r.relative) << "%)\n";
  }
  deliver(g, fs::path(spec_path).stem().string() + ".calibration.json", calibration_to_json(result).dump(2) + "\n");
  if (!result.converged) {
    std::cerr << "calibration did not converge\n";
    return kExitCalibration;
  }
  if (!result.anchors_feasible) {
    std::cerr << "fitted parameters leave an anchor without key\n";
    return kExitCalibration;
  }
  return 0;
}

int run_plan(const Globals& g, const PlanOptions& opt, const std::string& filter_option) {
  Scenario s = load(g);
  if (filter_option == "tbp_ideal") {
    s.filter_option = FilterOption::tbp_ideal;
  } else if (filter_option == "measured") {
    s.filter_option = FilterOption::measured;
  }
  std::ostringstream o;
  write_plan_report(s, opt, o);
  deliver(g, s.name + ".plan.md", o.str());
  return 0;
}

int run_audit(const Globals& g, std::optional<double> fwhm, std::optional<double> window) {
  std::ostringstream o;
  auto line = [&](const std::string& label, double f, double w) {
    const auto a = tbp_feasible(f, w);
    o << label << ": " << fmt9(f) << " GHz x " << fmt9(w) << " ps = " << fmt9(a.product) << ", "
      << fmt9(a.ratio_to_limit) << " x limit " << fmt9(tbp_limit) << (a.feasible ? "" : " (below limit)") << '\n';
  };
  if (fwhm || window) {
    if (!fwhm || !window) throw ValidationError({"--fwhm-ghz and --window-ps go together"});
    line("filter", *fwhm, *window);
  } else {
    const Scenario s = load(g);
    const auto chain = s.chain();
    for (std::size_t i = 0; i < chain.spectral.size(); ++i) {
      line(s.filter_labels[i], chain.spectral[i].fwhm_ghz, chain.gate.window_ps);
    }
    o << "TBP-limited FWHM at " << fmt9(chain.gate.window_ps) << " ps: "
      << fmt9(tbp_limited_fwhm_ghz(chain.gate.window_ps)) << " GHz\n";
    o << "temporal acceptance: " << fmt9(10.0 * std::log10(temporal_acceptance(chain.gate))) << " dB\n";
  }
  deliver(g, "tbp_audit.txt", o.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QKD and 10 Gb/s DWDM coexistence simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("-s,--scenario", g.scenario, "Scenario file");
  app.add_option("-o,--out", g.out, "Output directory (default: stdout)");
  app.add_option("--seed", g.seed, "Override the scenario seed");
  app.add_option("-j,--jobs", g.jobs, "Worker threads for sweeps (default: all cores)");
  app.add_option("--calibration", g.calibration, "Apply fitted parameters from a calibration result");

  auto* sim = app.add_subcommand("simulate", "Evaluate a single operating point");
  std::optional<double> at;
  bool sim_report = false;
  sim->add_option("--at", at, "Axis value (default: the scenario's own setting)");
  sim->add_flag("--report", sim_report, "Write the report instead of CSV");

  auto* sweep = app.add_subcommand("sweep", "Evaluate every sweep point");
  bool sweep_report = false;
  sweep->add_flag("--report", sweep_report, "Also write the report");

  auto* cal = app.add_subcommand("calibrate", "Fit free parameters to anchor points");
  std::string spec_path;
  cal->add_option("spec", spec_path, "Calibration spec (.calib)")->required()->check(CLI::ExistingFile);

  auto* plan = app.add_subcommand("plan", "Validate and provision a channel plan");
  PlanOptions popt;
  std::string filter_option;
  plan->add_flag("--max-bandwidth", popt.max_bandwidth, "Search the largest data channel count");
  plan->add_flag("--max-distance", popt.max_distance, "Search the longest reach");
  plan->add_option("--filter-option", filter_option, "Override filters for the search")
      ->check(CLI::IsMember({"measured", "tbp_ideal"}));

  auto* audit = app.add_subcommand("audit-tbp", "Check filters against the time-bandwidth limit");
  std::optional<double> fwhm;
  std::optional<double> window;
  audit->add_option("--fwhm-ghz", fwhm, "Filter FWHM in GHz");
  audit->add_option("--window-ps", window, "Gate window in ps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*sim) return run_simulate(g, at, sim_report);
    if (*sweep) return run_sweep_cmd(g, sweep_report);
    if (*cal) return run_calibrate(g, spec_path);
    if (*plan) return run_plan(g, popt, filter_option);
    if (*audit) return run_audit(g, fwhm, window);
  } catch (const ValidationError& e) {
    for (const auto& m : e.errors()) std::cerr << "error: " << m << '\n';
    return kExitInvalid;
  } catch (const PlanError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
