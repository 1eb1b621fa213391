#pragma once

// Channel-plan validation, launch-power provisioning, and the two headline
// searches: most data channels at a fixed distance, and longest reach.

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkdwdm/channel_plan.hpp"
#include "qkdwdm/classical10g.hpp"
#include "qkdwdm/linkmodel.hpp"
#include "qkdwdm/raman.hpp"

namespace qkdwdm {

class PlanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ChannelLeakage {
  int channel{};
  double isolation_db{};
  double leakage_w{};
  bool flagged{};
};

struct PlanCheck {
  int quantum_channel{};
  /// Assigned channels directly next to the quantum slot.
  std::vector<int> adjacent_to_quantum;
  std::vector<ChannelLeakage> leakage;
  double worst_leakage_w{};
  double budget_w{};
  bool leakage_flag{};
};

/// Attenuation between a source's launch point and the receiving demux.
/// The default is a lossless path, the worst case.
struct LeakagePath {
  double fiber_transmittance = 1.0;
  MuxModel mux{0.0, {}};
};

/// Structural checks plus crosstalk into the quantum slot.
///
/// Only co-propagating sources reach the receiving demux; their leakage is
/// the power arriving over `path` times the port isolation, the same term the
/// noise model adds. A source is flagged when its leakage exceeds
/// `isolation.budget_fraction` of `raman_budget_w`. Channels without a launch
/// power are skipped.
inline PlanCheck validate_plan(const ChannelPlan& plan, const IsolationModel& isolation, double raman_budget_w,
                               const LeakagePath& path = {}) {
  std::vector<std::string> problems;
  std::set<int> seen;
  for (const auto& a : plan) {
    if (!seen.insert(a.channel.index).second) {
      problems.push_back("channel " + std::to_string(a.channel.index) + " assigned more than once");
    }
  }
  const int n_quantum = count_role(plan, Role::quantum);
  if (n_quantum == 0) problems.emplace_back("missing quantum channel (role \"quantum\")");
  if (n_quantum > 1) problems.emplace_back("plan has more than one quantum channel");
  if (count_role(plan, Role::data_co) != count_role(plan, Role::data_counter)) {
    problems.emplace_back("data channels must come in co/counter-propagating pairs");
  }
  if (!problems.empty()) {
    std::string msg = problems.front();
    for (std::size_t i = 1; i < problems.size(); ++i) msg += "; " + problems[i];
    throw PlanError(msg);
  }

  const int q = find_quantum(plan)->channel.index;
  PlanCheck out;
  out.quantum_channel = q;
  out.budget_w = raman_budget_w;
  const double threshold = isolation.budget_fraction * raman_budget_w;
  for (const auto& a : plan) {
    if (a.role == Role::quantum) continue;
    if (std::abs(a.channel.index - q) == 1) out.adjacent_to_quantum.push_back(a.channel.index);
    if (!a.launch || !co_propagating(a.role)) continue;
    ChannelLeakage l;
    l.channel = a.channel.index;
    l.isolation_db = isolation.isolation_db(a.channel.index, q);
    const double arriving_w =
        a.launch->watts() * db_to_linear(-path.mux.loss(a.channel.index)) * path.fiber_transmittance;
    l.leakage_w = crosstalk_leakage(arriving_w, l.isolation_db);
    l.flagged = l.leakage_w > threshold;
    out.worst_leakage_w = std::max(out.worst_leakage_w, l.leakage_w);
    out.leakage_flag = out.leakage_flag || l.flagged;
    out.leakage.push_back(l);
  }
  return out;
}

struct LaunchPolicy {
  enum class Kind { adapted, fixed };
  Kind kind = Kind::adapted;
  /// Per-channel launch for `fixed`.
  double launch_dbm = 0.0;
  double margin_db = 0.0;

  static LaunchPolicy adapted(double margin = 0.0) { return {Kind::adapted, 0.0, margin}; }
  static LaunchPolicy fixed(double dbm) { return {Kind::fixed, dbm, 0.0}; }
};

struct ClassicalStatus {
  int channel{};
  double launch_dbm{};
  double link_loss_db{};
  double received_dbm{};
  double ber{};
  bool error_free{};
};

struct Provisioned {
  ChannelPlan plan;
  std::vector<ClassicalStatus> classical;

  [[nodiscard]] bool all_error_free() const {
    return std::all_of(classical.begin(), classical.end(), [](const auto& c) { return c.error_free; });
  }
};

/// Loss seen by a data channel: fiber plus its mux port at both ends.
inline LinkBudget data_link(const FiberSpec& fiber, const MuxModel& mux, int channel) {
  const double m = mux.loss(channel);
  return total_link_loss(fiber, {{"mux", m}, {"demux", m}});
}

/// Assigns launch powers to every data channel and re-checks each classical
/// link. A launch already set on an entry overrides the policy. Under the
/// adapted policy an unreachable link throws `InfeasibleLaunch`; fixed powers
/// that miss the receiver are reported, not thrown.
inline Provisioned provision(const ChannelPlan& plan, const FiberSpec& fiber, const MuxModel& mux,
                             const TransceiverSpec& transceiver, const LaunchPolicy& policy) {
  transceiver.validate();
  Provisioned out;
  out.plan = plan;
  for (auto& a : out.plan) {
    if (!is_data(a.role)) continue;
    const LinkBudget link = data_link(fiber, mux, a.channel.index);
    double launch = policy.launch_dbm;
    if (a.launch) {
      launch = a.launch->value;
    } else if (policy.kind == LaunchPolicy::Kind::adapted) {
      launch = adapt_launch_power(link, transceiver, policy.margin_db);
    }
    a.launch = Dbm{launch};
    ClassicalStatus s;
    s.channel = a.channel.index;
    s.launch_dbm = launch;
    s.link_loss_db = link.total_db;
    s.received_dbm = launch - link.total_db;
    s.ber = ber_at_power(s.received_dbm, transceiver);
    s.error_free = error_free(s.received_dbm, transceiver) && launch <= transceiver.max_launch_dbm;
    out.classical.push_back(s);
  }
  return out;
}

struct BandwidthPoint {
  int channels{};
  double secure_bps{};
  double qber_z{};
};

struct BandwidthSearch {
  int max_channels{};
  double aggregated_gbps{};
  std::vector<BandwidthPoint> curve;
  /// Noise does not grow with channel count; the result is the grid cap.
  bool noise_free{};
};

/// Scans equivalent channel counts 0..grid_max. `eval(n)` returns a
/// BandwidthPoint for n data channels. Feasibility is assumed monotone, so
/// the answer is the last n of the leading feasible run.
template <class Eval>
BandwidthSearch max_data_bandwidth(Eval&& eval, int grid_max, double per_channel_gbps, bool noise_free) {
  if (grid_max < 0) throw std::invalid_argument("bandwidth grid must be >= 0");
  BandwidthSearch out;
  out.noise_free = noise_free;
  for (int n = 0; n <= grid_max; ++n) {
    BandwidthPoint p = eval(n);
    p.channels = n;
    out.curve.push_back(p);
  }
  if (!(out.curve.front().secure_bps > 0.0)) {
    throw std::runtime_error("no key even without data channels");
  }
  int last = 0;
  while (last + 1 <= grid_max && out.curve[static_cast<std::size_t>(last + 1)].secure_bps > 0.0) ++last;
  out.max_channels = last;
  out.aggregated_gbps = last * per_channel_gbps;
  return out;
}

struct DistanceSearch {
  int km{};
  /// Still feasible at the upper search limit.
  bool capped{};
  int evaluations{};
};

/// Largest integer distance in [lo_km, hi_km] at which `feasible(km)` holds,
/// by bisection. Result r satisfies feasible(r) and !feasible(r + 1) unless
/// capped.
template <class Pred>
DistanceSearch max_distance(Pred&& feasible, int lo_km = 1, int hi_km = 300) {
  if (lo_km < 0 || hi_km < lo_km) throw std::invalid_argument("invalid distance search range");
  DistanceSearch out;
  auto check = [&](int km) {
    ++out.evaluations;
    return static_cast<bool>(feasible(km));
  };
  if (!check(lo_km)) throw std::runtime_error("infeasible at the minimum distance " + std::to_string(lo_km) + " km");
  if (check(hi_km)) {
    out.km = hi_km;
    out.capped = true;
    return out;
  }
  int good = lo_km;
  int bad = hi_km;
  while (bad - good > 1) {
    const int mid = good + (bad - good) / 2;
    (check(mid) ? good : bad) = mid;
  }
  out.km = good;
  return out;
}

}  // namespace qkdwdm
