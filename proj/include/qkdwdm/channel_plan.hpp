#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qkdwdm/linkmodel.hpp"

namespace qkdwdm {

enum class Role { quantum, clock, data_co, data_counter };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::quantum: return "quantum";
    case Role::clock: return "clock";
    case Role::data_co: return "data_co";
    case Role::data_counter: return "data_counter";
  }
  return "?";
}

inline Role role_from_string(std::string_view s) {
  if (s == "quantum") return Role::quantum;
  if (s == "clock") return Role::clock;
  if (s == "data_co") return Role::data_co;
  if (s == "data_counter") return Role::data_counter;
  throw std::invalid_argument("unknown channel role '" + std::string(s) + "'");
}

inline bool is_data(Role r) { return r == Role::data_co || r == Role::data_counter; }

/// Sources travelling with the quantum signal (Alice -> Bob).
inline bool co_propagating(Role r) { return r == Role::data_co || r == Role::clock; }

struct ChannelAssignment {
  ItuChannel channel;
  Role role{};
  /// Launch power at the transmitter, before the mux. Empty for the quantum
  /// channel and for data channels awaiting provisioning.
  std::optional<Dbm> launch;
};

using ChannelPlan = std::vector<ChannelAssignment>;

inline const ChannelAssignment* find_quantum(const ChannelPlan& plan) {
  auto it = std::find_if(plan.begin(), plan.end(), [](const auto& a) { return a.role == Role::quantum; });
  return it == plan.end() ? nullptr : &*it;
}

inline int count_role(const ChannelPlan& plan, Role r) {
  return static_cast<int>(std::count_if(plan.begin(), plan.end(), [r](const auto& a) { return a.role == r; }));
}

inline int count_data(const ChannelPlan& plan) {
  return count_role(plan, Role::data_co) + count_role(plan, Role::data_counter);
}

inline ChannelPlan without_data(const ChannelPlan& plan) {
  ChannelPlan out;
  std::copy_if(plan.begin(), plan.end(), std::back_inserter(out), [](const auto& a) { return !is_data(a.role); });
  return out;
}

}  // namespace qkdwdm
