#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "qkdwdm/harness/evaluate.hpp"
#include "qkdwdm/harness/scenario.hpp"

namespace qkdwdm {

using SimulationTable = std::vector<SimulationResult>;

/// Evaluates every sweep point on up to `jobs` threads. Rows come back sorted
/// by axis value whatever order the workers finish in. A scenario without an
/// axis yields a single row with axis value 0.
inline SimulationTable run_sweep(const Scenario& s, unsigned jobs = 1) {
  const std::vector<double> values = s.axis == SweepAxis::none ? std::vector<double>{0.0} : s.values;
  SimulationTable rows(values.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        rows[i] = evaluate_point(s, values[i], i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const unsigned n = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(values.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.axis_value < b.axis_value; });
  return rows;
}

}  // namespace qkdwdm
