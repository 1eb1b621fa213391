#pragma once

// 10 Gb/s OOK receiver model and launch-power adaptation.
//
// Thermal-noise-limited receiver: the Q factor scales linearly with received
// optical power and is pinned so that BER equals the target at the rated
// sensitivity.

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qkdwdm/linkmodel.hpp"

namespace qkdwdm {

struct TransceiverSpec {
  /// Received power at which BER equals `target_ber`.
  double sensitivity_dbm = -27.0;
  double max_launch_dbm = 4.0;
  double bitrate_gbps = 10.0;
  double target_ber = 1e-12;

  void validate() const {
    require_finite(sensitivity_dbm, "sensitivity");
    require_finite(max_launch_dbm, "max launch");
    if (!(sensitivity_dbm < max_launch_dbm)) throw std::invalid_argument("sensitivity must be below max launch");
    if (!(bitrate_gbps > 0.0)) throw std::invalid_argument("bitrate must be > 0");
    if (!(target_ber > 0.0 && target_ber < 0.5)) throw std::invalid_argument("target BER must be in (0, 0.5)");
  }
};

class InfeasibleLaunch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Q at which 0.5 erfc(Q / sqrt 2) equals `ber`.
inline double q_for_ber(double ber) { return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * ber); }

inline double ber_from_q(double q) { return 0.5 * std::erfc(q / std::numbers::sqrt2); }

inline double ber_at_power(double received_dbm, const TransceiverSpec& spec) {
  if (std::isinf(received_dbm) && received_dbm < 0.0) return 0.5;
  require_finite(received_dbm, "received power");
  const double q = q_for_ber(spec.target_ber) * std::pow(10.0, (received_dbm - spec.sensitivity_dbm) / 10.0);
  return ber_from_q(q);
}

inline bool error_free(double received_dbm, const TransceiverSpec& spec) {
  // erfc/erfc_inv round trip is good to a few ulp; do not let that move the
  // threshold.
  return ber_at_power(received_dbm, spec) <= spec.target_ber * (1.0 + 1e-9);
}

/// Minimum launch power giving error-free reception across `link`.
inline double adapt_launch_power(const LinkBudget& link, const TransceiverSpec& spec, double margin_db = 0.0) {
  spec.validate();
  if (!(margin_db >= 0.0)) throw std::invalid_argument("margin must be >= 0 dB");
  const double launch = spec.sensitivity_dbm + link.total_db + margin_db;
  if (launch > spec.max_launch_dbm) {
    throw InfeasibleLaunch("required launch " + std::to_string(launch) + " dBm exceeds max " +
                           std::to_string(spec.max_launch_dbm) + " dBm");
  }
  return launch;
}

}  // namespace qkdwdm
