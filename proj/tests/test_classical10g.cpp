#include <gtest/gtest.h>

#include <cmath>

#include "qkdwdm/classical10g.hpp"

using namespace qkdwdm;

namespace {

// Q with 0.5 erfc(Q / sqrt 2) = ber, by bisection on the standard library erfc.
double q_by_bisection(double ber) {
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(mid / std::sqrt(2.0)) > ber ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(QFactor, MatchesBisection) {
  for (double ber : {1e-3, 1e-9, 1e-12, 1e-15}) {
    EXPECT_NEAR(q_for_ber(ber), q_by_bisection(ber), 1e-9);
  }
  EXPECT_NEAR(q_for_ber(1e-12), 7.034, 0.001);
  EXPECT_NEAR(ber_from_q(q_for_ber(1e-12)), 1e-12, 1e-21);
}

TEST(Ber, AtSensitivity) {
  const TransceiverSpec t;
  EXPECT_NEAR(ber_at_power(-27.0, t) / 1e-12, 1.0, 1e-9);
  EXPECT_TRUE(error_free(-27.0, t));
  EXPECT_FALSE(error_free(-30.0, t));
  EXPECT_TRUE(error_free(-20.0, t));
  EXPECT_FALSE(error_free(-27.01, t));
  EXPECT_DOUBLE_EQ(ber_at_power(-INFINITY, t), 0.5);
}

TEST(Ber, MonotoneInReceivedPower) {
  const TransceiverSpec t;
  double prev = 1.0;
  for (double p = -40.0; p <= -20.0; p += 0.5) {
    const double b = ber_at_power(p, t);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(Adapt, MinimumLaunch) {
  const TransceiverSpec t;
  // 50 km at 0.2 dB/km plus 1.5 dB ports at both ends.
  const auto link = total_link_loss(FiberSpec{50, 0.2}, {{"mux", 1.5}, {"demux", 1.5}});
  EXPECT_NEAR(link.total_db, 13.0, 1e-12);
  const double launch = adapt_launch_power(link, t);
  EXPECT_NEAR(launch, -14.0, 1e-12);
  EXPECT_TRUE(error_free(launch - link.total_db, t));
  EXPECT_FALSE(error_free(launch - 0.1 - link.total_db, t));
  EXPECT_NEAR(adapt_launch_power(link, t, 2.0), -12.0, 1e-12);
}

TEST(Adapt, InfeasibleBeyondMaxLaunch) {
  TransceiverSpec t;
  t.max_launch_dbm = 0.0;
  const auto link = total_link_loss(FiberSpec{175, 0.2});
  EXPECT_THROW(adapt_launch_power(link, t), InfeasibleLaunch);
  EXPECT_THROW(adapt_launch_power(link, t, -1.0), std::invalid_argument);
}

TEST(Transceiver, Validation) {
  TransceiverSpec t;
  t.sensitivity_dbm = 5.0;
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t = {};
  t.target_ber = 0.0;
  EXPECT_THROW(t.validate(), std::invalid_argument);
}
