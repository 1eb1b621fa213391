#include <gtest/gtest.h>

#include <cmath>

#include "qkdwdm/filterchain.hpp"

using namespace qkdwdm;

namespace {

FilterChain chain(std::vector<std::pair<double, double>> filters, double window_ps = 100.0) {
  FilterChain c;
  for (auto [fwhm, il] : filters) c.spectral.push_back({itu_channel(36), fwhm, il});
  c.gate = {window_ps, 1.0};
  return c;
}

}  // namespace

TEST(Tbp, LimitValue) { EXPECT_NEAR(tbp_limit, 2.0 * std::log(2.0) / M_PI, 1e-15); }

TEST(Tbp, Products) {
  EXPECT_NEAR(tbp(70, 100), 7.0, 1e-12);
  EXPECT_NEAR(tbp(15, 100), 1.5, 1e-12);
  EXPECT_NEAR(tbp(750, 100), 75.0, 1e-12);
  EXPECT_THROW(tbp(0, 100), std::invalid_argument);
  EXPECT_THROW(tbp(10, -1), std::invalid_argument);
}

TEST(Tbp, RatiosToLimit) {
  EXPECT_NEAR(tbp_feasible(70, 100).ratio_to_limit, 15.86, 0.01);
  EXPECT_NEAR(tbp_feasible(15, 100).ratio_to_limit, 3.40, 0.01);
  EXPECT_TRUE(tbp_feasible(70, 100).feasible);
  EXPECT_FALSE(tbp_feasible(1, 100).feasible);
}

TEST(Tbp, LimitedFilterSitsOnTheLimit) {
  for (double w : {50.0, 100.0, 333.0, 1000.0}) {
    const double f = tbp_limited_fwhm_ghz(w);
    EXPECT_NEAR(tbp(f, w), tbp_limit, 1e-12);
    EXPECT_TRUE(tbp_feasible(f * (1 + 1e-9), w).feasible);
  }
  EXPECT_NEAR(tbp_limited_fwhm_ghz(100), 4.413, 0.001);
}

TEST(Gate, Acceptance) {
  EXPECT_NEAR(temporal_acceptance({100, 1.0}), 0.1, 1e-15);
  EXPECT_NEAR(temporal_acceptance({1000, 1.0}), 1.0, 1e-15);
  EXPECT_NEAR(temporal_acceptance({50, 1.0}), 0.05, 1e-15);
  EXPECT_THROW(temporal_acceptance({2000, 1.0}), std::invalid_argument);
  EXPECT_THROW(temporal_acceptance({0, 1.0}), std::invalid_argument);
}

TEST(Chain, NarrowestAndLosses) {
  const auto c = chain({{70, 1.2}, {15, 5.0}});
  EXPECT_DOUBLE_EQ(c.net_fwhm_ghz(), 15.0);
  EXPECT_NEAR(c.insertion_loss_db(), 6.2, 1e-12);
  EXPECT_NEAR(c.transmittance(), std::pow(10.0, -0.62), 1e-15);
  // 15 GHz at 1548.5 nm is about 0.12 nm.
  EXPECT_NEAR(c.net_bandwidth_nm(), 0.12, 0.001);
}

TEST(Chain, OrderIndependent) {
  const auto a = chain({{70, 1.2}, {15, 5.0}, {40, 0.5}});
  const auto b = chain({{40, 0.5}, {70, 1.2}, {15, 5.0}});
  EXPECT_DOUBLE_EQ(a.net_fwhm_ghz(), b.net_fwhm_ghz());
  EXPECT_NEAR(a.insertion_loss_db(), b.insertion_loss_db(), 1e-12);
}

TEST(Chain, Validation) {
  EXPECT_THROW(chain({}).validate(), std::invalid_argument);
  EXPECT_THROW(chain({{-1, 1}}).validate(), std::invalid_argument);
  EXPECT_THROW(chain({{10, -1}}).validate(), std::invalid_argument);
}

TEST(Rejection, RelativeToReference) {
  EXPECT_NEAR(spectral_rejection(chain({{15, 5}}), 70).db, 6.69, 0.01);
  EXPECT_NEAR(spectral_rejection(tbp_ideal(chain({{70, 1.2}})), 70).db, 12.0, 0.05);
  EXPECT_NEAR(spectral_rejection(chain({{70, 1.2}}), 70).db, 0.0, 1e-12);
  const auto wider = spectral_rejection(chain({{100, 1}}), 70);
  EXPECT_LT(wider.db, 0.0);
  EXPECT_TRUE(wider.wider_than_reference);
}

TEST(Rejection, MonotoneInWidth) {
  double prev = INFINITY;
  for (double f = 1; f <= 100; f += 3) {
    const double r = spectral_rejection(chain({{f, 0}}), 70).db;
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(TbpIdeal, KeepsInsertionLoss) {
  const auto c = tbp_ideal(chain({{70, 1.2}, {15, 5.0}}));
  for (const auto& f : c.spectral) EXPECT_NEAR(f.fwhm_ghz, tbp_limited_fwhm_ghz(100), 1e-12);
  EXPECT_NEAR(c.insertion_loss_db(), 6.2, 1e-12);
  // Already narrower than the limit: left alone.
  EXPECT_DOUBLE_EQ(tbp_ideal(chain({{2, 0}})).net_fwhm_ghz(), 2.0);
}
