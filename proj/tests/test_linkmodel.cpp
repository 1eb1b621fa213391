#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "qkdwdm/linkmodel.hpp"

using namespace qkdwdm;

TEST(DbConversion, KnownValues) {
  EXPECT_DOUBLE_EQ(db_to_linear(0.0), 1.0);
  EXPECT_DOUBLE_EQ(db_to_linear(10.0), 10.0);
  EXPECT_NEAR(db_to_linear(3.0), 1.9952623149688795, 1e-15);
  EXPECT_THROW(db_to_linear(NAN), std::invalid_argument);
  EXPECT_THROW(db_to_linear(INFINITY), std::invalid_argument);
  EXPECT_THROW(linear_to_db(0.0), std::invalid_argument);
}

TEST(DbConversion, RoundTripOverRange) {
  for (double x = -100.0; x <= 30.0; x += 0.37) {
    EXPECT_NEAR(linear_to_db(db_to_linear(x)), x, 1e-12 * std::max(1.0, std::abs(x)));
    const Dbm p{x};
    EXPECT_NEAR(p.milliwatts().dbm().value, x, 1e-12 * std::max(1.0, std::abs(x)));
  }
}

TEST(Power, LinearPowerIsNonNegative) {
  EXPECT_THROW(Milliwatts(-1e-9), std::invalid_argument);
  EXPECT_DOUBLE_EQ(Dbm{0.0}.watts(), 1e-3);
  EXPECT_DOUBLE_EQ((Dbm{-14.0} + 3.0).value, -11.0);
}

TEST(ItuGrid, ChannelAssignments) {
  const auto q = itu_channel(36);
  EXPECT_NEAR(q.frequency_thz, 193.6, 1e-12);
  EXPECT_NEAR(q.wavelength_nm, 1548.52, 0.01);
  EXPECT_NEAR(itu_channel(34).frequency_thz, 193.4, 1e-12);
  EXPECT_NEAR(itu_channel(34).wavelength_nm, 1550.12, 0.01);
  EXPECT_NEAR(itu_channel(32).wavelength_nm, 1551.72, 0.01);
  EXPECT_NEAR(itu_channel(33).wavelength_nm, 1550.92, 0.01);
  EXPECT_NEAR(itu_channel(31).wavelength_nm, 1552.52, 0.01);
  EXPECT_NEAR(itu_channel(30).wavelength_nm, 1553.33, 0.01);
}

TEST(ItuGrid, WavelengthDecreasesWithIndex) {
  for (int i = 1; i < 72; ++i) {
    const double d = itu_channel(i).wavelength_nm - itu_channel(i + 1).wavelength_nm;
    EXPECT_GT(d, 0.0);
    EXPECT_NEAR(d, 0.8, 0.05);
  }
}

TEST(ItuGrid, RangeIsEnforced) {
  EXPECT_THROW(itu_channel(0), std::out_of_range);
  EXPECT_THROW(itu_channel(73), std::out_of_range);
  EXPECT_NO_THROW(itu_channel(80, GridLimits{1, 80}));
}

TEST(LinkBudget, Sums) {
  EXPECT_NEAR(total_link_loss(FiberSpec{50, 0.2}, {{"mux", 1.2}, {"demux", 1.2}}).total_db, 12.4, 1e-12);
  EXPECT_DOUBLE_EQ(total_link_loss(FiberSpec{0, 0.2}).total_db, 0.0);
  const auto b = total_link_loss(FiberSpec{70, 0.2});
  EXPECT_NEAR(b.total_db, 14.0, 1e-12);
  EXPECT_NEAR(b.fiber_loss_db, 14.0, 1e-12);
}

TEST(LinkBudget, PermutationInvariant) {
  const FiberSpec f{33, 0.21};
  const auto a = total_link_loss(f, {{"a", 0.72}, {"b", 1.54}, {"c", 5.0}});
  const auto b = total_link_loss(f, {{"c", 5.0}, {"a", 0.72}, {"b", 1.54}});
  EXPECT_NEAR(a.total_db, b.total_db, 1e-12);
  EXPECT_GE(a.total_db, a.fiber_loss_db);
  EXPECT_THROW(total_link_loss(f, {{"bad", -0.1}}), std::invalid_argument);
}

TEST(Fiber, Validation) {
  EXPECT_THROW(FiberSpec(-1, 0.2), std::invalid_argument);
  EXPECT_THROW(FiberSpec(10, 0.0), std::invalid_argument);
  const FiberSpec f{25, 0.2};
  EXPECT_NEAR(f.attenuation_linear(), 0.2 * std::log(10.0) / 10.0, 1e-15);
  EXPECT_NEAR(f.transmittance(), std::pow(10.0, -0.5), 1e-15);
}

TEST(PhotonFlux, OnePicowatt) {
  EXPECT_DOUBLE_EQ(photon_flux(0.0, 1548.52), 0.0);
  // E = h c / lambda, written out independently.
  const double e = 6.62607015e-34 * 299792458.0 / 1548.52e-9;
  EXPECT_NEAR(photon_flux(1e-12, 1548.52), 1e-12 / e, 1e-6);
  EXPECT_NEAR(photon_flux(1e-12, 1548.52), 7.79e6, 0.01e6);
  EXPECT_NEAR(photon_flux(Dbm{-90.0}, 1548.52), photon_flux(1e-12, 1548.52), 1e-3);
  EXPECT_THROW(photon_flux(1e-12, 0.0), std::invalid_argument);
}

TEST(PhotonFlux, Linear) {
  for (double p : {1e-15, 3.3e-12, 7e-9, 1e-3}) {
    const double one = photon_flux(p, 1550.0);
    EXPECT_NEAR(photon_flux(2.0 * p, 1550.0) / one, 2.0, 1e-12);
  }
}
