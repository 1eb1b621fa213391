#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "qkdwdm/raman.hpp"

using namespace qkdwdm;

namespace {

// Classic RK4 on a scalar ODE y' = f(z, y), y(0) = 0, over [0, L].
double rk4(const std::function<double(double, double)>& f, double L, int steps) {
  const double h = L / steps;
  double y = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double z = i * h;
    const double k1 = f(z, y);
    const double k2 = f(z + h / 2, y + h / 2 * k1);
    const double k3 = f(z + h / 2, y + h / 2 * k2);
    const double k4 = f(z + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return y;
}

double alpha_per_km(double db_per_km) { return db_per_km * std::log(10.0) / 10.0; }

}  // namespace

class RamanOracle : public ::testing::TestWithParam<std::tuple<double, double>> {};

TEST_P(RamanOracle, ForwardMatchesPropagationEquation) {
  const auto [att, L] = GetParam();
  const double a = alpha_per_km(att);
  const double p0 = 1e-3, rho = 4.2e-9, dl = 0.56;
  // Scattered light grows from the local pump and decays at the fiber loss.
  const double ode = rk4([&](double z, double ps) { return -a * ps + rho * dl * p0 * std::exp(-a * z); }, L, 4000);
  const double model = forward_raman_power(p0, FiberSpec{L, att}, rho, dl);
  EXPECT_NEAR(model / ode, 1.0, 1e-9);
}

TEST_P(RamanOracle, BackwardMatchesPropagationEquation) {
  const auto [att, L] = GetParam();
  const double a = alpha_per_km(att);
  const double p0 = 1e-3, rho = 4.2e-9, dl = 0.56;
  // Light scattered at z travels back z km to the launch end.
  const double ode = rk4([&](double z, double) { return rho * dl * p0 * std::exp(-2 * a * z); }, L, 4000);
  const double model = backward_raman_power(p0, FiberSpec{L, att}, rho, dl);
  EXPECT_NEAR(model / ode, 1.0, 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Spans, RamanOracle,
                         ::testing::Combine(::testing::Values(0.15, 0.2, 0.25),
                                            ::testing::Values(10.0, 25.0, 50.0, 75.0, 100.0)));

TEST(Raman, ZeroLengthGivesZero) {
  EXPECT_DOUBLE_EQ(forward_raman_power(1e-3, FiberSpec{0, 0.2}, 1e-9, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(backward_raman_power(1e-3, FiberSpec{0, 0.2}, 1e-9, 0.5), 0.0);
}

TEST(Raman, BackwardSaturates) {
  const FiberSpec far{2000, 0.2};
  const double limit = 1e-3 * 1e-9 * 0.5 / (2 * far.attenuation_linear());
  EXPECT_NEAR(backward_raman_power(1e-3, far, 1e-9, 0.5) / limit, 1.0, 1e-12);
}

TEST(Raman, LosslessLimitIsLinearInLength) {
  const FiberSpec nearly_lossless{40, 1e-9};
  EXPECT_NEAR(backward_raman_power(1e-3, nearly_lossless, 1e-9, 0.5) / (1e-3 * 1e-9 * 0.5 * 40), 1.0, 1e-6);
  EXPECT_NEAR(forward_raman_power(1e-3, nearly_lossless, 1e-9, 0.5) / (1e-3 * 1e-9 * 0.5 * 40), 1.0, 1e-6);
}

TEST(Raman, ForwardPeaksAtOneOverAlpha) {
  const double att = 0.2;
  const double peak = 1.0 / alpha_per_km(att);
  const double at_peak = forward_raman_power(1e-3, FiberSpec{peak, att}, 1e-9, 0.5);
  for (double dL : {-5.0, -1.0, 1.0, 5.0}) {
    EXPECT_LT(forward_raman_power(1e-3, FiberSpec{peak + dL, att}, 1e-9, 0.5), at_peak);
  }
}

TEST(Raman, BackwardExceedsForwardAtLongReach) {
  for (double L : {20.0, 50.0, 75.0, 100.0}) {
    const FiberSpec f{L, 0.2};
    EXPECT_GE(backward_raman_power(1e-3, f, 1e-9, 0.5), forward_raman_power(1e-3, f, 1e-9, 0.5));
  }
}

TEST(Raman, LinearInPumpDensityAndBandwidth) {
  const FiberSpec f{37, 0.21};
  const double base = forward_raman_power(1e-3, f, 2e-9, 0.3);
  EXPECT_NEAR(forward_raman_power(3e-3, f, 2e-9, 0.3) / base, 3.0, 1e-12);
  EXPECT_NEAR(forward_raman_power(1e-3, f, 6e-9, 0.3) / base, 3.0, 1e-12);
  EXPECT_NEAR(forward_raman_power(1e-3, f, 2e-9, 0.9) / base, 3.0, 1e-12);
  const double back = backward_raman_power(1e-3, f, 2e-9, 0.3);
  EXPECT_NEAR(backward_raman_power(2e-3, f, 2e-9, 0.3) / back, 2.0, 1e-12);
}

TEST(Raman, RejectsBadArguments) {
  const FiberSpec f{10, 0.2};
  EXPECT_THROW(forward_raman_power(-1e-3, f, 1e-9, 0.5), std::invalid_argument);
  EXPECT_THROW(forward_raman_power(1e-3, f, -1e-9, 0.5), std::invalid_argument);
  EXPECT_THROW(backward_raman_power(1e-3, f, 1e-9, NAN), std::invalid_argument);
}

TEST(Crosstalk, KnownValues) {
  EXPECT_NEAR(crosstalk_leakage(1e-3, 80.0), 1e-11, 1e-24);
  EXPECT_NEAR(crosstalk_leakage(1e-3, 43.0), 5.0118723362727e-8, 1e-19);
  EXPECT_DOUBLE_EQ(crosstalk_leakage(1e-3, 0.0), 1e-3);
  EXPECT_THROW(crosstalk_leakage(1e-3, -1.0), std::invalid_argument);
}

TEST(Isolation, AdjacencyAndOverrides) {
  IsolationModel iso;
  EXPECT_DOUBLE_EQ(iso.isolation_db(35, 36), 43.0);
  EXPECT_DOUBLE_EQ(iso.isolation_db(37, 36), 43.0);
  EXPECT_DOUBLE_EQ(iso.isolation_db(34, 36), 77.0);
  iso.overrides_db[34] = 90.0;
  EXPECT_DOUBLE_EQ(iso.isolation_db(34, 36), 90.0);
}

namespace {

ChannelPlan pair_plan(double launch_dbm) {
  return {{itu_channel(36), Role::quantum, {}},
          {itu_channel(32), Role::data_co, Dbm{launch_dbm}},
          {itu_channel(33), Role::data_counter, Dbm{launch_dbm}}};
}

}  // namespace

TEST(AggregateNoise, SumOfIndependentSources) {
  const RamanProfile prof{5e-9, RamanProfile::default_shape()};
  const FiberSpec f{50, 0.2};
  const auto q = itu_channel(36);
  const auto both = aggregate_noise(pair_plan(-14), q, f, prof, 0.56);
  ASSERT_EQ(both.items.size(), 2u);
  double sum = 0.0;
  for (const auto& a : pair_plan(-14)) {
    if (a.role == Role::quantum) continue;
    sum += aggregate_noise({a}, q, f, prof, 0.56).total_w();
  }
  EXPECT_NEAR(both.total_w() / sum, 1.0, 1e-12);
}

TEST(AggregateNoise, LinearInLaunchPower) {
  const RamanProfile prof{5e-9, RamanProfile::default_shape()};
  const FiberSpec f{50, 0.2};
  const double a = aggregate_noise(pair_plan(-14), itu_channel(36), f, prof, 0.56).total_w();
  const double b = aggregate_noise(pair_plan(-4), itu_channel(36), f, prof, 0.56).total_w();
  EXPECT_NEAR(b / a, 10.0, 1e-12);
}

TEST(AggregateNoise, TermsMatchClosedForms) {
  const RamanProfile prof{5e-9, RamanProfile::default_shape()};
  const FiberSpec f{50, 0.2};
  MuxModel mux;
  mux.channel_loss_db = {{32, 1.5}, {33, 1.5}};
  const auto q = itu_channel(36);
  const auto n = aggregate_noise(pair_plan(-14), q, f, prof, 0.56, mux);
  const double pump = Dbm{-15.5}.watts();
  const double rho = prof.density(itu_channel(32).wavelength_nm - q.wavelength_nm);
  EXPECT_NEAR(n.items[0].in_band_power_w / forward_raman_power(pump, f, rho, 0.56), 1.0, 1e-12);
  EXPECT_NEAR(n.items[0].crosstalk_power_w / crosstalk_leakage(pump * f.transmittance(), 77.0), 1.0, 1e-12);
  EXPECT_EQ(n.items[1].direction, Direction::counter);
  EXPECT_DOUBLE_EQ(n.items[1].crosstalk_power_w, 0.0);
  EXPECT_NEAR(n.scaled_total_w(2.0) / n.total_w(), 2.0, 1e-12);
}

TEST(AggregateNoise, RejectsMissingLaunchAndCollisions) {
  const RamanProfile prof;
  const FiberSpec f{10, 0.2};
  ChannelPlan p = pair_plan(0);
  p[1].launch.reset();
  EXPECT_THROW(aggregate_noise(p, itu_channel(36), f, prof, 0.5), std::invalid_argument);
  ChannelPlan clash{{itu_channel(36), Role::clock, Dbm{-30}}};
  EXPECT_THROW(aggregate_noise(clash, itu_channel(36), f, prof, 0.5), std::invalid_argument);
}

TEST(RamanProfile, ShapeInterpolation) {
  const RamanProfile prof{2.0, RamanProfile::default_shape()};
  EXPECT_DOUBLE_EQ(prof.shape_factor(0.0), 0.5);
  EXPECT_DOUBLE_EQ(prof.shape_factor(7.0), 0.75);
  EXPECT_DOUBLE_EQ(prof.shape_factor(-20.0), 1.0);
  EXPECT_DOUBLE_EQ(prof.density(7.0), 1.5);
  EXPECT_THROW(RamanProfile(1.0, {{1.0, 1.0}, {1.0, 2.0}}), std::invalid_argument);
  EXPECT_THROW(RamanProfile(-1.0, RamanProfile::default_shape()), std::invalid_argument);
}

TEST(RamanProfile, TableParsing) {
  std::istringstream in("# detuning g\n-5, 0.9\n\n0 0.4  # center\n5 0.9\n");
  const auto knots = parse_raman_table(in);
  ASSERT_EQ(knots.size(), 3u);
  EXPECT_DOUBLE_EQ(knots[1].first, 0.0);
  EXPECT_DOUBLE_EQ(knots[1].second, 0.4);
  std::istringstream bad("1\n");
  EXPECT_THROW(parse_raman_table(bad), std::invalid_argument);
  std::istringstream extra("1 2 3\n");
  EXPECT_THROW(parse_raman_table(extra), std::invalid_argument);
}
