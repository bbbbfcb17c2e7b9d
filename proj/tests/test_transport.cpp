#include <gtest/gtest.h>

#include <cmath>

#include "biofilm/transport.hpp"

using namespace biofilm;

namespace {

TransportSource constant_source(double c) {
  return [c](double, SourceStage, std::span<double> out) { std::fill(out.begin(), out.end(), c); };
}

}  // namespace

TEST(CharacteristicFoot, StationaryWhenVelocityVanishes) {
  const auto foot = characteristic_foot(0.37, {0.0, 0.0, 0.5});
  EXPECT_EQ(foot.z, 0.37);
  EXPECT_FALSE(foot.clamped);
}

TEST(CharacteristicFoot, ClosedFormExponential) {
  const auto foot = characteristic_foot(0.5, {1.0, 1.0, 0.1});
  EXPECT_NEAR(foot.z, 0.5 * std::exp(0.1), 1e-15);
  EXPECT_NEAR(foot.z, 0.552585, 1e-6);
  EXPECT_FALSE(foot.clamped);
}

TEST(CharacteristicFoot, ClampedAtTheSurface) {
  const auto foot = characteristic_foot(0.99, {1.0, 1.0, 0.1});
  EXPECT_EQ(foot.z, 1.0);
  EXPECT_TRUE(foot.clamped);
}

TEST(CharacteristicFoot, UnscaledVariantShiftsRigidly) {
  const auto foot = characteristic_foot(0.5, {-1.0, -1.0, 0.1}, TransportCoefficient::unscaled);
  EXPECT_NEAR(foot.z, 0.4, 1e-15);
  const auto low = characteristic_foot(0.05, {-1.0, -1.0, 0.1}, TransportCoefficient::unscaled);
  EXPECT_EQ(low.z, 0.0);
  EXPECT_TRUE(low.clamped);
}

TEST(CharacteristicFoot, RejectsBadSegments) {
  EXPECT_THROW(characteristic_foot(0.5, {0.0, 0.0, 0.0}), Error);
  EXPECT_THROW(characteristic_foot(0.5, {std::nan(""), 0.0, 0.1}), Error);
}

TEST(TransportStep, IdentityWithoutSourceOrFlow) {
  const Grid g(20);
  const std::vector<Profile> Y{Profile::sample(g, [](double z) { return std::sin(5 * z) + 2; })};
  const auto out = transport_step(Y, constant_source(0.0), {0.0, 0.0, 0.1});
  EXPECT_EQ(out.Y[0], Y[0]);
  EXPECT_EQ(out.diagnostics.clamped_feet, 0u);
}

TEST(TransportStep, ConstantSourceAddsLinearly) {
  const Grid g(10);
  const std::vector<Profile> Y{Profile::sample(g, [](double z) { return z * z; })};
  const auto out = transport_step(Y, constant_source(3.0), {0.0, 0.0, 0.25});
  for (std::size_t k = 0; k < g.nodes(); ++k) EXPECT_NEAR(out.Y[0][k], Y[0][k] + 0.75, 1e-15);
}

TEST(TransportStep, AdvectsAffineDataExactly) {
  const Grid g(40);
  const std::vector<Profile> Y{Profile::sample(g, [](double z) { return z; })};
  const auto out = transport_step(Y, constant_source(0.0), {1.0, 1.0, 0.1});
  for (std::size_t k = 0; k < g.nodes(); ++k) {
    EXPECT_NEAR(out.Y[0][k], std::min(g.node(k) * std::exp(0.1), 1.0), 1e-14);
  }
  EXPECT_NEAR(out.Y[0][20], 0.552585, 1e-6);
  EXPECT_GT(out.diagnostics.clamped_feet, 0u);
}

TEST(TransportStep, SpeciesMustShareAGrid) {
  const std::vector<Profile> Y{Profile(Grid(10)), Profile(Grid(12))};
  EXPECT_THROW(transport_step(Y, constant_source(0.0), {0.0, 0.0, 0.1}), Error);
}

TEST(TransportProperty, NonnegativeSourcesKeepBiomassNonnegative) {
  const Grid g(64);
  std::vector<Profile> Y{Profile::sample(g, [](double z) { return std::max(0.0, std::sin(12 * z)); }),
                         Profile::sample(g, [](double z) { return z < 0.3 ? 0.0 : 1.0; })};
  // Sampler returns F >= 0 whenever Y >= 0.
  const TransportSource src = [&](double z, SourceStage, std::span<double> out) {
    out[0] = 0.3 * interp_linear(Y[0], z);
    out[1] = 0.0;
  };
  for (double v1 : {-2.0, -0.4, 0.0, 0.7, 3.0}) {
    for (int step = 0; step < 20; ++step) {
      auto next = transport_step(Y, src, {v1, v1 * 0.9, 0.05});
      Y = std::move(next.Y);
      for (const auto& y : Y) ASSERT_GE(min_value(y), 0.0);
    }
  }
}

TEST(TransportProperty, PureAdvectionRespectsTheMaximumPrinciple) {
  const Grid g(50);
  const std::vector<Profile> Y{Profile::sample(g, [](double z) { return std::cos(7 * z) + 0.2 * z; })};
  const double lo = min_value(Y[0]);
  const double hi = max_value(Y[0]);
  for (double v1 : {-3.0, -0.5, 0.5, 3.0}) {
    const auto out = transport_step(Y, constant_source(0.0), {v1, -v1 * 0.5, 0.2});
    EXPECT_GE(min_value(out.Y[0]), lo);
    EXPECT_LE(max_value(out.Y[0]), hi);
  }
}

// ||F|| <= L ||Y|| + c0 gives ||Y(t)|| <= e^{Lt} (||phi|| + t c0).
TEST(TransportProperty, GronwallBound) {
  const Grid g(40);
  const std::vector<std::vector<double>> A{{0.5, 0.3}, {0.2, 0.4}};
  const double L = 0.8;
  const std::vector<double> c{0.2, 0.1};
  const double c0 = 0.2;
  std::vector<Profile> Y{Profile::sample(g, [](double z) { return 1.0 + z; }),
                         Profile::sample(g, [](double z) { return 0.5 * std::cos(3 * z) + 0.5; })};
  const double phi_norm = std::max(sup_norm(Y[0]), sup_norm(Y[1]));

  const double dt = 0.01;
  const double v1 = 0.3;
  double t = 0.0;
  for (int step = 0; step < 200; ++step) {
    const auto old = Y;
    auto rates = [&](const std::vector<Profile>& at, double z, std::span<double> out) {
      const double y0 = interp_linear(at[0], z);
      const double y1 = interp_linear(at[1], z);
      out[0] = A[0][0] * y0 + A[0][1] * y1 + c[0];
      out[1] = A[1][0] * y0 + A[1][1] * y1 + c[1];
    };
    // Predictor with the end-stage source frozen at the old state, then one correction.
    std::vector<Profile> guess = old;
    for (int sweep = 0; sweep < 2; ++sweep) {
      const TransportSource src = [&](double z, SourceStage stage, std::span<double> out) {
        rates(stage == SourceStage::start ? old : guess, z, out);
      };
      guess = transport_step(old, src, {v1, v1, dt}).Y;
    }
    Y = std::move(guess);
    t += dt;
    const double norm = std::max(sup_norm(Y[0]), sup_norm(Y[1]));
    ASSERT_LE(norm, 1.1 * std::exp(L * t) * (phi_norm + t * c0)) << "t = " << t;
  }
}
