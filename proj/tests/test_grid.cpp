#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "biofilm/grid.hpp"

using namespace biofilm;

TEST(Grid, UniformNodes) {
  const Grid g = build_grid(4);
  EXPECT_EQ(g.nodes(), 5u);
  EXPECT_EQ(g.coordinates(), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
}

TEST(Grid, LastNodeIsExactlyOne) {
  for (std::size_t n : {7u, 13u, 100u, 333u}) EXPECT_EQ(Grid(n).node(n), 1.0);
}

TEST(Grid, TooCoarse) {
  try {
    build_grid(3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::too_coarse);
    EXPECT_EQ(std::string(e.what()).rfind("TOO_COARSE", 0), 0u);
  }
}

TEST(Profile, RejectsBadValues) {
  EXPECT_THROW(Profile(Grid(4), std::vector<double>(4, 0.0)), Error);
  std::vector<double> v(5, 0.0);
  v[2] = std::nan("");
  EXPECT_THROW(Profile(Grid(4), v), Error);
}

TEST(Cumtrapz, ConstantIntegrand) {
  const Grid g(10);
  const auto out = cumtrapz(Profile(g, 1.0));
  for (std::size_t k = 0; k <= 10; ++k) EXPECT_NEAR(out[k], k / 10.0, 1e-15);
}

TEST(Cumtrapz, ExactOnLinear) {
  for (std::size_t n : {4u, 9u, 64u}) {
    const Grid g(n);
    const auto out = cumtrapz(Profile::sample(g, [](double z) { return z; }));
    EXPECT_NEAR(out.back(), 0.5, 1e-15);
  }
}

TEST(Cumtrapz, ZeroIntegrand) {
  const auto out = cumtrapz(Profile(Grid(8), 0.0));
  EXPECT_EQ(sup_norm(out), 0.0);
}

TEST(Cumtrapz, IsLinear) {
  const Grid g(37);
  std::mt19937 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> p(g.nodes()), q(g.nodes()), mix(g.nodes());
  const double a = 1.7, b = -0.3;
  for (std::size_t k = 0; k < g.nodes(); ++k) {
    p[k] = n(rng);
    q[k] = n(rng);
    mix[k] = a * p[k] + b * q[k];
  }
  const auto lp = cumtrapz(Profile(g, p));
  const auto lq = cumtrapz(Profile(g, q));
  const auto lm = cumtrapz(Profile(g, mix));
  for (std::size_t k = 0; k < g.nodes(); ++k) EXPECT_NEAR(lm[k], a * lp[k] + b * lq[k], 1e-13);
}

TEST(Cumtrapz, NonnegativeIntegrandGivesNondecreasingOutput) {
  const Grid g(50);
  const auto out = cumtrapz(Profile::sample(g, [](double z) { return std::abs(std::sin(9.0 * z)); }));
  for (std::size_t k = 1; k < g.nodes(); ++k) EXPECT_GE(out[k], out[k - 1]);
}

TEST(Cumtrapz, SecondOrderOnSmoothIntegrand) {
  double prev = 0.0;
  for (std::size_t n : {10u, 20u, 40u, 80u}) {
    const double err = std::abs(trapz(Profile::sample(Grid(n), [](double z) { return z * z; })) - 1.0 / 3.0);
    // Trapezoid error on z^2 is exactly h^2/6.
    EXPECT_NEAR(err, 1.0 / (6.0 * n * n), 1e-14);
    if (prev > 0.0) {
      EXPECT_NEAR(prev / err, 4.0, 1e-6);
    }
    prev = err;
  }
}

TEST(Interp, ExactAtNodes) {
  const Grid g(16);
  const auto p = Profile::sample(g, [](double z) { return std::exp(z) * std::cos(3 * z); });
  for (std::size_t k = 0; k < g.nodes(); ++k) EXPECT_EQ(interp_linear(p, g.node(k)), p[k]);
  EXPECT_EQ(interp_linear(p, 0.5), p[8]);
}

TEST(Interp, ReproducesAffineFunctions) {
  for (std::size_t n : {4u, 7u, 30u}) {
    const auto p = Profile::sample(Grid(n), [](double z) { return 2.0 * z; });
    EXPECT_NEAR(interp_linear(p, 0.3), 0.6, 1e-15);
  }
}

TEST(Interp, OutsideTheDomain) {
  const Profile p(Grid(4), 1.0);
  try {
    interp_linear(p, 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::out_of_domain);
  }
  EXPECT_THROW(interp_linear(p, -0.01), Error);
  EXPECT_NO_THROW(interp_linear(p, 1.0 + 1e-14));
}
