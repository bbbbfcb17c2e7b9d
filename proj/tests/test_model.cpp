#include <gtest/gtest.h>

#include <bit>
#include <random>

#include "biofilm/model.hpp"

using namespace biofilm;

namespace {

ProblemData compatible_data() {
  ProblemData d;
  d.phi = {[](double z) { return 1.0 + z; }};
  d.theta = {[](double z) { return 0.5 + 0.5 * z; }};
  d.psi = {[](double) { return 1.0; }};
  d.D = {1.0};
  d.lambda = 0.5;
  d.R0 = 1.0;
  return d;
}

KineticsModel single_monod(double mu, double K, double kd, std::vector<MonodConsumption> consumes = {}) {
  MonodParams p;
  p.substrates = 1;
  p.species = {{mu, K, kd, 0, std::move(consumes)}};
  return monod_preset(p);
}

}  // namespace

TEST(ValidateProblem, CompatibleDataIsAccepted) {
  const auto report = validate_problem(compatible_data(), zero_preset(1, 1));
  EXPECT_TRUE(report.ok);
  EXPECT_TRUE(report.violations.empty());
}

TEST(ValidateProblem, TraceMismatchIsAViolation) {
  auto d = compatible_data();
  d.theta = {[](double) { return 1.0; }};
  d.psi = {[](double) { return 0.9; }};
  const auto report = validate_problem(d, zero_preset(1, 1));
  EXPECT_FALSE(report.ok);
  EXPECT_TRUE(report.has_violation("COMPAT_MISMATCH"));
}

TEST(ValidateProblem, SignConditions) {
  auto d = compatible_data();
  d.lambda = 0.0;
  EXPECT_TRUE(validate_problem(d, zero_preset(1, 1)).has_violation("NONPOSITIVE_LAMBDA"));
  d = compatible_data();
  d.R0 = -1.0;
  EXPECT_TRUE(validate_problem(d, zero_preset(1, 1)).has_violation("NONPOSITIVE_R0"));
  d = compatible_data();
  d.D = {0.0};
  EXPECT_TRUE(validate_problem(d, zero_preset(1, 1)).has_violation("NONPOSITIVE_DIFFUSIVITY"));
}

TEST(ValidateProblem, ShapeAndFiniteness) {
  auto d = compatible_data();
  d.phi.push_back([](double) { return 0.0; });
  EXPECT_TRUE(validate_problem(d, zero_preset(1, 1)).has_violation("DIMENSION_MISMATCH"));
  d = compatible_data();
  d.theta = {SpatialField{}};
  EXPECT_TRUE(validate_problem(d, zero_preset(1, 1)).has_violation("MISSING_DATA"));
  d = compatible_data();
  d.phi = {[](double z) { return z > 0.5 ? std::nan("") : 1.0; }};
  EXPECT_TRUE(validate_problem(d, zero_preset(1, 1)).has_violation("NONFINITE_DATA"));
}

TEST(ValidateProblem, SecondOrderCompatibilityOnlyWarns) {
  // theta'' - 0 != psi' - 0 at the corner: regularity issue, not a blocker.
  auto d = compatible_data();
  d.theta = {[](double z) { return z * z; }};
  d.psi = {[](double t) { return 1.0 + t; }};
  const auto report = validate_problem(d, zero_preset(1, 1));
  EXPECT_TRUE(report.ok);
  EXPECT_TRUE(report.has_warning("SECOND_ORDER_COMPAT"));
}

TEST(ValidateProblem, NegativeInitialDataWarnsForQuasiPositiveKinetics) {
  auto d = compatible_data();
  d.phi = {[](double z) { return z - 0.5; }};
  const auto report = validate_problem(d, zero_preset(1, 1));
  EXPECT_TRUE(report.ok);
  EXPECT_TRUE(report.has_warning("NEGATIVE_INITIAL_DATA"));
}

TEST(MonodPreset, GrowthMinusDecay) {
  const auto kin = single_monod(2.0, 1.0, 0.5);
  const std::vector<double> Y{1.0}, C{1.0};
  const auto v = eval_kinetics(kin, Y, C);
  EXPECT_DOUBLE_EQ(v.f[0], 0.5);
}

TEST(MonodPreset, NoSubstrateMeansPureDecay) {
  const auto kin = single_monod(2.0, 1.0, 0.5);
  const std::vector<double> Y{3.0}, C{0.0};
  EXPECT_DOUBLE_EQ(eval_kinetics(kin, Y, C).f[0], -1.5);
}

TEST(MonodPreset, NoBiomassMeansNoReaction) {
  const auto kin = single_monod(2.0, 1.0, 0.5, {{0, 0.4}});
  const std::vector<double> Y{0.0}, C{2.0};
  const auto v = eval_kinetics(kin, Y, C);
  EXPECT_EQ(v.f[0], 0.0);
  EXPECT_EQ(v.h[0], 0.0);
  EXPECT_EQ(v.g, 0.0);
}

TEST(MonodPreset, ConsumptionScalesWithInverseYield) {
  const auto kin = single_monod(2.0, 1.0, 0.0, {{0, 0.5}});
  const std::vector<double> Y{1.0}, C{1.0};
  const auto v = eval_kinetics(kin, Y, C);
  EXPECT_DOUBLE_EQ(v.h[0], -2.0);
  EXPECT_DOUBLE_EQ(v.g, v.f[0]);
}

TEST(MonodPreset, RejectsBadParameters) {
  EXPECT_THROW(single_monod(-1.0, 1.0, 0.0), Error);
  EXPECT_THROW(single_monod(1.0, 0.0, 0.0), Error);
  EXPECT_THROW(single_monod(1.0, 1.0, -0.1), Error);
  EXPECT_THROW(single_monod(1.0, 1.0, 0.0, {{0, 0.0}}), Error);
  EXPECT_THROW(single_monod(1.0, 1.0, 0.0, {{3, 1.0}}), Error);
  try {
    single_monod(1.0, -2.0, 0.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::nonpositive_param);
  }
}

TEST(MonodPreset, QuasiPositivityFlag) {
  EXPECT_TRUE(single_monod(1.0, 1.0, 0.0).quasi_positive());
  EXPECT_FALSE(single_monod(1.0, 1.0, 0.1).quasi_positive());
  EXPECT_FALSE(single_monod(1.0, 1.0, 0.0, {{0, 1.0}}).quasi_positive());
}

TEST(LinearPreset, IdentityAction) {
  const auto kin = linear_preset({{-1.0, 0.0}, {0.0, -1.0}}, {{0.0}}, {0.0, 0.0}, {3.0});
  const std::vector<double> Y{1.0, 2.0}, C{5.0};
  const auto v = eval_kinetics(kin, Y, C);
  EXPECT_EQ(v.f, (std::vector<double>{-1.0, -2.0}));
  EXPECT_EQ(v.h, (std::vector<double>{3.0}));
  EXPECT_DOUBLE_EQ(v.g, -3.0);
}

TEST(LinearPreset, ShapeChecks) {
  EXPECT_THROW(linear_preset({{1.0, 0.0}}, {{0.0}}, {0.0}, {0.0}), Error);
  EXPECT_THROW(linear_preset({{1.0}}, {{0.0}}, {0.0, 1.0}, {0.0}), Error);
}

TEST(EvalKinetics, RejectsWrongSizesAndNonFiniteInput) {
  const auto kin = zero_preset(2, 1);
  const std::vector<double> one{1.0}, two{1.0, 2.0};
  try {
    eval_kinetics(kin, one, one);
    FAIL() << "expected a dimension error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
  const std::vector<double> bad{std::numeric_limits<double>::infinity(), 0.0};
  try {
    eval_kinetics(kin, bad, one);
    FAIL() << "expected a non-finite error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::nonfinite);
  }
  EXPECT_NO_THROW(eval_kinetics(kin, two, one));
}

TEST(EvalKinetics, IsPure) {
  const auto kin = single_monod(1.3, 0.7, 0.2, {{0, 0.9}});
  const std::vector<double> Y{0.123456789}, C{2.718281828};
  const auto a = eval_kinetics(kin, Y, C);
  const auto b = eval_kinetics(kin, Y, C);
  EXPECT_EQ(std::bit_cast<std::uint64_t>(a.f[0]), std::bit_cast<std::uint64_t>(b.f[0]));
  EXPECT_EQ(std::bit_cast<std::uint64_t>(a.h[0]), std::bit_cast<std::uint64_t>(b.h[0]));
  EXPECT_EQ(std::bit_cast<std::uint64_t>(a.g), std::bit_cast<std::uint64_t>(b.g));
}

// Every preset that claims quasi-positivity must honour it on random nonnegative samples.
TEST(QuasiPositivity, RandomSamplesOnTheOrthant) {
  MonodParams growth_only;
  growth_only.substrates = 2;
  growth_only.species = {{1.5, 0.3, 0.0, 0, {}}, {0.8, 2.0, 0.0, 1, {}}};
  const std::vector<KineticsModel> models{
      zero_preset(2, 2),
      monod_preset(growth_only),
      linear_preset({{0.0, 1.0}, {2.0, 0.5}}, {{0.1, 0.0}, {0.0, 0.0}}, {0.0, 1.0}, {0.5, 0.0}),
  };
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (const auto& kin : models) {
    ASSERT_TRUE(kin.quasi_positive()) << kin.name();
    std::vector<double> Y(kin.species()), C(kin.substrates());
    for (int s = 0; s < 10000; ++s) {
      for (double& y : Y) y = u(rng);
      for (double& c : C) c = u(rng);
      // Corners of the orthant matter most.
      if (s % 7 == 0) Y[s % Y.size()] = 0.0;
      if (s % 11 == 0) C[s % C.size()] = 0.0;
      const auto v = eval_kinetics(kin, Y, C);
      for (double f : v.f) ASSERT_GE(f, 0.0) << kin.name();
      for (double h : v.h) ASSERT_GE(h, 0.0) << kin.name();
    }
  }
}

TEST(QuasiPositivity, LinearFlagTracksSigns) {
  EXPECT_FALSE(linear_preset({{-1.0}}, {{0.0}}, {0.0}, {0.0}).quasi_positive());
  EXPECT_FALSE(linear_preset({{0.0}}, {{0.0}}, {0.0}, {-0.1}).quasi_positive());
  EXPECT_TRUE(linear_preset({{0.0}}, {{0.0}}, {0.0}, {0.0}).quasi_positive());
}
