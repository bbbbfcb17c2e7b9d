#pragma once

// Reference problems shared by the unit suites and the acceptance runner.

#include <cmath>
#include <numbers>

#include "biofilm/coupler.hpp"

namespace biofilm::testing {

inline ProblemData single_substrate_data(SpatialField phi, SpatialField theta, BoundarySignal psi, double lambda,
                                         double R0, double D = 1.0) {
  ProblemData d;
  d.phi = {std::move(phi)};
  d.theta = {std::move(theta)};
  d.psi = {std::move(psi)};
  d.D = {D};
  d.lambda = lambda;
  d.R0 = R0;
  return d;
}

inline double cos_mode(double z) { return std::cos(0.5 * std::numbers::pi * z); }

/// Pure detachment: no reactions, R obeys dR/dt = -lambda R^4.
inline ProblemData decay_data() {
  return single_substrate_data([](double) { return 0.5; }, cos_mode, [](double) { return 0.0; }, 0.5, 1.0);
}

/// A = B = -I, c = d = 0.
inline KineticsModel dissipative_linear() { return linear_preset({{-1.0}}, {{-1.0}}, {0.0}, {0.0}); }

/// Linear reference used for the contraction calibration.
inline ProblemData linear_reference_data() {
  return single_substrate_data([](double z) { return 1.0 + 0.5 * z; }, cos_mode, [](double) { return 0.0; }, 0.5,
                               1.0);
}

/// Biomass-free data for the energy envelope: the surface velocity vanishes identically.
inline ProblemData envelope_reference_data() {
  return single_substrate_data([](double) { return 0.0; }, cos_mode, [](double) { return 0.0; }, 0.5, 1.0);
}

/// One species growing on one substrate, with decay and consumption.
inline KineticsModel monod_reference() {
  MonodParams p;
  p.substrates = 1;
  p.species = {{1.0, 0.5, 0.05, 0, {{0, 0.5}}}};
  return monod_preset(p);
}

inline ProblemData monod_reference_data(double phi_shift = 0.0) {
  return single_substrate_data([phi_shift](double z) { return 0.2 + phi_shift * 0.5 * (1.0 + z); },
                               [](double) { return 1.0; }, [](double) { return 1.0; }, 1.0, 1.0);
}

/// Fast growth on a coarse grid, for forcing the fixed-point iteration out of its contraction regime.
inline KineticsModel stiff_monod() {
  MonodParams p;
  p.substrates = 1;
  p.species = {{5.0, 0.5, 0.0, 0, {{0, 0.5}}}};
  return monod_preset(p);
}

inline ProblemData stiff_monod_data() {
  return single_substrate_data([](double) { return 1.0; }, [](double) { return 1.0; }, [](double) { return 1.0; },
                               1.0, 1.0);
}

/// Biomass relaxes to y_star, and g = lambda + (y_star - Y) so int g tends to lambda:
/// the thickness settles where v1 = lambda R^2.
inline KineticsModel relaxation_kinetics(double lambda, double y_star) {
  return KineticsModel(
      1, 1,
      [=](std::span<const double> Y, std::span<const double>, std::span<double> out) { out[0] = y_star - Y[0]; },
      [](std::span<const double>, std::span<const double> C, std::span<double> out) { out[0] = -C[0]; },
      [=](std::span<const double> Y, std::span<const double>) { return lambda + y_star - Y[0]; }, false, 1.0,
      "relaxation");
}

inline ProblemData relaxation_data(double lambda) {
  return single_substrate_data([](double z) { return 1.5 - 0.3 * z * z; }, [](double) { return 1.0; },
                               [](double) { return 1.0; }, lambda, 1.0);
}

/// Largest sup distance between two trajectories' final states over Y, C and R.
inline double final_distance(const Trajectory& a, const Trajectory& b) {
  const auto& x = a.states.back();
  const auto& y = b.states.back();
  double d = std::abs(x.R - y.R);
  for (std::size_t i = 0; i < x.Y.size(); ++i) d = std::max(d, sup_distance(x.Y[i], y.Y[i]));
  for (std::size_t j = 0; j < x.C.size(); ++j) d = std::max(d, sup_distance(x.C[j], y.C[j]));
  return d;
}

/// Run-averaged contraction ratio over all steps of a trajectory.
inline double mean_contraction(const Trajectory& traj) {
  double sum = 0.0;
  for (const auto& r : traj.reports) sum += r.contraction_ratio;
  return traj.reports.empty() ? 0.0 : sum / static_cast<double>(traj.reports.size());
}

}  // namespace biofilm::testing
