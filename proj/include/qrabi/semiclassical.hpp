#pragma once

#include <array>
#include <span>
#include <vector>

#include "qrabi/model.hpp"

namespace qrabi {

// Kinetic-energy-free picture: at each displacement x the qubit sees the 2x2
// matrix [[e+(x), Omega/2], [Omega/2, e-(x)]] with
// e+-(x) = (omega/2)(1 +- g2/g_T) x^2 + 4 a4 x^4.

std::array<double, 4> semiclassical_matrix(const ModelParams& params, double x);

/// Lower eigenvalue epsilon(x) = [omega x^2 + 8 a4 x^4 - sqrt(Omega^2 + (g2/g_T)^2 omega^2 x^4)] / 2.
double lower_branch(const ModelParams& params, double x);
double lower_branch_slope(const ModelParams& params, double x);

/// <sigma_x> in the lower eigenvector of the 2x2 matrix at x.
double branch_sigma_x(const ModelParams& params, double x);

struct SemiclassicalSolution {
  double x_min = 0.0;
  double energy_min = 0.0;
  double energy_origin = 0.0;
  double sigma_x_at_min = -1.0;
  bool symmetric_phase = true;
};

/// Global minimum of epsilon over x >= 0: coarse scan, then bisection on the
/// slope around every interior local minimum of the scan. Throws
/// InstabilityError when a4 = 0 and g2 > g_T.
SemiclassicalSolution minimize_branch(const ModelParams& params);

/// Scaled parameters (omega = Omega = 1, a4 = alpha4) with g2/g_T = ratio.
/// The branch depends on the physical parameters only through these two
/// numbers up to an overall energy scale.
ModelParams scaled_params(double alpha4, double ratio);

/// Closed-form critical ratio g2c/g_T. Intermediate values are complex when
/// 54 alpha4 < 1; the result is checked to be real. Throws ConfigError for
/// negative alpha4.
double critical_ratio_exact(double alpha4);
/// Small-alpha4 expansion sqrt(1 + 8 sqrt(2 alpha4) + 24 alpha4).
double critical_ratio_small(double alpha4);
/// Large-alpha4 expansion; alpha4 must be positive.
double critical_ratio_large(double alpha4);

/// Critical ratio located by bisection on the phase returned by
/// minimize_branch (independent of the closed form).
double critical_ratio_numeric(double alpha4, double rel_tol = 1e-12);

struct PhaseCell {
  double a4 = 0.0;
  double g2 = 0.0;
  double sigma_x = 0.0;
  double x_min = 0.0;
  bool symmetric_phase = true;
};

struct PhaseDiagram {
  double omega = 0.0;
  double qubit_splitting = 0.0;
  std::vector<double> a4_grid;
  std::vector<double> g2_grid;
  std::vector<PhaseCell> cells;       // a4-major
  std::vector<double> boundary_g2;    // analytic g2c per a4
};

/// <sigma_x> at the branch minimum over an (a4, g2) grid, with the analytic
/// boundary g2c(a4) = critical_ratio_exact(alpha4) * g_T.
PhaseDiagram phase_diagram(double omega, double qubit_splitting, std::span<const double> a4_grid,
                           std::span<const double> g2_grid);

}  // namespace qrabi
