#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qrabi/model.hpp"

namespace qrabi {

/// Spin components of a state in the x-representation, psi_s(x) = sum_n c_{n,s} phi_n(x).
struct PositionWavefunction {
  std::vector<double> x_grid;
  std::vector<double> psi_plus;
  std::vector<double> psi_minus;
  double norm_check = 0.0;  // trapezoidal integral of |psi_+|^2 + |psi_-|^2
};

/// Uniform grid of `points` positions over +-(sqrt(2 cutoff + 1) + 4).
std::vector<double> default_position_grid(std::size_t cutoff, std::size_t points = 1024);

/// phi_0..phi_{n_max}(x) for the unit-frequency oscillator. Uses the
/// normalized three-term recurrence with running rescaling, so it stays
/// finite for large n and large |x|.
std::vector<double> hermite_functions(std::size_t n_max, double x);

/// Throws ConfigError if the grid is not ascending or captures less than
/// 99.9% of the norm.
PositionWavefunction to_position(const Eigen::VectorXd& state, const FockSpinBasis& basis,
                                 std::span<const double> x_grid);

/// Trapezoidal integral of samples on a (possibly non-uniform) ascending grid.
double trapezoid(std::span<const double> x, std::span<const double> f);

/// <sigma_x> = 2 sum_n c_{n,+} c_{n,-}.
double observable_sigma_x(const Eigen::VectorXd& state, const FockSpinBasis& basis);

struct X2Expectation {
  double value = 0.0;
  double boundary_weight = 0.0;     // |c_{N,+}|^2 + |c_{N,-}|^2
  bool truncation_warning = false;  // boundary_weight > 1e-8
};

/// <x^2> from the Fock-space matrix of x^2 = (a + a^+)^2 / 2.
X2Expectation observable_x2(const Eigen::VectorXd& state, const FockSpinBasis& basis);

}  // namespace qrabi
