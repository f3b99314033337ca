#include "qrabi/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qrabi/error.hpp"

namespace qrabi {

std::vector<double> default_position_grid(std::size_t cutoff, std::size_t points) {
  if (points < 2) throw ConfigError("position grid needs at least two points");
  const double half = std::sqrt(2.0 * static_cast<double>(cutoff) + 1.0) + 4.0;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

std::vector<double> hermite_functions(std::size_t n_max, double x) {
  // Carry phi_n * exp(x^2/2 - log_scale) and rescale whenever the running
  // values grow large; the Gaussian factor is applied at the end.
  std::vector<double> scaled(n_max + 1);
  std::vector<double> log_scale(n_max + 1);
  double log_acc = 0.0;
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25);
  scaled[0] = cur;
  log_scale[0] = 0.0;
  for (std::size_t n = 0; n < n_max; ++n) {
    const double nd = static_cast<double>(n);
    const double next = x * std::sqrt(2.0 / (nd + 1.0)) * cur - std::sqrt(nd / (nd + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e150) {
      cur *= 1e-150;
      prev *= 1e-150;
      log_acc += 150.0 * std::numbers::ln10;
    }
    scaled[n + 1] = cur;
    log_scale[n + 1] = log_acc;
  }
  std::vector<double> out(n_max + 1);
  const double gauss = -0.5 * x * x;
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (scaled[n] == 0.0) {
      out[n] = 0.0;
      continue;
    }
    const double log_mag = std::log(std::abs(scaled[n])) + log_scale[n] + gauss;
    out[n] = log_mag < -745.0 ? 0.0 : std::copysign(std::exp(log_mag), scaled[n]);
  }
  return out;
}

double trapezoid(std::span<const double> x, std::span<const double> f) {
  if (x.size() != f.size()) throw ConfigError("trapezoid: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
  return acc;
}

PositionWavefunction to_position(const Eigen::VectorXd& state, const FockSpinBasis& basis,
                                 std::span<const double> x_grid) {
  require_normalized(state, basis);
  if (x_grid.size() < 2 || !std::is_sorted(x_grid.begin(), x_grid.end())) {
    throw ConfigError("position grid must be ascending with at least two points");
  }
  const std::size_t cutoff = basis.cutoff();
  PositionWavefunction out;
  out.x_grid.assign(x_grid.begin(), x_grid.end());
  out.psi_plus.resize(x_grid.size());
  out.psi_minus.resize(x_grid.size());
  std::vector<double> density(x_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const auto phi = hermite_functions(cutoff, x_grid[i]);
    double plus = 0.0;
    double minus = 0.0;
    for (std::size_t n = 0; n <= cutoff; ++n) {
      plus += state[static_cast<Eigen::Index>(FockSpinBasis::index(n, Spin::Up))] * phi[n];
      minus += state[static_cast<Eigen::Index>(FockSpinBasis::index(n, Spin::Down))] * phi[n];
    }
    out.psi_plus[i] = plus;
    out.psi_minus[i] = minus;
    density[i] = plus * plus + minus * minus;
  }
  out.norm_check = trapezoid(out.x_grid, density);
  if (out.norm_check < 0.999) {
    throw ConfigError("position grid captures only " + std::to_string(out.norm_check) +
                      " of the norm");
  }
  return out;
}

double observable_sigma_x(const Eigen::VectorXd& state, const FockSpinBasis& basis) {
  require_normalized(state, basis);
  double acc = 0.0;
  for (std::size_t n = 0; n <= basis.cutoff(); ++n) {
    acc += state[static_cast<Eigen::Index>(FockSpinBasis::index(n, Spin::Up))] *
           state[static_cast<Eigen::Index>(FockSpinBasis::index(n, Spin::Down))];
  }
  return 2.0 * acc;
}

X2Expectation observable_x2(const Eigen::VectorXd& state, const FockSpinBasis& basis) {
  require_normalized(state, basis);
  const std::size_t cutoff = basis.cutoff();
  X2Expectation out;
  for (Spin s : {Spin::Up, Spin::Down}) {
    auto c = [&](std::size_t n) {
      return state[static_cast<Eigen::Index>(FockSpinBasis::index(n, s))];
    };
    for (std::size_t n = 0; n <= cutoff; ++n) {
      const double nd = static_cast<double>(n);
      out.value += (nd + 0.5) * c(n) * c(n);
      if (n + 2 <= cutoff) out.value += std::sqrt((nd + 1.0) * (nd + 2.0)) * c(n) * c(n + 2);
    }
    out.boundary_weight += c(cutoff) * c(cutoff);
  }
  out.truncation_warning = out.boundary_weight > 1e-8;
  return out;
}

}  // namespace qrabi
