#include "qrabi/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "qrabi/error.hpp"

namespace qrabi {

namespace {

constexpr std::size_t kScanPoints = 2000;
constexpr int kBisectionSteps = 40;

double diagonal(const ModelParams& p, Spin s, double x) { return effective_potential(p, s, x); }

double refine_minimum(const ModelParams& p, double lo, double hi) {
  // slope is negative on the left of the minimum and positive on the right
  for (int i = 0; i < kBisectionSteps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (lower_branch_slope(p, mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void require_ascending(std::span<const double> grid, const char* name) {
  if (grid.empty()) throw ConfigError(std::string(name) + " grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw ConfigError(std::string(name) + " grid must be ascending");
  }
}

}  // namespace

std::array<double, 4> semiclassical_matrix(const ModelParams& params, double x) {
  const double off = 0.5 * params.qubit_splitting;
  return {diagonal(params, Spin::Up, x), off, off, diagonal(params, Spin::Down, x)};
}

double lower_branch(const ModelParams& params, double x) {
  const double x2 = x * x;
  const double r = params.coupling_ratio();
  const double om = params.omega;
  const double split = params.qubit_splitting;
  return 0.5 * (om * x2 + 8.0 * params.a4 * x2 * x2 -
                std::sqrt(split * split + r * r * om * om * x2 * x2));
}

double lower_branch_slope(const ModelParams& params, double x) {
  const double x2 = x * x;
  const double r = params.coupling_ratio();
  const double om = params.omega;
  const double split = params.qubit_splitting;
  const double root = std::sqrt(split * split + r * r * om * om * x2 * x2);
  const double coupling_term = root > 0.0 ? r * r * om * om * x2 * x / root : r * om * x;
  return om * x + 16.0 * params.a4 * x2 * x - coupling_term;
}

double branch_sigma_x(const ModelParams& params, double x) {
  const double split = params.qubit_splitting;
  const double diff = diagonal(params, Spin::Up, x) - diagonal(params, Spin::Down, x);
  const double root = std::sqrt(diff * diff + split * split);
  return root > 0.0 ? -split / root : 0.0;
}

SemiclassicalSolution minimize_branch(const ModelParams& params) {
  params.validate();
  if (params.unbounded()) {
    throw InstabilityError("semiclassical branch unbounded: a4 = 0 and g2 > g_T");
  }
  SemiclassicalSolution sol;
  sol.energy_origin = lower_branch(params, 0.0);
  sol.energy_min = sol.energy_origin;
  sol.sigma_x_at_min = branch_sigma_x(params, 0.0);

  const double r = params.coupling_ratio();
  if (r <= 1.0) return sol;  // epsilon(x) >= epsilon(0) whenever g2 <= g_T

  // Any stationary point satisfies x^2 <= omega (r - 1) / (16 a4), the
  // Omega = 0 minimum.
  const double x_max = 3.0 * std::sqrt(params.omega * (r - 1.0) / (16.0 * params.a4));
  std::vector<double> energies(kScanPoints + 1);
  const double step = x_max / static_cast<double>(kScanPoints);
  for (std::size_t i = 0; i <= kScanPoints; ++i) energies[i] = lower_branch(params, step * i);

  double best_x = 0.0;
  double best_e = sol.energy_origin;
  for (std::size_t i = 1; i < kScanPoints; ++i) {
    if (energies[i] <= energies[i - 1] && energies[i] <= energies[i + 1]) {
      const double x = refine_minimum(params, step * (i - 1), step * (i + 1));
      const double e = lower_branch(params, x);
      if (e < best_e) {
        best_e = e;
        best_x = x;
      }
    }
  }
  // ties and numerically indistinguishable minima go to the symmetric phase
  if (best_x > 1e-6 && best_e - sol.energy_origin < 0.0) {
    sol.x_min = best_x;
    sol.energy_min = best_e;
    sol.symmetric_phase = false;
    sol.sigma_x_at_min = branch_sigma_x(params, best_x);
  }
  return sol;
}

ModelParams scaled_params(double alpha4, double ratio) {
  ModelParams p;
  p.omega = 1.0;
  p.qubit_splitting = 1.0;
  p.chi = 1.0;
  p.a4 = alpha4;
  p.g2 = ratio * p.g_t();
  return p;
}

double critical_ratio_exact(double alpha4) {
  if (!(alpha4 >= 0.0)) throw ConfigError("alpha4 must be non-negative");
  using C = std::complex<double>;
  const double a = alpha4;
  const C root = std::sqrt(C(6.0 * a * std::pow(54.0 * a - 1.0, 3), 0.0));
  const C f = 1080.0 * a - 1.0 + 24.0 * (972.0 * a * a + root);
  const C cube = std::pow(f, 1.0 / 3.0);
  const C value = 2.0 / 3.0 + (1.0 + 432.0 * a) / (3.0 * cube) + cube / 3.0 + 16.0 * a;
  const C ratio = std::sqrt(value);
  if (std::abs(ratio.imag()) > 1e-10 * std::max(1.0, std::abs(ratio.real()))) {
    throw Error("critical ratio has non-negligible imaginary part at alpha4 = " +
                std::to_string(alpha4));
  }
  return ratio.real();
}

double critical_ratio_small(double alpha4) {
  if (!(alpha4 >= 0.0)) throw ConfigError("alpha4 must be non-negative");
  return std::sqrt(1.0 + 8.0 * std::sqrt(2.0 * alpha4) + 24.0 * alpha4);
}

double critical_ratio_large(double alpha4) {
  if (!(alpha4 > 0.0)) throw ConfigError("large-alpha4 expansion needs alpha4 > 0");
  const double c1 = std::cbrt(alpha4);
  const double c2 = c1 * c1;
  const double value = 2.0 / 3.0 + 16.0 * alpha4 + 12.0 * c2 + 4.0 * c1 + 1.0 / (27.0 * c1) -
                       1.0 / (324.0 * c2);
  if (value < 0.0) throw ConfigError("large-alpha4 expansion is negative at this alpha4");
  return std::sqrt(value);
}

double critical_ratio_numeric(double alpha4, double rel_tol) {
  if (!(alpha4 > 0.0)) {
    if (alpha4 == 0.0) return 1.0;
    throw ConfigError("alpha4 must be non-negative");
  }
  double lo = 1.0;
  double hi = 2.0;
  while (minimize_branch(scaled_params(alpha4, hi)).symmetric_phase) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw Error("no transition found below g2/g_T = 1e8");
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (minimize_branch(scaled_params(alpha4, mid)).symmetric_phase) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

PhaseDiagram phase_diagram(double omega, double qubit_splitting, std::span<const double> a4_grid,
                           std::span<const double> g2_grid) {
  require_ascending(a4_grid, "a4");
  require_ascending(g2_grid, "g2");
  PhaseDiagram out;
  out.omega = omega;
  out.qubit_splitting = qubit_splitting;
  out.a4_grid.assign(a4_grid.begin(), a4_grid.end());
  out.g2_grid.assign(g2_grid.begin(), g2_grid.end());
  out.cells.reserve(a4_grid.size() * g2_grid.size());
  for (double a4 : a4_grid) {
    ModelParams p;
    p.omega = omega;
    p.qubit_splitting = qubit_splitting;
    p.a4 = a4;
    out.boundary_g2.push_back(critical_ratio_exact(p.alpha4()) * p.g_t());
    for (double g2 : g2_grid) {
      p.g2 = g2;
      PhaseCell cell{a4, g2, 0.0, 0.0, true};
      try {
        const auto sol = minimize_branch(p);
        cell.sigma_x = sol.sigma_x_at_min;
        cell.x_min = sol.x_min;
        cell.symmetric_phase = sol.symmetric_phase;
      } catch (const InstabilityError&) {
        throw InstabilityError("phase diagram cell unbounded at a4 = " + std::to_string(a4) +
                               ", g2 = " + std::to_string(g2));
      }
      out.cells.push_back(cell);
    }
  }
  return out;
}

}  // namespace qrabi
