#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "qrabi/error.hpp"
#include "qrabi/semiclassical.hpp"

using namespace qrabi;

namespace {

double smaller_eigenvalue(const ModelParams& p, double x) {
  const double r = p.coupling_ratio();
  Eigen::Matrix2d m;
  const double quartic = 4.0 * p.a4 * std::pow(x, 4);
  m << 0.5 * p.omega * (1.0 + r) * x * x + quartic, p.qubit_splitting / 2.0,
      p.qubit_splitting / 2.0, 0.5 * p.omega * (1.0 - r) * x * x + quartic;
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues()(0);
}

// Broken phase iff a dense scan of the branch finds a point below the origin.
bool scan_broken(double alpha4, double ratio) {
  const ModelParams p = scaled_params(alpha4, ratio);
  const double x_max = 3.0 * std::sqrt(std::max(ratio - 1.0, 1e-3) / (16.0 * alpha4));
  const double origin = lower_branch(p, 0.0);
  for (int k = 1; k <= 200000; ++k) {
    if (lower_branch(p, x_max * k / 200000.0) < origin - 1e-14) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("lower branch is the smaller eigenvalue of the two-level matrix") {
  for (auto p : {ModelParams{.omega = 1.0, .qubit_splitting = 1.0, .g2 = 0.3, .a4 = 3e-4},
                 ModelParams{.omega = 0.05, .qubit_splitting = 1.0, .g2 = 0.02, .a4 = 5e-5},
                 ModelParams{.omega = 2.0, .qubit_splitting = 0.3, .g2 = 0.1, .chi = 1.0, .a4 = 0.0}}) {
    for (double x = -7.0; x <= 7.0; x += 0.13) {
      CHECK(std::abs(lower_branch(p, x) - smaller_eigenvalue(p, x)) < 1e-12 * std::max(1.0, std::abs(lower_branch(p, x))));
    }
    CHECK(lower_branch(p, 0.0) == doctest::Approx(-p.qubit_splitting / 2.0));
    const double h = 1e-6;
    for (double x : {0.3, 1.1, 2.7}) {
      const double fd = (lower_branch(p, x + h) - lower_branch(p, x - h)) / (2.0 * h);
      CHECK(lower_branch_slope(p, x) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("branch minimization") {
  ModelParams p{.omega = 1.0, .qubit_splitting = 1.0};
  for (double a4 : {0.0, 1e-4, 0.01}) {
    p.a4 = a4;
    p.g2 = 0.8 * p.g_t();
    const auto s = minimize_branch(p);
    CHECK(s.symmetric_phase);
    CHECK(s.x_min == 0.0);
    CHECK(s.sigma_x_at_min == doctest::Approx(-1.0));
  }
  p.a4 = 1e-4;
  p.g2 = 2.0 * critical_ratio_exact(p.alpha4()) * p.g_t();
  const auto broken = minimize_branch(p);
  CHECK_FALSE(broken.symmetric_phase);
  CHECK(broken.x_min > 0.0);
  CHECK(broken.energy_min < broken.energy_origin);
  CHECK(broken.sigma_x_at_min > -1.0);
  CHECK(broken.sigma_x_at_min <= 0.0);

  // without the qubit splitting the minimum is the quartic stationary point
  ModelParams q{.omega = 1.0, .qubit_splitting = 0.0, .a4 = 0.002};
  q.g2 = 1.4 * q.g_t();
  CHECK(minimize_branch(q).x_min == doctest::Approx(std::sqrt(q.omega * 0.4 / (16.0 * q.a4))).epsilon(1e-8));

  ModelParams unstable{.omega = 1.0, .qubit_splitting = 1.0};
  unstable.g2 = 1.1 * unstable.g_t();
  CHECK_THROWS_AS(minimize_branch(unstable), InstabilityError);
}

TEST_CASE("critical ratio closed form") {
  CHECK(critical_ratio_exact(0.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(critical_ratio_small(0.0) == 1.0);
  CHECK_THROWS(critical_ratio_exact(-1e-3));
  CHECK_THROWS(critical_ratio_large(0.0));

  double previous = 1.0;
  for (int k = 0; k <= 70; ++k) {
    const double a = std::pow(10.0, -6.0 + 0.1 * k);
    const double g = critical_ratio_exact(a);
    CHECK(g > previous);
    previous = g;
  }
  // crosses the bracket around 54 alpha4 = 1 without a jump
  CHECK(critical_ratio_exact(1.0 / 54.0 - 1e-9) == doctest::Approx(critical_ratio_exact(1.0 / 54.0 + 1e-9)).epsilon(1e-7));
}

TEST_CASE("closed form matches the numeric phase boundary") {
  for (double a : {1e-4, 3e-3, 0.02, 0.14, 1.0}) {
    CAPTURE(a);
    const double exact = critical_ratio_exact(a);
    CHECK(critical_ratio_numeric(a) == doctest::Approx(exact).epsilon(1e-9));
    // coarse independent check from a brute-force scan of the branch
    CHECK_FALSE(scan_broken(a, exact * (1.0 - 1e-3)));
    CHECK(scan_broken(a, exact * (1.0 + 1e-3)));
  }
}

TEST_CASE("expansions in their regimes") {
  for (double a : {1e-5, 1e-3, 0.01}) {
    CHECK(critical_ratio_small(a) == doctest::Approx(critical_ratio_exact(a)).epsilon(0.01));
  }
  for (double a : {0.05, 0.3, 1.0}) {
    CHECK(critical_ratio_large(a) == doctest::Approx(critical_ratio_exact(a)).epsilon(0.01));
  }
}

TEST_CASE("phase diagram") {
  const double omega = 0.05;
  const std::vector<double> a4s{1e-5, 5e-5, 3.5e-4};
  std::vector<double> g2s;
  for (int k = 0; k < 60; ++k) g2s.push_back(0.5 * omega / 4.0 + k * 0.005 * omega);
  const auto d = phase_diagram(omega, 1.0, a4s, g2s);
  REQUIRE(d.cells.size() == a4s.size() * g2s.size());
  CHECK(d.cells[1].a4 == a4s[0]);
  CHECK(d.cells[1].g2 == g2s[1]);
  for (std::size_t i = 0; i < a4s.size(); ++i) {
    const double gt = omega / 4.0;
    CHECK(d.boundary_g2[i] == doctest::Approx(critical_ratio_exact(a4s[i] / (omega * omega)) * gt));
    double previous_sx = -2.0;
    for (std::size_t j = 0; j < g2s.size(); ++j) {
      const auto& c = d.cells[i * g2s.size() + j];
      if (c.g2 < 0.999 * d.boundary_g2[i]) {
        CHECK(c.symmetric_phase);
        CHECK(c.sigma_x == doctest::Approx(-1.0));
      }
      if (c.g2 > 1.001 * d.boundary_g2[i]) {
        CHECK_FALSE(c.symmetric_phase);
        // first-order jump at the boundary, then continuous growth
        CHECK(c.sigma_x > -0.9);
        CHECK(c.sigma_x >= previous_sx - 1e-12);
        previous_sx = c.sigma_x;
      }
    }
  }
}
