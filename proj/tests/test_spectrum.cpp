#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "qrabi/error.hpp"
#include "qrabi/spectrum.hpp"

using namespace qrabi;

namespace {

// Merged ladders omega sqrt(1 +- g2/g_T) (n + 1/2) - omega/2 of the two spin blocks at Omega = 0.
std::vector<double> oscillator_levels(const ModelParams& p, std::size_t count) {
  std::vector<double> levels;
  for (int s : {1, -1}) {
    const double w = p.omega * std::sqrt(1.0 + s * p.coupling_ratio());
    for (std::size_t n = 0; n < count; ++n) levels.push_back(w * (n + 0.5) - p.omega / 2.0);
  }
  std::sort(levels.begin(), levels.end());
  levels.resize(count);
  return levels;
}

double residual(const HamiltonianMatrix& h, const SpectrumResult& r, std::size_t i) {
  const Eigen::VectorXd v = r.state(i);
  return (h.band().multiply(v) - r.eigenvalues(static_cast<Eigen::Index>(i)) * v).norm();
}

}  // namespace

TEST_CASE("decoupled model") {
  const ModelParams p{.omega = 1.0, .qubit_splitting = 1.0};
  const auto r = solve_spectrum(build_hamiltonian(p, FockSpinBasis(8)), 4);
  CHECK(r.eigenvalues(0) == doctest::Approx(-0.5));
  CHECK(r.eigenvalues(1) == doctest::Approx(0.5));
  CHECK(r.gap == doctest::Approx(1.0));
}

TEST_CASE("uncoupled spin blocks reproduce the oscillator ladders") {
  ModelParams p{.omega = 1.0, .qubit_splitting = 0.0};
  p.g2 = 0.2;
  const auto r = solve_spectrum(build_hamiltonian(p, FockSpinBasis(40)), 10, false);
  const auto exact = oscillator_levels(p, 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(r.eigenvalues(i) - exact[i]) < 1e-8);
}

TEST_CASE("banded sector solver agrees with dense diagonalization") {
  const ModelParams p{.omega = 1.0, .qubit_splitting = 1.0, .g2 = 0.27, .chi = 1.0, .a4 = 3e-4};
  const auto h = build_hamiltonian(p, FockSpinBasis(300));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(h.dense());
  const auto r = solve_spectrum(h, 8);
  const Eigen::MatrixXd gram = r.eigenvectors.transpose() * r.eigenvectors;
  CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(std::abs(r.eigenvalues(i) - dense.eigenvalues()(i)) < 1e-9);
    CHECK(residual(h, r, i) < 1e-8 * h.band().inf_norm());
    if (i > 0) CHECK(r.eigenvalues(i) >= r.eigenvalues(i - 1));
  }
  // the ground state is nondegenerate here, so the vectors must coincide up to sign
  CHECK(std::abs(std::abs(r.state(0).dot(dense.eigenvectors().col(0))) - 1.0) < 1e-9);
}

TEST_CASE("large sectors use inverse iteration with the same accuracy") {
  const ModelParams p{.omega = 1.0, .qubit_splitting = 1.0, .g2 = 0.3, .a4 = 1e-4};
  const auto big = build_hamiltonian(p, FockSpinBasis(3000));
  const auto small = build_hamiltonian(p, FockSpinBasis(1000));
  const auto rb = solve_spectrum(big, 6);
  const auto rs = solve_spectrum(small, 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(std::abs(rb.eigenvalues(i) - rs.eigenvalues(i)) < 1e-9);
    CHECK(residual(big, rb, i) < 1e-8 * big.band().inf_norm());
    CHECK(rb.parities[i] == rs.parities[i]);
  }
  CHECK(rb.state(0).head(small.dim()).dot(rs.state(0)) == doctest::Approx(1.0).epsilon(1e-9));
  const Eigen::MatrixXd gram = rb.eigenvectors.transpose() * rb.eigenvectors;
  CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("eigenvectors carry the sign convention and definite parity") {
  const ModelParams p{.omega = 1.0, .qubit_splitting = 1.0, .g2 = 0.2, .a4 = 3e-4};
  const FockSpinBasis basis(200);
  const auto r = solve_spectrum(build_hamiltonian(p, basis), 6);
  for (std::size_t i = 0; i < 6; ++i) {
    const Eigen::VectorXd v = r.state(i);
    Eigen::Index k;
    v.cwiseAbs().maxCoeff(&k);
    CHECK(v(k) > 0.0);
    CHECK(parity_expectation(v, basis) == doctest::Approx(r.parities[i]).epsilon(1e-10));
  }
  CHECK(r.parities[0] == 1);
  CHECK(r.parities[1] == -1);
}

TEST_CASE("ground energy is non-increasing in the cutoff") {
  const ModelParams p{.omega = 1.0, .qubit_splitting = 1.0, .g2 = 0.3, .a4 = 3e-4};
  double previous = 1e300;
  for (std::size_t n : {8, 16, 32, 64, 128, 256}) {
    const double e0 = solve_spectrum(build_hamiltonian(p, FockSpinBasis(n)), 1, false).eigenvalues(0);
    CHECK(e0 <= previous + 1e-12);
    previous = e0;
  }
}

TEST_CASE("pure quartic spin-down block is cutoff stable") {
  ModelParams p{.omega = 1.0, .qubit_splitting = 0.0, .a4 = 0.01};
  p.g2 = p.g_t();
  const auto a = solve_spectrum(build_hamiltonian(p, FockSpinBasis(200)), 10, false);
  const auto b = solve_spectrum(build_hamiltonian(p, FockSpinBasis(400)), 10, false);
  for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(a.eigenvalues(i) - b.eigenvalues(i)) < 1e-8);
  CHECK(a.eigenvalues(0) > -0.5);
}

TEST_CASE("converged spectrum") {
  ModelParams p{.omega = 1.0, .qubit_splitting = 1.0};
  p.g2 = 0.5 * p.g_t();
  const auto r = converged_spectrum(p, 6, 1e-8);
  CHECK(r.converged);
  CHECK(r.convergence_delta < 1e-8);
  CHECK(r.cutoff_used <= 128);

  p.g2 = 1.2 * p.g_t();
  CHECK_THROWS_AS(converged_spectrum(p, 6, 1e-8), InstabilityError);

  p.a4 = 1e-4;
  const auto stable = converged_spectrum(p, 10, 1e-8, {.want_vectors = false});
  CHECK(stable.converged);
  CHECK(stable.eigenvalues(0) > -1e3);

  CHECK_THROWS_AS(converged_spectrum(p, 4, 0.0), ConfigError);
}

TEST_CASE("spectral collapse crowds the excited levels") {
  ModelParams p{.omega = 1.0, .qubit_splitting = 1.0};
  p.g2 = p.g_t();
  const auto coarse = solve_spectrum(build_hamiltonian(p, FockSpinBasis(128)), 8, false);
  const auto fine = solve_spectrum(build_hamiltonian(p, FockSpinBasis(1024)), 8, false);
  const double spread_coarse = coarse.eigenvalues(7) - coarse.eigenvalues(2);
  const double spread_fine = fine.eigenvalues(7) - fine.eigenvalues(2);
  CHECK(spread_fine < 0.5 * spread_coarse);
}

TEST_CASE("gap curve") {
  ModelParams p{.omega = 1.0, .qubit_splitting = 1.0};
  const std::vector<double> grid{0.0, 0.5 * p.g_t(), 0.95 * p.g_t()};
  const auto free_gap = gap_curve(p, grid, 1e-8);
  CHECK(free_gap[0].delta == doctest::Approx(1.0));
  CHECK(free_gap[0].ground_parity == 1);
  for (const auto& g : free_gap) {
    CHECK(g.converged);
    CHECK(g.delta > 0.0);
  }

  // at its own transition the quartic model has the smaller gap
  ModelParams edge{.omega = 1.0, .qubit_splitting = 1.0};
  edge.g2 = edge.g_t();
  const auto g = gap_at(edge, 1e-8, {.initial_cutoff = 64, .max_cutoff = 512});
  CHECK_FALSE(g.converged);
  CHECK(g.delta > 0.0);

  p.a4 = 3e-4;
  p.g2 = 1.09 * p.g_t();
  const auto quartic = gap_at(p, 1e-8);
  CHECK(quartic.converged);
  CHECK(quartic.delta < g.delta);
}
