#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "qrabi/banded.hpp"

using namespace qrabi;

namespace {

SymmetricBandMatrix random_band(std::size_t dim, std::size_t kd, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SymmetricBandMatrix a(dim, kd);
  for (std::size_t j = 0; j < dim; ++j) {
    a.set(j, j, 0.05 * static_cast<double>(j) + u(rng));
    for (std::size_t i = j + 1; i <= std::min(dim - 1, j + kd); ++i) a.set(i, j, u(rng));
  }
  return a;
}

// Matrix element of (a + a^dagger)^p between Fock states, by summing over all
// 2^p ladder sequences.
double position_power_element(std::size_t row, std::size_t col, int p) {
  double total = 0.0;
  for (int mask = 0; mask < (1 << p); ++mask) {
    long n = static_cast<long>(col);
    double amp = 1.0;
    for (int step = 0; step < p && amp != 0.0; ++step) {
      if (mask & (1 << step)) {
        amp *= std::sqrt(static_cast<double>(n + 1));
        ++n;
      } else {
        amp *= std::sqrt(static_cast<double>(n));
        --n;
      }
    }
    if (n == static_cast<long>(row)) total += amp;
  }
  return total;
}

}  // namespace

TEST_CASE("band storage is symmetric and matches the dense view") {
  const auto a = random_band(30, 4, 1);
  const Eigen::MatrixXd d = a.dense();
  CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a(3, 7) == a(7, 3));
  CHECK(a(0, 10) == 0.0);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(30, -1.0, 2.0);
  CHECK((a.multiply(x) - d * x).norm() < 1e-13);
  CHECK(a.inf_norm() == doctest::Approx(d.cwiseAbs().rowwise().sum().maxCoeff()));
}

TEST_CASE("lowest eigenpairs agree with a dense solver") {
  const auto a = random_band(200, 5, 7);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(a.dense());
  const auto r = lowest_eigenpairs(a, 12, true);
  REQUIRE(r.values.size() == 12);
  for (int i = 0; i < 12; ++i) {
    CHECK(std::abs(r.values(i) - dense.eigenvalues()(i)) < 1e-11);
    CHECK(std::abs(std::abs(r.vectors.col(i).dot(dense.eigenvectors().col(i))) - 1.0) < 1e-9);
  }
  const auto values_only = lowest_eigenpairs(a, 12, false);
  CHECK(values_only.vectors.size() == 0);
  CHECK((values_only.values - r.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("inverse iteration reproduces dense eigenvectors") {
  const auto a = random_band(400, 5, 11);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(a.dense());
  const Eigen::VectorXd values = dense.eigenvalues().head(10);
  const Eigen::MatrixXd v = inverse_iteration(a, values);
  const Eigen::MatrixXd gram = v.transpose() * v;
  CHECK((gram - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-10);
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(std::abs(v.col(i).dot(dense.eigenvectors().col(i))) - 1.0) < 1e-9);
  }
}

TEST_CASE("inverse iteration separates an exactly degenerate pair") {
  // two identical uncoupled blocks interleaved: every level is doubly degenerate
  const std::size_t half = 150;
  SymmetricBandMatrix a(2 * half, 2);
  for (std::size_t n = 0; n < half; ++n) {
    for (std::size_t b = 0; b < 2; ++b) {
      a.set(2 * n + b, 2 * n + b, static_cast<double>(n) + 0.3 * std::cos(static_cast<double>(n)));
      if (n + 1 < half) a.set(2 * (n + 1) + b, 2 * n + b, 0.4);
    }
  }
  const auto vals = lowest_eigenpairs(a, 4, false).values;
  CHECK(std::abs(vals(0) - vals(1)) < 1e-12);
  const Eigen::MatrixXd v = inverse_iteration(a, vals);
  const Eigen::MatrixXd gram = v.transpose() * v;
  CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  const Eigen::MatrixXd d = a.dense();
  for (int i = 0; i < 4; ++i) CHECK((d * v.col(i) - vals(i) * v.col(i)).norm() < 1e-9);
}

TEST_CASE("position quadrature powers match ladder-sequence sums") {
  const std::size_t size = 24;
  const auto x = LadderOperator::position_quadrature(size);
  const auto x2 = x * x;
  const auto x4 = x2 * x2;
  CHECK(x4.half_width() == 4);
  // products are exact only away from the truncation edge
  for (std::size_t r = 0; r + 4 < size; ++r) {
    for (std::size_t c = 0; c + 4 < size; ++c) {
      CHECK(x2(r, c) == doctest::Approx(position_power_element(r, c, 2)).epsilon(1e-13));
      CHECK(x4(r, c) == doctest::Approx(position_power_element(r, c, 4)).epsilon(1e-13));
    }
  }
}
