#include "qrabi/banded.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include <lapacke.h>

#include "qrabi/error.hpp"

namespace qrabi {

SymmetricBandMatrix::SymmetricBandMatrix(std::size_t dim, std::size_t kd)
    : dim_(dim), kd_(kd), data_((kd + 1) * dim, 0.0) {}

double SymmetricBandMatrix::operator()(std::size_t i, std::size_t j) const noexcept {
  if (i < j) std::swap(i, j);
  if (i - j > kd_) return 0.0;
  return data_[(i - j) + j * (kd_ + 1)];
}

void SymmetricBandMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i < j) std::swap(i, j);
  if (i - j > kd_ || i >= dim_) throw ConfigError("band element outside storage");
  data_[(i - j) + j * (kd_ + 1)] = value;
}

void SymmetricBandMatrix::add(std::size_t i, std::size_t j, double value) {
  if (i < j) std::swap(i, j);
  if (i - j > kd_ || i >= dim_) throw ConfigError("band element outside storage");
  data_[(i - j) + j * (kd_ + 1)] += value;
}

Eigen::MatrixXd SymmetricBandMatrix::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    for (std::size_t i = j; i < std::min(dim_, j + kd_ + 1); ++i) {
      m(i, j) = m(j, i) = data_[(i - j) + j * (kd_ + 1)];
    }
  }
  return m;
}

Eigen::VectorXd SymmetricBandMatrix::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    y[j] += data_[j * (kd_ + 1)] * x[j];
    for (std::size_t i = j + 1; i < std::min(dim_, j + kd_ + 1); ++i) {
      const double v = data_[(i - j) + j * (kd_ + 1)];
      y[i] += v * x[j];
      y[j] += v * x[i];
    }
  }
  return y;
}

double SymmetricBandMatrix::inf_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    double row = 0.0;
    const std::size_t lo = i > kd_ ? i - kd_ : 0;
    const std::size_t hi = std::min(dim_, i + kd_ + 1);
    for (std::size_t j = lo; j < hi; ++j) row += std::abs((*this)(i, j));
    best = std::max(best, row);
  }
  return best;
}

namespace {

// Beyond this dimension dsbevx's accumulated n x n rotation matrix dominates
// the cost; eigenvectors then come from inverse iteration on the band.
constexpr std::size_t kDirectVectorLimit = 1200;

BandEigenResult dsbevx(const SymmetricBandMatrix& a, std::size_t count, bool want_vectors) {
  const auto n = static_cast<lapack_int>(a.dim());
  const auto kd = static_cast<lapack_int>(a.bandwidth());
  std::vector<double> ab = a.data();  // overwritten by LAPACK
  const char jobz = want_vectors ? 'V' : 'N';
  const lapack_int ldq = want_vectors ? n : 1;
  std::vector<double> q(want_vectors ? static_cast<std::size_t>(n) * n : 1);
  std::vector<double> w(a.dim());
  const lapack_int ldz = want_vectors ? n : 1;
  std::vector<double> z(want_vectors ? static_cast<std::size_t>(n) * count : 1);
  std::vector<lapack_int> ifail(a.dim());
  lapack_int found = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');

  const lapack_int info = LAPACKE_dsbevx(
      LAPACK_COL_MAJOR, jobz, 'I', 'L', n, kd, ab.data(), kd + 1, q.data(), ldq, 0.0, 0.0, 1,
      static_cast<lapack_int>(count), abstol, &found, w.data(), z.data(), ldz, ifail.data());
  if (info != 0 || found != static_cast<lapack_int>(count)) {
    throw SolverError("dsbevx failed (info=" + std::to_string(info) +
                      ", found=" + std::to_string(found) + ")");
  }
  BandEigenResult out;
  out.values = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(count));
  if (want_vectors) {
    out.vectors = Eigen::Map<const Eigen::MatrixXd>(z.data(), n, static_cast<Eigen::Index>(count));
  }
  return out;
}

}  // namespace

Eigen::MatrixXd inverse_iteration(const SymmetricBandMatrix& a, const Eigen::VectorXd& values) {
  const std::size_t n = a.dim();
  const std::size_t kd = a.bandwidth();
  const auto ni = static_cast<lapack_int>(n);
  const auto kdi = static_cast<lapack_int>(kd);
  const lapack_int ldab = 3 * kdi + 1;
  const double scale = std::max(a.inf_norm(), 1e-300);
  const double eps = std::numeric_limits<double>::epsilon();
  const double cluster = 1e-3 * scale;

  Eigen::MatrixXd vectors(static_cast<Eigen::Index>(n), values.size());
  std::vector<double> lu(static_cast<std::size_t>(ldab) * n);
  std::vector<lapack_int> pivots(n);

  for (Eigen::Index level = 0; level < values.size(); ++level) {
    // shifting slightly off the eigenvalue keeps the factorization regular
    double shift = values[level] - 4.0 * eps * scale;
    lapack_int info = 0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      std::fill(lu.begin(), lu.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t lo = j > kd ? j - kd : 0;
        const std::size_t hi = std::min(n - 1, j + kd);
        for (std::size_t i = lo; i <= hi; ++i) {
          double v = a(i, j);
          if (i == j) v -= shift;
          lu[(static_cast<std::size_t>(2 * kdi) + i - j) + j * static_cast<std::size_t>(ldab)] = v;
        }
      }
      info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, ni, ni, kdi, kdi, lu.data(), ldab, pivots.data());
      if (info == 0) break;
      shift -= 16.0 * eps * scale * (attempt + 1);
    }
    if (info != 0) throw SolverError("band LU failed during inverse iteration");

    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = 1.0 + 0.5 * std::sin(1.0 + 0.7 * static_cast<double>(i) + static_cast<double>(level));
    x.normalize();
    double residual = 0.0;
    for (int iter = 0; iter < 12; ++iter) {
      LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', ni, kdi, kdi, 1, lu.data(), ldab, pivots.data(),
                     x.data(), ni);
      for (Eigen::Index prev = 0; prev < level; ++prev) {
        if (std::abs(values[prev] - values[level]) <= cluster) {
          x -= vectors.col(prev).dot(x) * vectors.col(prev);
        }
      }
      x.normalize();
      residual = (a.multiply(x) - values[level] * x).norm();
      if (iter >= 1 && residual <= 1e3 * eps * scale) break;
    }
    if (residual > 1e-8 * scale) {
      throw SolverError("inverse iteration did not reach an eigenvector (residual " +
                        std::to_string(residual) + ")");
    }
    vectors.col(level) = x;
  }
  return vectors;
}

BandEigenResult lowest_eigenpairs(const SymmetricBandMatrix& a, std::size_t count,
                                  bool want_vectors) {
  if (count == 0 || count > a.dim()) {
    throw ConfigError("requested " + std::to_string(count) + " levels from a matrix of dimension " +
                      std::to_string(a.dim()));
  }
  if (!want_vectors || a.dim() <= kDirectVectorLimit) return dsbevx(a, count, want_vectors);
  BandEigenResult out = dsbevx(a, count, false);
  out.vectors = inverse_iteration(a, out.values);
  return out;
}

LadderOperator::LadderOperator(std::size_t size, int half_width)
    : size_(size), w_(half_width), diagonals_(2 * half_width + 1, std::vector<double>(size, 0.0)) {}

LadderOperator LadderOperator::position_quadrature(std::size_t size) {
  LadderOperator x(size, 1);
  for (std::size_t n = 0; n + 1 < size; ++n) {
    const double v = std::sqrt(static_cast<double>(n + 1));
    x.set(n, n + 1, v);
    x.set(n + 1, n, v);
  }
  return x;
}

double LadderOperator::operator()(std::size_t row, std::size_t col) const noexcept {
  const long offset = static_cast<long>(col) - static_cast<long>(row);
  if (std::labs(offset) > w_ || row >= size_ || col >= size_) return 0.0;
  return diagonals_[static_cast<std::size_t>(offset + w_)][row];
}

void LadderOperator::set(std::size_t row, std::size_t col, double value) {
  const long offset = static_cast<long>(col) - static_cast<long>(row);
  if (std::labs(offset) > w_) throw ConfigError("ladder element outside band");
  diagonals_[static_cast<std::size_t>(offset + w_)][row] = value;
}

LadderOperator LadderOperator::operator*(const LadderOperator& rhs) const {
  if (rhs.size_ != size_) throw ConfigError("ladder operator size mismatch");
  LadderOperator out(size_, w_ + rhs.w_);
  for (std::size_t i = 0; i < size_; ++i) {
    for (int a = -w_; a <= w_; ++a) {
      const long k = static_cast<long>(i) + a;
      if (k < 0 || k >= static_cast<long>(size_)) continue;
      const double left = (*this)(i, static_cast<std::size_t>(k));
      if (left == 0.0) continue;
      for (int b = -rhs.w_; b <= rhs.w_; ++b) {
        const long j = k + b;
        if (j < 0 || j >= static_cast<long>(size_)) continue;
        out.diagonals_[static_cast<std::size_t>(a + b + out.w_)][i] +=
            left * rhs(static_cast<std::size_t>(k), static_cast<std::size_t>(j));
      }
    }
  }
  return out;
}

}  // namespace qrabi
