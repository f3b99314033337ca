#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qrabi {

/// Real symmetric matrix in LAPACK lower band storage: element (i, j) with
/// j <= i <= j + kd lives at data[(i - j) + j * (kd + 1)].
class SymmetricBandMatrix {
 public:
  SymmetricBandMatrix() = default;
  SymmetricBandMatrix(std::size_t dim, std::size_t kd);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t bandwidth() const noexcept { return kd_; }

  /// Zero outside the band.
  double operator()(std::size_t i, std::size_t j) const noexcept;
  /// Sets both (i, j) and (j, i). |i - j| must not exceed the bandwidth.
  void set(std::size_t i, std::size_t j, double value);
  void add(std::size_t i, std::size_t j, double value);

  const std::vector<double>& data() const noexcept { return data_; }
  Eigen::MatrixXd dense() const;
  /// y = A x
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  /// Max-row-sum norm; a cheap scale for residual checks.
  double inf_norm() const;

 private:
  std::size_t dim_ = 0;
  std::size_t kd_ = 0;
  std::vector<double> data_;
};

struct BandEigenResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // dim x k, empty when not requested
};

/// Lowest `count` eigenpairs through LAPACK dsbevx. Throws SolverError on
/// failure.
BandEigenResult lowest_eigenpairs(const SymmetricBandMatrix& a, std::size_t count,
                                  bool want_vectors);

/// Eigenvectors for the given (ascending, exact to working precision)
/// eigenvalues by shifted inverse iteration with a band LU factorization;
/// vectors within a cluster are orthogonalized against each other.
Eigen::MatrixXd inverse_iteration(const SymmetricBandMatrix& a, const Eigen::VectorXd& values);

/// Square band operator on a Fock ladder, stored by diagonal offset.
/// Used for forming exact operator powers in an enlarged space.
class LadderOperator {
 public:
  LadderOperator(std::size_t size, int half_width);

  static LadderOperator position_quadrature(std::size_t size);  // a + a^dagger

  std::size_t size() const noexcept { return size_; }
  int half_width() const noexcept { return w_; }
  double operator()(std::size_t row, std::size_t col) const noexcept;
  void set(std::size_t row, std::size_t col, double value);

  LadderOperator operator*(const LadderOperator& rhs) const;

 private:
  std::size_t size_;
  int w_;
  // diagonals_[offset + w_][row] holds (row, row + offset)
  std::vector<std::vector<double>> diagonals_;
};

}  // namespace qrabi
