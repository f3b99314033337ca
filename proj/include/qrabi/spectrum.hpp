#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qrabi/model.hpp"

namespace qrabi {

/// Lowest eigenpairs of a HamiltonianMatrix. Each level is taken from one
/// photon-parity sector, so every eigenvector has definite parity.
struct SpectrumResult {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // dim x k; empty when vectors were not requested
  std::vector<int> parities;     // +1 / -1 per level
  double gap = 0.0;              // E1 - E0 (0 when only one level)
  std::size_t cutoff_used = 0;
  bool converged = true;
  double convergence_delta = 0.0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
  bool has_vectors() const noexcept { return eigenvectors.size() > 0; }
  Eigen::VectorXd state(std::size_t level) const {
    return eigenvectors.col(static_cast<Eigen::Index>(level));
  }
  /// E_j - E_0 for the first level j > 0 sharing the ground-state parity;
  /// NaN when no such level was computed.
  double same_parity_gap() const noexcept;
};

/// Eigenpairs of one parity sector, embedded back into the full basis.
struct SectorLevels {
  int parity = 1;
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // full-basis columns
};

/// Flip each column so that its largest-magnitude component (first on ties)
/// is positive.
void fix_sign_convention(Eigen::MatrixXd& vectors);

SectorLevels solve_sector(const HamiltonianMatrix& h, int parity, std::size_t count,
                          bool want_vectors = true);

/// Lowest k levels of H. Throws ConfigError when k exceeds the dimension and
/// SolverError when LAPACK fails.
SpectrumResult solve_spectrum(const HamiltonianMatrix& h, std::size_t k, bool want_vectors = true);

struct ConvergencePolicy {
  std::size_t initial_cutoff = 64;
  std::size_t max_cutoff = 4096;
  bool want_vectors = true;
};

/// Doubles the cutoff until the lowest `track` levels (default: all k) move
/// by less than `tol` between successive cutoffs. On reaching the ceiling the
/// last result is returned with converged = false. Throws InstabilityError
/// when the parameters are unbounded from below.
SpectrumResult converged_spectrum(const ModelParams& params, std::size_t k, double tol,
                                  const ConvergencePolicy& policy = {},
                                  std::size_t track = 0);

/// Sample of the excitation gap at one coupling.
struct GapPoint {
  double g2 = 0.0;
  double delta = 0.0;             // global gap E1 - E0
  double same_parity_gap = 0.0;   // gap to the next level of the ground-state parity
  int ground_parity = 1;
  int excited_parity = 1;
  std::size_t cutoff = 0;
  double convergence_delta = 0.0;
  bool converged = true;
};

/// Gap at the coupling in `params`; tracks the two lowest levels at `tol`.
/// Throws ConvergenceError carrying the coupling if the ceiling is reached,
/// except at the collapse point itself (a4 = 0, g2 = g_T): there the excited
/// levels approach the continuum threshold only algebraically in the cutoff,
/// and the ceiling value is returned with converged = false. `allow_unconverged`
/// extends that behaviour to any coupling.
GapPoint gap_at(const ModelParams& params, double tol, const ConvergencePolicy& policy = {},
               bool allow_unconverged = false);

/// Gap along an ascending grid of couplings (other parameters from `params`).
std::vector<GapPoint> gap_curve(const ModelParams& params, std::span<const double> g2_grid,
                                double tol, const ConvergencePolicy& policy = {});

}  // namespace qrabi
