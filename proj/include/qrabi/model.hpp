#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qrabi/banded.hpp"

namespace qrabi {

/// Spin projection along z. Basis index of a spin is 0 for Up and 1 for Down.
enum class Spin { Up, Down };

inline constexpr int sign(Spin s) noexcept { return s == Spin::Up ? 1 : -1; }

/// Physical parameters of
///   H = omega a^+a + (Omega/2) sx + g2 sz [(a^+)^2 + a^2 + chi(2a^+a + 1)] + a4 (a^+ + a)^4.
/// At chi = 1 the coupling is g2 sz (a^+ + a)^2.
struct ModelParams {
  double omega = 1.0;            // mode frequency
  double qubit_splitting = 1.0;  // Omega
  double g2 = 0.0;
  double chi = 1.0;
  double a4 = 0.0;

  /// Collapse coupling omega / (2 (1 + chi)).
  double g_t() const noexcept { return omega / (2.0 * (1.0 + chi)); }
  /// Dimensionless quartic strength a4 Omega / omega^2.
  double alpha4() const noexcept { return a4 * qubit_splitting / (omega * omega); }
  double coupling_ratio() const noexcept { return g2 / g_t(); }

  /// No quartic confinement and g2 past the collapse point.
  bool unbounded() const noexcept;
  /// a4 = 0 and g2 = g_T: the excited spectrum meets a continuum threshold.
  bool at_collapse_point() const noexcept;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Truncated Fock space (n = 0..cutoff) tensored with a spin-1/2, ordered
/// with n major and spin minor: index(n, s) = 2 n + (s == Down).
class FockSpinBasis {
 public:
  explicit FockSpinBasis(std::size_t cutoff);

  std::size_t cutoff() const noexcept { return cutoff_; }
  /// Cutoff used when forming operator powers before truncation.
  std::size_t aux_cutoff() const noexcept { return cutoff_ + 4; }
  std::size_t dim() const noexcept { return 2 * (cutoff_ + 1); }

  static constexpr std::size_t index(std::size_t n, Spin s) noexcept {
    return 2 * n + (s == Spin::Down ? 1 : 0);
  }
  static constexpr std::size_t photon_number(std::size_t index) noexcept { return index / 2; }
  static constexpr Spin spin(std::size_t index) noexcept {
    return index % 2 == 0 ? Spin::Up : Spin::Down;
  }

  Eigen::VectorXd vacuum(Spin s) const;
  Eigen::VectorXd fock_state(std::size_t n, Spin s) const;

 private:
  std::size_t cutoff_;
};

/// Photon-parity sector of the basis: states with n even (parity +1) or odd (-1).
struct ParitySector {
  int parity;                        // +1 or -1
  std::vector<std::size_t> indices;  // full-basis index of each sector index
  SymmetricBandMatrix matrix;
};

/// Hamiltonian in the FockSpinBasis ordering, held as a symmetric band
/// (photon numbers couple at most to n +- 4, so the bandwidth is 9).
class HamiltonianMatrix {
 public:
  HamiltonianMatrix(FockSpinBasis basis, SymmetricBandMatrix band)
      : basis_(basis), band_(std::move(band)) {}

  const FockSpinBasis& basis() const noexcept { return basis_; }
  std::size_t dim() const noexcept { return band_.dim(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return band_(i, j); }
  const SymmetricBandMatrix& band() const noexcept { return band_; }
  Eigen::MatrixXd dense() const { return band_.dense(); }

  /// Restriction to one photon-parity sector. Couplings across sectors are
  /// zero by construction, so the two sectors together reproduce H.
  ParitySector sector(int parity) const;

 private:
  FockSpinBasis basis_;
  SymmetricBandMatrix band_;
};

HamiltonianMatrix build_hamiltonian(const ModelParams& params, const FockSpinBasis& basis);

/// Effective mass of the spin-resolved oscillator, [1 -+ ((1-chi)/(1+chi)) g2/g_T]^-1.
/// Equal to 1 for chi = 1.
double effective_mass(const ModelParams& params, Spin s);

/// v_s(x) = (omega/2)(1 +- g2/g_T) x^2 + 4 a4 x^4 in the x-representation.
double effective_potential(const ModelParams& params, Spin s, double x);

/// <exp(i pi a^+a)> of a normalized state. Throws ConfigError if the norm
/// deviates from 1 by more than 1e-8.
double parity_expectation(const Eigen::VectorXd& state, const FockSpinBasis& basis);

/// Throws ConfigError unless |  ||state|| - 1 | <= tol and sizes agree.
void require_normalized(const Eigen::VectorXd& state, const FockSpinBasis& basis,
                        double tol = 1e-8);

}  // namespace qrabi
