#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qrabi/model.hpp"
#include "qrabi/spectrum.hpp"

namespace qrabi {

/// Parameter estimated by the probe. The library defaults to g2.
enum class Parameter { G2, ModeFrequency, QubitSplitting, A4 };

double parameter_value(const ModelParams& params, Parameter lambda);
ModelParams with_parameter(ModelParams params, Parameter lambda, double value);

/// F_Q = 4 [<t|t> - <t|psi>^2] with the central-difference tangent
/// t = (psi_next - psi_prev) / (2 delta). Endpoint states are sign-aligned to
/// positive overlap with psi before differencing.
struct QfiTerms {
  double fq = 0.0;
  double tangent_norm2 = 0.0;  // <t|t>
  double overlap_term = 0.0;   // <t|psi>^2, vanishes for real states
};
QfiTerms qfi_from_states(const Eigen::VectorXd& prev, const Eigen::VectorXd& psi,
                         const Eigen::VectorXd& next, double delta);

/// Same, with the one-sided second-order tangent
/// t = (3 psi - 4 psi(lambda - delta) + psi(lambda - 2 delta)) / (2 delta).
QfiTerms qfi_from_states_backward(const Eigen::VectorXd& prev2, const Eigen::VectorXd& prev,
                                  const Eigen::VectorXd& psi, double delta);

/// chi_F = 2 (1 - |<psi|psi_shifted>|) / delta^2, evaluated without the
/// cancellation of forming 1 - overlap directly.
double fidelity_susceptibility_from_states(const Eigen::VectorXd& psi,
                                           const Eigen::VectorXd& shifted, double delta);

struct QfiOptions {
  Parameter lambda = Parameter::G2;
  double delta = 0.0;              // <= 0 selects 1e-5 * g_T
  double energy_tol = 1e-10;       // cutoff convergence of the ground energy
  double tail_tol = 1e-20;         // weight allowed in the top four Fock levels
  ConvergencePolicy policy{};
  double degeneracy_factor = 100.0;  // same-parity gap must exceed factor * delta * omega
};

struct QfiPoint {
  double lambda = 0.0;
  double delta = 0.0;
  double fq = 0.0;
  double chi_f = 0.0;
  double tangent_norm2 = 0.0;
  double overlap_term = 0.0;
  double gap = 0.0;               // global E1 - E0
  double same_parity_gap = 0.0;
  int parity = 1;
  std::size_t cutoff = 0;
  bool one_sided = false;  // backward stencil at the a4 = 0 stability edge
};

/// Ground-state QFI with respect to options.lambda at the point `params`.
/// Throws InstabilityError in the unbounded regime, DegeneracyError when the
/// same-parity gap is below the guard, ConvergenceError when the cutoff
/// ceiling is reached.
QfiPoint qfi_at(const ModelParams& params, const QfiOptions& options = {});

/// chi_F alone; an independent route to F_Q / 4.
double fidelity_susceptibility(const ModelParams& params, const QfiOptions& options = {});

struct QfiCurve {
  std::vector<double> g2_grid;
  std::vector<double> fq;
  std::vector<double> chi_f;
  std::vector<double> e_cr;  // fq^-1/2
  std::vector<QfiPoint> points;
  double peak_g2 = 0.0;
  double peak_fq = 0.0;
  double delta_lambda = 0.0;
  bool edge_peak = false;  // peak pinned at g_T for a4 = 0
};

/// F_Q over an ascending g2 grid, with the maximum refined by golden-section
/// search between the neighbours of the sampled maximum. A sampled maximum
/// on either end of the grid throws PeakAtEndpointError, except for a4 = 0
/// with the grid ending exactly at g_T, where the QFI is largest at the edge
/// of the stable region.
QfiCurve qfi_curve(const ModelParams& params, std::span<const double> g2_grid,
                   const QfiOptions& options = {});

/// Builds the curve from points already evaluated on `g2_grid` (one per grid
/// value, same order) and refines the peak as qfi_curve does.
QfiCurve assemble_qfi_curve(const ModelParams& params, std::span<const double> g2_grid,
                            std::vector<QfiPoint> points, const QfiOptions& options = {});

}  // namespace qrabi
