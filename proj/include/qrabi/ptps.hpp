#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qrabi/metrology.hpp"
#include "qrabi/model.hpp"
#include "qrabi/spectrum.hpp"

namespace qrabi {

struct PtpsOptions {
  double tol = 1e-4;         // relative quadrature tolerance
  double gap_tol = 1e-8;     // absolute level convergence at each node
  ConvergencePolicy policy{};
  double gap_floor = 1e-10;  // in units of Omega (omega when Omega = 0)
  // Without the quartic term, nodes with g2 >= collapse_window * g_T converge only
  // algebraically; they are taken at the ceiling cutoff and counted as unconverged.
  double collapse_window = 0.99;
};

/// Probe-state preparation time T = int_0^1 dgbar / Delta(gbar), gbar = g2 / g2c_omega.
struct PtpsResult {
  double time = 0.0;               // from the global gap
  double time_same_parity = 0.0;   // same nodes, gap within the ground-state parity sector
  double g2c_omega = 0.0;
  std::size_t quadrature_points = 0;
  double estimated_error = 0.0;
  double min_gap = 0.0;
  double max_gap = 0.0;
  int parity_crossings = 0;        // changes of the first excited level's parity between nodes
  std::size_t unconverged_nodes = 0;
  std::vector<GapPoint> nodes;     // ascending in g2
};

/// T for a gap given as a function of gbar in [0, 1]; the nodes field is left empty.
PtpsResult ptps_from_gap(const std::function<double(double)>& gap_of_gbar, double tol = 1e-8);

/// T along g2 in [0, g2c_omega] with the other parameters taken from `params`.
/// Throws ConvergenceError from any node and Error when the gap falls below
/// the floor.
PtpsResult ptps(const ModelParams& params, double g2c_omega, const PtpsOptions& options = {});

/// Locates g2c_omega as the QFI peak on `g2_grid` first.
PtpsResult ptps(const ModelParams& params, std::span<const double> g2_grid,
                const QfiOptions& qfi_options, const PtpsOptions& options = {});

}  // namespace qrabi
