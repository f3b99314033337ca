#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace qrabi {

/// Accepted leaf interval of an adaptive Simpson run.
struct SimpsonPanel {
  double a, b;
  double fa, fm, fb;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  std::vector<SimpsonPanel> panels;  // left to right
};

/// Adaptive Simpson quadrature with Richardson correction. Integrand values
/// are cached per abscissa, so each node is evaluated once. Panels are split
/// until |S2 - S1| / 15 <= their share of tol * |integral|.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol, int max_depth = 40);

/// Composite Simpson over previously accepted panels with another integrand
/// sampled on the same nodes.
double simpson_on_panels(const std::vector<SimpsonPanel>& panels,
                         const std::function<double(double)>& f);

}  // namespace qrabi
