#include "qrabi/ptps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>

#include "qrabi/error.hpp"
#include "qrabi/quadrature.hpp"

namespace qrabi {

namespace {

void fill_extremes(PtpsResult& r, const std::vector<double>& gaps) {
  r.min_gap = *std::min_element(gaps.begin(), gaps.end());
  r.max_gap = *std::max_element(gaps.begin(), gaps.end());
}

}  // namespace

PtpsResult ptps_from_gap(const std::function<double(double)>& gap_of_gbar, double tol) {
  std::vector<double> gaps;
  const auto quad = adaptive_simpson(
      [&](double gbar) {
        const double gap = gap_of_gbar(gbar);
        if (!(gap > 0.0)) throw Error("gap must be positive on [0, 1]");
        gaps.push_back(gap);
        return 1.0 / gap;
      },
      0.0, 1.0, tol);
  PtpsResult r;
  r.time = quad.value;
  r.time_same_parity = std::numeric_limits<double>::quiet_NaN();
  r.quadrature_points = quad.evaluations;
  r.estimated_error = quad.error_estimate;
  r.g2c_omega = 1.0;
  fill_extremes(r, gaps);
  return r;
}

PtpsResult ptps(const ModelParams& params, double g2c_omega, const PtpsOptions& options) {
  params.validate();
  if (!(g2c_omega > 0.0)) throw ConfigError("g2c_omega must be positive");
  const double floor =
      options.gap_floor * (params.qubit_splitting > 0.0 ? params.qubit_splitting : params.omega);

  std::map<double, GapPoint> nodes;
  auto node = [&](double gbar) -> const GapPoint& {
    if (auto it = nodes.find(gbar); it != nodes.end()) return it->second;
    ModelParams p = params;
    p.g2 = gbar * g2c_omega;
    const bool near_collapse = p.a4 == 0.0 && p.g2 >= options.collapse_window * p.g_t();
    GapPoint g = gap_at(p, options.gap_tol, options.policy, near_collapse);
    if (!(g.delta > floor)) {
      char msg[128];
      std::snprintf(msg, sizeof msg, "gap %.6g below floor %.3g at g2 = %.17g", g.delta, floor, p.g2);
      throw DegeneracyError(msg);
    }
    return nodes.emplace(gbar, g).first->second;
  };

  const auto quad = adaptive_simpson([&](double gbar) { return 1.0 / node(gbar).delta; }, 0.0,
                                     1.0, options.tol);

  PtpsResult r;
  r.time = quad.value;
  r.g2c_omega = g2c_omega;
  r.quadrature_points = quad.evaluations;
  r.estimated_error = quad.error_estimate;
  r.time_same_parity = simpson_on_panels(quad.panels, [&](double gbar) {
    const double gap = node(gbar).same_parity_gap;
    return std::isfinite(gap) && gap > 0.0 ? 1.0 / gap : std::numeric_limits<double>::quiet_NaN();
  });

  std::vector<double> gaps;
  int last_parity = 0;
  for (const auto& [gbar, g] : nodes) {
    gaps.push_back(g.delta);
    if (last_parity != 0 && g.excited_parity != last_parity) ++r.parity_crossings;
    last_parity = g.excited_parity;
    if (!g.converged) ++r.unconverged_nodes;
    r.nodes.push_back(g);
  }
  fill_extremes(r, gaps);
  return r;
}

PtpsResult ptps(const ModelParams& params, std::span<const double> g2_grid,
                const QfiOptions& qfi_options, const PtpsOptions& options) {
  const QfiCurve curve = qfi_curve(params, g2_grid, qfi_options);
  return ptps(params, curve.peak_g2, options);
}

}  // namespace qrabi
