#include "qrabi/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "qrabi/error.hpp"

namespace qrabi {

namespace {

Eigen::VectorXd aligned(const Eigen::VectorXd& v, const Eigen::VectorXd& reference) {
  return v.dot(reference) < 0.0 ? Eigen::VectorXd(-v) : v;
}

QfiTerms terms_from_tangent(const Eigen::VectorXd& tangent, const Eigen::VectorXd& psi) {
  QfiTerms t;
  t.tangent_norm2 = tangent.squaredNorm();
  const double proj = tangent.dot(psi);
  t.overlap_term = proj * proj;
  t.fq = 4.0 * (t.tangent_norm2 - t.overlap_term);
  return t;
}

double tail_weight(const Eigen::VectorXd& state, const FockSpinBasis& basis) {
  const std::size_t cutoff = basis.cutoff();
  double acc = 0.0;
  for (std::size_t n = cutoff - 3; n <= cutoff; ++n) {
    for (Spin s : {Spin::Up, Spin::Down}) {
      const double c = state[static_cast<Eigen::Index>(FockSpinBasis::index(n, s))];
      acc += c * c;
    }
  }
  return acc;
}

double resolve_delta(const ModelParams& params, const QfiOptions& options) {
  return options.delta > 0.0 ? options.delta : 1e-5 * params.g_t();
}

}  // namespace

double parameter_value(const ModelParams& params, Parameter lambda) {
  switch (lambda) {
    case Parameter::G2: return params.g2;
    case Parameter::ModeFrequency: return params.omega;
    case Parameter::QubitSplitting: return params.qubit_splitting;
    case Parameter::A4: return params.a4;
  }
  return 0.0;
}

ModelParams with_parameter(ModelParams params, Parameter lambda, double value) {
  switch (lambda) {
    case Parameter::G2: params.g2 = value; break;
    case Parameter::ModeFrequency: params.omega = value; break;
    case Parameter::QubitSplitting: params.qubit_splitting = value; break;
    case Parameter::A4: params.a4 = value; break;
  }
  return params;
}

QfiTerms qfi_from_states(const Eigen::VectorXd& prev, const Eigen::VectorXd& psi,
                         const Eigen::VectorXd& next, double delta) {
  if (!(delta > 0.0)) throw ConfigError("finite-difference step must be positive");
  const Eigen::VectorXd tangent = (aligned(next, psi) - aligned(prev, psi)) / (2.0 * delta);
  return terms_from_tangent(tangent, psi);
}

QfiTerms qfi_from_states_backward(const Eigen::VectorXd& prev2, const Eigen::VectorXd& prev,
                                  const Eigen::VectorXd& psi, double delta) {
  if (!(delta > 0.0)) throw ConfigError("finite-difference step must be positive");
  const Eigen::VectorXd tangent =
      (3.0 * psi - 4.0 * aligned(prev, psi) + aligned(prev2, psi)) / (2.0 * delta);
  return terms_from_tangent(tangent, psi);
}

double fidelity_susceptibility_from_states(const Eigen::VectorXd& psi,
                                           const Eigen::VectorXd& shifted, double delta) {
  if (!(delta > 0.0)) throw ConfigError("finite-difference step must be positive");
  const Eigen::VectorXd a = psi.normalized();
  Eigen::VectorXd b = shifted.normalized();
  if (a.dot(b) < 0.0) b = -b;
  // for unit vectors 1 - <a|b> = |a - b|^2 / 2
  const double one_minus_fidelity = 0.5 * (a - b).squaredNorm();
  return 2.0 * one_minus_fidelity / (delta * delta);
}

QfiPoint qfi_at(const ModelParams& params, const QfiOptions& options) {
  params.validate();
  if (params.unbounded()) {
    throw InstabilityError("no ground state: a4 = 0 and g2 = " + std::to_string(params.g2) +
                           " beyond g_T");
  }
  const double lambda = parameter_value(params, options.lambda);
  const double delta = resolve_delta(params, options);
  auto shifted = [&](double offset) {
    return with_parameter(params, options.lambda, lambda + offset);
  };

  QfiPoint out;
  out.lambda = lambda;
  out.delta = delta;
  out.one_sided = shifted(delta).unbounded();
  if (out.one_sided && (shifted(-delta).unbounded() || shifted(-2.0 * delta).unbounded())) {
    throw InstabilityError("no stable finite-difference stencil around this point");
  }

  ConvergencePolicy policy = options.policy;
  policy.want_vectors = true;
  SpectrumResult reference = converged_spectrum(params, 4, options.energy_tol, policy, 1);
  if (!reference.converged) {
    throw ConvergenceError("ground energy did not converge at g2 = " + std::to_string(params.g2),
                           params.g2);
  }
  std::size_t cutoff = reference.cutoff_used;
  while (tail_weight(reference.state(0), FockSpinBasis(cutoff)) > options.tail_tol) {
    if (cutoff >= policy.max_cutoff) {
      throw ConvergenceError("ground state still touches the cutoff at g2 = " +
                                 std::to_string(params.g2),
                             params.g2);
    }
    cutoff = std::min(2 * cutoff, policy.max_cutoff);
    reference = solve_spectrum(build_hamiltonian(params, FockSpinBasis(cutoff)), 4, true);
  }

  out.cutoff = cutoff;
  out.parity = reference.parities[0];
  out.gap = reference.gap;
  out.same_parity_gap = reference.same_parity_gap();
  const double guard = options.degeneracy_factor * delta * params.omega;
  if (std::isfinite(out.same_parity_gap) && out.same_parity_gap < guard) {
    throw DegeneracyError("ground state nearly degenerate within its parity sector (gap " +
                          std::to_string(out.same_parity_gap) + ")");
  }

  const FockSpinBasis basis(cutoff);
  auto ground = [&](const ModelParams& p) -> Eigen::VectorXd {
    return solve_sector(build_hamiltonian(p, basis), out.parity, 1).vectors.col(0);
  };
  const Eigen::VectorXd psi = reference.state(0);

  QfiTerms terms;
  if (out.one_sided) {
    const Eigen::VectorXd prev = ground(shifted(-delta));
    const Eigen::VectorXd prev2 = ground(shifted(-2.0 * delta));
    terms = qfi_from_states_backward(prev2, prev, psi, delta);
    // one-sided fidelity carries an O(delta) bias; extrapolate it away
    out.chi_f = 2.0 * fidelity_susceptibility_from_states(psi, prev, delta) -
                fidelity_susceptibility_from_states(psi, prev2, 2.0 * delta);
  } else {
    const Eigen::VectorXd next = ground(shifted(delta));
    const Eigen::VectorXd prev = ground(shifted(-delta));
    terms = qfi_from_states(prev, psi, next, delta);
    // averaging the two one-sided fidelities cancels the O(delta) bias
    out.chi_f = 0.5 * (fidelity_susceptibility_from_states(psi, next, delta) +
                       fidelity_susceptibility_from_states(psi, prev, delta));
  }
  out.fq = terms.fq;
  out.tangent_norm2 = terms.tangent_norm2;
  out.overlap_term = terms.overlap_term;
  return out;
}

double fidelity_susceptibility(const ModelParams& params, const QfiOptions& options) {
  return qfi_at(params, options).chi_f;
}

namespace {

QfiOptions curve_options(const ModelParams& params, const QfiOptions& options) {
  QfiOptions opts = options;
  opts.lambda = Parameter::G2;
  opts.delta = resolve_delta(params, options);
  return opts;
}

void check_curve_grid(std::span<const double> g2_grid) {
  if (g2_grid.size() < 3) throw ConfigError("QFI curve needs at least three grid points");
  if (!std::is_sorted(g2_grid.begin(), g2_grid.end())) {
    throw ConfigError("coupling grid must be ascending");
  }
}

}  // namespace

QfiCurve qfi_curve(const ModelParams& params, std::span<const double> g2_grid,
                   const QfiOptions& options) {
  check_curve_grid(g2_grid);
  const QfiOptions opts = curve_options(params, options);
  std::vector<QfiPoint> points;
  points.reserve(g2_grid.size());
  for (double g2 : g2_grid) {
    ModelParams p = params;
    p.g2 = g2;
    points.push_back(qfi_at(p, opts));
  }
  return assemble_qfi_curve(params, g2_grid, std::move(points), opts);
}

QfiCurve assemble_qfi_curve(const ModelParams& params, std::span<const double> g2_grid,
                            std::vector<QfiPoint> points, const QfiOptions& options) {
  check_curve_grid(g2_grid);
  if (points.size() != g2_grid.size()) throw ConfigError("one QFI point per grid value expected");
  const QfiOptions opts = curve_options(params, options);

  QfiCurve curve;
  curve.delta_lambda = opts.delta;
  curve.g2_grid.assign(g2_grid.begin(), g2_grid.end());
  for (const QfiPoint& point : points) {
    curve.fq.push_back(point.fq);
    curve.chi_f.push_back(point.chi_f);
    curve.e_cr.push_back(1.0 / std::sqrt(point.fq));
  }
  curve.points = std::move(points);

  const auto best = static_cast<std::size_t>(
      std::max_element(curve.fq.begin(), curve.fq.end()) - curve.fq.begin());
  const std::size_t last = curve.fq.size() - 1;
  if (best == last && params.a4 == 0.0 &&
      std::abs(g2_grid[last] - params.g_t()) <= 1e-9 * params.g_t()) {
    curve.edge_peak = true;
    curve.peak_g2 = g2_grid[last];
    curve.peak_fq = curve.fq[last];
    return curve;
  }
  if (best == 0 || best == last) {
    throw PeakAtEndpointError("QFI maximum at grid endpoint g2 = " +
                              std::to_string(g2_grid[best]) + "; widen the coupling grid");
  }

  std::map<double, double> cache{{g2_grid[best - 1], curve.fq[best - 1]},
                                 {g2_grid[best], curve.fq[best]},
                                 {g2_grid[best + 1], curve.fq[best + 1]}};
  auto fq_at = [&](double g2) {
    if (auto it = cache.find(g2); it != cache.end()) return it->second;
    ModelParams p = params;
    p.g2 = g2;
    const double v = qfi_at(p, opts).fq;
    cache.emplace(g2, v);
    return v;
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = g2_grid[best - 1];
  double b = g2_grid[best + 1];
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fq_at(c);
  double fd = fq_at(d);
  const double width_tol = 1e-9 * params.g_t();
  for (int iter = 0; iter < 200 && b - a > width_tol; ++iter) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fq_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fq_at(d);
    }
  }
  const auto top = std::max_element(cache.begin(), cache.end(),
                                     [](const auto& l, const auto& r) { return l.second < r.second; });
  curve.peak_g2 = top->first;
  curve.peak_fq = top->second;
  return curve;
}

}  // namespace qrabi
