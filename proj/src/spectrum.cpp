#include "qrabi/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "qrabi/error.hpp"

namespace qrabi {

double SpectrumResult::same_parity_gap() const noexcept {
  for (std::size_t j = 1; j < parities.size(); ++j) {
    if (parities[j] == parities[0]) return eigenvalues[static_cast<Eigen::Index>(j)] - eigenvalues[0];
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void fix_sign_convention(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      // strict comparison with a relative margin keeps the first index on ties
      if (std::abs(vectors(r, c)) > best * (1.0 + 1e-12)) {
        best = std::abs(vectors(r, c));
        pivot = r;
      }
    }
    if (vectors(pivot, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

SectorLevels solve_sector(const HamiltonianMatrix& h, int parity, std::size_t count,
                          bool want_vectors) {
  const ParitySector sector = h.sector(parity);
  const auto local = lowest_eigenpairs(sector.matrix, count, want_vectors);
  SectorLevels out;
  out.parity = parity;
  out.values = local.values;
  if (want_vectors) {
    out.vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(h.dim()), local.vectors.cols());
    for (std::size_t i = 0; i < sector.indices.size(); ++i) {
      out.vectors.row(static_cast<Eigen::Index>(sector.indices[i])) =
          local.vectors.row(static_cast<Eigen::Index>(i));
    }
    fix_sign_convention(out.vectors);
  }
  return out;
}

SpectrumResult solve_spectrum(const HamiltonianMatrix& h, std::size_t k, bool want_vectors) {
  if (k == 0 || k > h.dim()) {
    throw ConfigError("cannot request " + std::to_string(k) + " levels from dimension " +
                      std::to_string(h.dim()));
  }
  const std::size_t even_dim = 2 * (h.basis().cutoff() / 2 + 1);
  const std::size_t odd_dim = h.dim() - even_dim;
  const auto even = solve_sector(h, +1, std::min(k, even_dim), want_vectors);
  const auto odd = solve_sector(h, -1, std::min(k, odd_dim), want_vectors);

  struct Entry {
    double value;
    const SectorLevels* from;
    Eigen::Index col;
  };
  std::vector<Entry> merged;
  for (Eigen::Index i = 0; i < even.values.size(); ++i) merged.push_back({even.values[i], &even, i});
  for (Eigen::Index i = 0; i < odd.values.size(); ++i) merged.push_back({odd.values[i], &odd, i});
  std::stable_sort(merged.begin(), merged.end(),
                   [](const Entry& a, const Entry& b) { return a.value < b.value; });
  merged.resize(k);

  SpectrumResult out;
  out.cutoff_used = h.basis().cutoff();
  out.eigenvalues.resize(static_cast<Eigen::Index>(k));
  if (want_vectors) out.eigenvectors.resize(static_cast<Eigen::Index>(h.dim()), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    out.eigenvalues[idx] = merged[i].value;
    out.parities.push_back(merged[i].from->parity);
    if (want_vectors) out.eigenvectors.col(idx) = merged[i].from->vectors.col(merged[i].col);
  }
  out.gap = k > 1 ? out.eigenvalues[1] - out.eigenvalues[0] : 0.0;
  return out;
}

SpectrumResult converged_spectrum(const ModelParams& params, std::size_t k, double tol,
                                  const ConvergencePolicy& policy, std::size_t track) {
  params.validate();
  if (!(tol > 0.0)) throw ConfigError("convergence tolerance must be positive");
  if (policy.initial_cutoff < 4 || policy.max_cutoff < policy.initial_cutoff) {
    throw ConfigError("invalid cutoff policy");
  }
  if (params.unbounded()) {
    throw InstabilityError("spectrum unbounded from below: a4 = 0 and g2 = " +
                           std::to_string(params.g2) + " > g_T = " + std::to_string(params.g_t()));
  }
  if (track == 0 || track > k) track = k;

  auto levels_at = [&](std::size_t cutoff, bool vectors) {
    return solve_spectrum(build_hamiltonian(params, FockSpinBasis(cutoff)), k, vectors);
  };

  std::size_t cutoff = policy.initial_cutoff;
  SpectrumResult previous = levels_at(cutoff, false);
  while (true) {
    const std::size_t next = std::min(2 * cutoff, policy.max_cutoff);
    if (next == cutoff) break;
    SpectrumResult current = levels_at(next, false);
    double delta = 0.0;
    for (std::size_t i = 0; i < track; ++i) {
      const auto idx = static_cast<Eigen::Index>(i);
      delta = std::max(delta, std::abs(current.eigenvalues[idx] - previous.eigenvalues[idx]));
    }
    cutoff = next;
    previous = std::move(current);
    previous.convergence_delta = delta;
    if (delta < tol) {
      previous.converged = true;
      if (policy.want_vectors) {
        SpectrumResult with_vectors = levels_at(cutoff, true);
        with_vectors.convergence_delta = delta;
        with_vectors.converged = true;
        return with_vectors;
      }
      return previous;
    }
    if (cutoff == policy.max_cutoff) break;
  }

  // ceiling reached without settling
  const double delta = previous.convergence_delta;
  SpectrumResult out = policy.want_vectors ? levels_at(cutoff, true) : std::move(previous);
  out.converged = false;
  out.convergence_delta = delta;
  return out;
}

GapPoint gap_at(const ModelParams& params, double tol, const ConvergencePolicy& policy,
               bool allow_unconverged) {
  ConvergencePolicy values_only = policy;
  values_only.want_vectors = false;
  const SpectrumResult s = converged_spectrum(params, 4, tol, values_only, 2);
  if (!s.converged && !allow_unconverged && !params.at_collapse_point()) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "gap did not converge at g2 = %.17g (last change %.3g at cutoff %zu)",
                  params.g2, s.convergence_delta, s.cutoff_used);
    throw ConvergenceError(msg, params.g2);
  }
  GapPoint p;
  p.g2 = params.g2;
  p.delta = s.gap;
  p.same_parity_gap = s.same_parity_gap();
  p.ground_parity = s.parities[0];
  p.excited_parity = s.parities[1];
  p.cutoff = s.cutoff_used;
  p.convergence_delta = s.convergence_delta;
  p.converged = s.converged;
  return p;
}

std::vector<GapPoint> gap_curve(const ModelParams& params, std::span<const double> g2_grid,
                                double tol, const ConvergencePolicy& policy) {
  if (g2_grid.empty()) throw ConfigError("gap curve needs a non-empty coupling grid");
  if (!std::is_sorted(g2_grid.begin(), g2_grid.end())) {
    throw ConfigError("coupling grid must be ascending");
  }
  std::vector<GapPoint> out;
  out.reserve(g2_grid.size());
  for (double g2 : g2_grid) {
    ModelParams p = params;
    p.g2 = g2;
    out.push_back(gap_at(p, tol, policy));
  }
  return out;
}

}  // namespace qrabi
