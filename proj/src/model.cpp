#include "qrabi/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <string>

#include "qrabi/error.hpp"

namespace qrabi {

bool ModelParams::unbounded() const noexcept {
  return a4 == 0.0 && g2 > g_t() * (1.0 + 1e-12);
}

bool ModelParams::at_collapse_point() const noexcept {
  return a4 == 0.0 && std::abs(g2 - g_t()) <= 1e-9 * g_t();
}

void ModelParams::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("omega must be positive");
  if (!(qubit_splitting >= 0.0)) throw ConfigError("qubit splitting must be non-negative");
  if (!(g2 >= 0.0)) throw ConfigError("g2 must be non-negative");
  if (!(a4 >= 0.0)) throw ConfigError("a4 must be non-negative");
  if (!(chi > -1.0)) throw ConfigError("chi must exceed -1");
}

FockSpinBasis::FockSpinBasis(std::size_t cutoff) : cutoff_(cutoff) {
  if (cutoff < 4) {
    throw ConfigError("photon cutoff must be at least 4 (got " + std::to_string(cutoff) + ")");
  }
}

Eigen::VectorXd FockSpinBasis::vacuum(Spin s) const { return fock_state(0, s); }

Eigen::VectorXd FockSpinBasis::fock_state(std::size_t n, Spin s) const {
  if (n > cutoff_) throw ConfigError("Fock state beyond cutoff");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim()));
  v[static_cast<Eigen::Index>(index(n, s))] = 1.0;
  return v;
}

ParitySector HamiltonianMatrix::sector(int parity) const {
  ParitySector out;
  out.parity = parity;
  const std::size_t first = parity > 0 ? 0 : 1;
  for (std::size_t n = first; n <= basis_.cutoff(); n += 2) {
    out.indices.push_back(FockSpinBasis::index(n, Spin::Up));
    out.indices.push_back(FockSpinBasis::index(n, Spin::Down));
  }
  // within a sector n -> n +- 4 becomes a local offset of at most 4 + 1
  constexpr std::size_t kd = 5;
  out.matrix = SymmetricBandMatrix(out.indices.size(), kd);
  for (std::size_t j = 0; j < out.indices.size(); ++j) {
    for (std::size_t i = j; i < std::min(out.indices.size(), j + kd + 1); ++i) {
      const double v = band_(out.indices[i], out.indices[j]);
      if (v != 0.0) out.matrix.set(i, j, v);
    }
  }
  return out;
}

HamiltonianMatrix build_hamiltonian(const ModelParams& params, const FockSpinBasis& basis) {
  params.validate();
  const std::size_t cutoff = basis.cutoff();

  // (a^+ + a)^2 and ^4 are exact for n, m <= cutoff once formed at cutoff + 4.
  const auto x = LadderOperator::position_quadrature(basis.aux_cutoff() + 1);
  const auto x2 = x * x;
  const auto x4 = x2 * x2;

  SymmetricBandMatrix band(basis.dim(), 9);
  for (std::size_t n = 0; n <= cutoff; ++n) {
    const auto up = FockSpinBasis::index(n, Spin::Up);
    const auto down = FockSpinBasis::index(n, Spin::Down);
    const double stark_shift = (params.chi - 1.0) * (2.0 * n + 1.0);
    for (std::size_t m = n; m <= std::min(cutoff, n + 4); ++m) {
      double quad = x2(n, m);
      if (m == n) quad += stark_shift;
      double common = params.a4 * x4(n, m);
      if (m == n) common += params.omega * static_cast<double>(n);
      const double upv = common + params.g2 * quad;
      const double downv = common - params.g2 * quad;
      if (upv != 0.0) band.set(FockSpinBasis::index(m, Spin::Up), up, upv);
      if (downv != 0.0) band.set(FockSpinBasis::index(m, Spin::Down), down, downv);
    }
    band.set(down, up, 0.5 * params.qubit_splitting);
  }
  return HamiltonianMatrix(basis, std::move(band));
}

double effective_mass(const ModelParams& params, Spin s) {
  const double skew = (1.0 - params.chi) / (1.0 + params.chi) * params.coupling_ratio();
  return 1.0 / (1.0 - sign(s) * skew);
}

double effective_potential(const ModelParams& params, Spin s, double x) {
  const double x2 = x * x;
  return 0.5 * params.omega * (1.0 + sign(s) * params.coupling_ratio()) * x2 +
         4.0 * params.a4 * x2 * x2;
}

void require_normalized(const Eigen::VectorXd& state, const FockSpinBasis& basis, double tol) {
  if (static_cast<std::size_t>(state.size()) != basis.dim()) {
    throw ConfigError("state dimension does not match basis");
  }
  const double norm = state.norm();
  if (std::abs(norm - 1.0) > tol) {
    throw ConfigError("state is not normalized (norm = " + std::to_string(norm) + ")");
  }
}

double parity_expectation(const Eigen::VectorXd& state, const FockSpinBasis& basis) {
  require_normalized(state, basis);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    const double w = state[i] * state[i];
    acc += (FockSpinBasis::photon_number(static_cast<std::size_t>(i)) % 2 == 0) ? w : -w;
  }
  return acc;
}

}  // namespace qrabi
