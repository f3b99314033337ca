#include <doctest.h>

#include <cmath>
#include <vector>

#include "qrabi/error.hpp"
#include "qrabi/metrology.hpp"

using namespace qrabi;

namespace {

Eigen::VectorXd rotor(double lambda) {
  Eigen::VectorXd v(2);
  v << std::cos(lambda), std::sin(lambda);
  return v;
}

ModelParams quartic(double ratio, double a4 = 3e-4) {
  ModelParams p{.omega = 1.0, .qubit_splitting = 1.0, .a4 = a4};
  p.g2 = ratio * p.g_t();
  return p;
}

QfiOptions coarse() {
  QfiOptions o;
  o.policy.max_cutoff = 1024;
  return o;
}

}  // namespace

TEST_CASE("two-level family") {
  const double l = 0.37, d = 1e-4;
  const auto t = qfi_from_states(rotor(l - d), rotor(l), rotor(l + d), d);
  CHECK(t.fq == doctest::Approx(4.0).epsilon(1e-7));
  CHECK(t.overlap_term < 1e-12);
  CHECK(fidelity_susceptibility_from_states(rotor(l), rotor(l + d), d) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(qfi_from_states_backward(rotor(l - 2 * d), rotor(l - d), rotor(l), d).fq == doctest::Approx(4.0).epsilon(1e-7));

  // arbitrary signs on the neighbours are aligned away
  const auto flipped = qfi_from_states(-rotor(l - d), rotor(l), -rotor(l + d), d);
  CHECK(flipped.fq == doctest::Approx(t.fq).epsilon(1e-12));
  CHECK(fidelity_susceptibility_from_states(rotor(l), -rotor(l + d), d) == doctest::Approx(1.0).epsilon(1e-7));

  const auto still = qfi_from_states(rotor(l), rotor(l), rotor(l), d);
  CHECK(still.fq == 0.0);
  CHECK(fidelity_susceptibility_from_states(rotor(l), rotor(l), d) == 0.0);
}

TEST_CASE("lambda-independent ground state has zero information") {
  // at g2 = 0 the ground state is vacuum times the sigma_x eigenstate for any omega and Omega
  const ModelParams p{.omega = 1.0, .qubit_splitting = 1.0};
  for (Parameter lambda : {Parameter::QubitSplitting, Parameter::ModeFrequency}) {
    QfiOptions o;
    o.lambda = lambda;
    o.delta = 1e-5;
    const auto q = qfi_at(p, o);
    CHECK(std::abs(q.fq) < 1e-12);
    CHECK(std::abs(q.chi_f) < 1e-12);
  }
}

TEST_CASE("parameter plumbing") {
  const ModelParams p{.omega = 1.5, .qubit_splitting = 0.7, .g2 = 0.2, .a4 = 1e-3};
  CHECK(parameter_value(p, Parameter::G2) == 0.2);
  CHECK(parameter_value(p, Parameter::ModeFrequency) == 1.5);
  CHECK(parameter_value(p, Parameter::QubitSplitting) == 0.7);
  CHECK(parameter_value(p, Parameter::A4) == 1e-3);
  CHECK(with_parameter(p, Parameter::A4, 2e-3).a4 == 2e-3);
  CHECK(with_parameter(p, Parameter::G2, 0.3).g2 == 0.3);
}

TEST_CASE("fidelity identity, vanishing overlap term and step plateau") {
  for (double ratio : {0.6, 1.0, 1.08, 1.2}) {
    CAPTURE(ratio);
    const auto p = quartic(ratio);
    auto o = coarse();
    const auto q = qfi_at(p, o);
    CHECK(q.fq > 0.0);
    CHECK(std::abs(4.0 * q.chi_f - q.fq) / q.fq < 1e-3);
    CHECK(q.overlap_term < 1e-6 * q.tangent_norm2);
    CHECK(q.parity == 1);
    CHECK_FALSE(q.one_sided);

    o.delta = q.delta / 2.0;
    const auto half = qfi_at(p, o);
    CHECK(std::abs(half.fq - q.fq) / q.fq < 1e-3);
  }
}

TEST_CASE("near-degenerate points are refused") {
  auto o = coarse();
  o.degeneracy_factor = 1e12;
  CHECK_THROWS_AS(qfi_at(quartic(1.1), o), DegeneracyError);
}

TEST_CASE("stability edge uses the one-sided stencil") {
  ModelParams p{.omega = 1.0, .qubit_splitting = 1.0};
  p.g2 = p.g_t();
  const auto q = qfi_at(p, coarse());
  CHECK(q.one_sided);
  CHECK(std::abs(4.0 * q.chi_f - q.fq) / q.fq < 1e-3);
  p.g2 = 1.05 * p.g_t();
  CHECK_THROWS_AS(qfi_at(p, coarse()), InstabilityError);
}

TEST_CASE("QFI curve peak") {
  std::vector<double> grid;
  const auto p = quartic(0.0);
  for (int k = 0; k <= 10; ++k) grid.push_back((1.0 + 0.02 * k) * p.g_t());
  const auto c = qfi_curve(p, grid, coarse());
  REQUIRE(c.fq.size() == grid.size());
  CHECK(c.peak_g2 > grid.front());
  CHECK(c.peak_g2 < grid.back());
  CHECK_FALSE(c.edge_peak);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(c.peak_fq >= c.fq[i]);
    CHECK(c.e_cr[i] == doctest::Approx(1.0 / std::sqrt(c.fq[i])));
    CHECK(std::abs(4.0 * c.chi_f[i] - c.fq[i]) / c.fq[i] < 1e-3);
  }

  std::vector<double> rising;
  for (int k = 0; k < 5; ++k) rising.push_back((0.5 + 0.05 * k) * p.g_t());
  CHECK_THROWS_AS(qfi_curve(p, rising, coarse()), PeakAtEndpointError);

  ModelParams free{.omega = 1.0, .qubit_splitting = 1.0};
  std::vector<double> to_edge;
  for (int k = 0; k <= 4; ++k) to_edge.push_back((0.96 + 0.01 * k) * free.g_t());
  const auto e = qfi_curve(free, to_edge, coarse());
  CHECK(e.edge_peak);
  CHECK(e.peak_g2 == doctest::Approx(free.g_t()));
}
