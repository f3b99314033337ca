#include "qrabi/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qrabi/error.hpp"
#include "qrabi/metrology.hpp"
#include "qrabi/ptps.hpp"
#include "qrabi/semiclassical.hpp"
#include "qrabi/spectrum.hpp"
#include "qrabi/wavefunction.hpp"

namespace qrabi::cli {

using nlohmann::json;

namespace {

const std::vector<std::string> kCommands = {"spectrum",    "potential",    "semiclassical",
                                            "qfi",         "observables",  "wavefunction",
                                            "gap",         "ptps"};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ConfigError("cannot open " + path + " for writing");
    row_strings(header);
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(fmt(v));
    row_strings(cells);
  }

 private:
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  std::ofstream out_;
};

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

struct Failure {
  std::string type;
  std::string message;
  int exit_code = kConvergenceFailure;
};

Failure classify(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const InstabilityError& e) {
    return {"instability", e.what(), kInstability};
  } catch (const ConfigError& e) {
    return {"config", e.what(), kConfigError};
  } catch (const PeakAtEndpointError& e) {
    return {"peak_at_endpoint", e.what(), kConfigError};
  } catch (const ConvergenceError& e) {
    return {"convergence", e.what(), kConvergenceFailure};
  } catch (const DegeneracyError& e) {
    return {"degeneracy", e.what(), kConvergenceFailure};
  } catch (const SolverError& e) {
    return {"solver", e.what(), kConvergenceFailure};
  } catch (const std::exception& e) {
    return {"error", e.what(), kConvergenceFailure};
  }
}

int worst(int a, int b) {
  auto rank = [](int c) { return c == kInstability ? 3 : c == kConvergenceFailure ? 2 : c == kConfigError ? 1 : 0; };
  return rank(a) >= rank(b) ? a : b;
}

/// Results of a grid sweep in grid order; a slot is empty when the point failed.
template <typename T>
struct Sweep {
  std::vector<std::optional<T>> results;
  std::vector<std::optional<Failure>> failures;

  int exit_code() const {
    int code = kSuccess;
    for (const auto& f : failures) {
      if (f) code = worst(code, f->exit_code);
    }
    return code;
  }
};

template <typename T>
Sweep<T> sweep(std::size_t count, std::size_t jobs, const std::function<T(std::size_t)>& task) {
  Sweep<T> out;
  out.results.resize(count);
  out.failures.resize(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out.results[i] = task(i);
      } catch (...) {
        out.failures[i] = classify(std::current_exception());
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, count));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return out;
}

/// Bookkeeping shared by every command: output prefix, files written and
/// diagnostics for the metadata sidecar.
struct Run {
  const RunConfig& config;
  std::string prefix;
  json diagnostics = json::object();
  json outputs = json::array();
  json failures = json::array();

  std::string path(const std::string& suffix) {
    std::string p = prefix + suffix;
    outputs.push_back(p);
    return p;
  }

  template <typename T>
  void record_failures(const Sweep<T>& s, const std::vector<double>& grid, const char* key) {
    for (std::size_t i = 0; i < s.failures.size(); ++i) {
      if (!s.failures[i]) continue;
      failures.push_back({{"index", i},
                          {key, grid[i]},
                          {"error", s.failures[i]->type},
                          {"message", s.failures[i]->message}});
    }
  }
};

ConvergencePolicy policy_of(const RunConfig& c, bool vectors) {
  return ConvergencePolicy{c.initial_cutoff, c.max_cutoff, vectors};
}

ModelParams at_g2(const RunConfig& c, double g2) {
  ModelParams p = c.params;
  p.g2 = g2;
  return p;
}

SpectrumResult ground_state(const RunConfig& c, double g2) {
  const ModelParams p = at_g2(c, g2);
  SpectrumResult s = converged_spectrum(p, 2, c.tol, policy_of(c, true));
  if (!s.converged) {
    throw ConvergenceError("ground state did not converge at g2 = " + fmt(g2), g2);
  }
  return s;
}

int cmd_spectrum(Run& run) {
  const RunConfig& c = run.config;
  const auto grid = c.g2_values();
  struct Row {
    std::vector<double> levels;
    std::size_t cutoff;
    double delta;
    bool converged;
  };
  auto s = sweep<Row>(grid.size(), c.jobs, [&](std::size_t i) {
    const ModelParams p = at_g2(c, grid[i]);
    if (c.fixed_cutoff > 0) {
      if (p.unbounded()) throw InstabilityError("unbounded spectrum at g2 = " + fmt(p.g2));
      const auto r = solve_spectrum(build_hamiltonian(p, FockSpinBasis(c.fixed_cutoff)), c.levels, false);
      return Row{{r.eigenvalues.begin(), r.eigenvalues.end()}, c.fixed_cutoff, std::nan(""), false};
    }
    const auto r = converged_spectrum(p, c.levels, c.tol, policy_of(c, false));
    if (!r.converged) {
      throw ConvergenceError("levels did not converge at g2 = " + fmt(p.g2) + " (last change " +
                                 fmt(r.convergence_delta) + ")",
                             p.g2);
    }
    return Row{{r.eigenvalues.begin(), r.eigenvalues.end()}, r.cutoff_used, r.convergence_delta, true};
  });

  std::vector<std::string> header{"g2"};
  for (std::size_t k = 0; k < c.levels; ++k) header.push_back("E" + std::to_string(k));
  CsvWriter csv(run.path(".csv"), header);
  json points = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!s.results[i]) continue;
    std::vector<double> row{grid[i]};
    row.insert(row.end(), s.results[i]->levels.begin(), s.results[i]->levels.end());
    csv.row(row);
    points.push_back({{"g2", grid[i]},
                      {"cutoff", s.results[i]->cutoff},
                      {"convergence_delta", fmt(s.results[i]->delta)},
                      {"converged", s.results[i]->converged}});
  }
  run.diagnostics["points"] = points;
  run.record_failures(s, grid, "g2");
  return s.exit_code();
}

int cmd_potential(Run& run) {
  const RunConfig& c = run.config;
  const auto xs = c.x_grid ? c.x_grid->values() : GridSpec{-4.0, 4.0, 401, false}.values();
  CsvWriter csv(run.path(".csv"), {"x", "v_plus", "v_minus"});
  for (double x : xs) {
    csv.row({x, effective_potential(c.params, Spin::Up, x), effective_potential(c.params, Spin::Down, x)});
  }
  run.diagnostics["g2_over_gt"] = c.params.coupling_ratio();
  return kSuccess;
}

int cmd_semiclassical(Run& run) {
  const RunConfig& c = run.config;
  if (c.mode == "table") {
    const auto alphas =
        c.alpha4_grid ? c.alpha4_grid->values() : GridSpec{0.0, 1.0, 101, false}.values();
    CsvWriter csv(run.path(".csv"), {"alpha4", "g2c_exact", "g2c_small", "g2c_large"});
    for (double a : alphas) {
      csv.row({a, critical_ratio_exact(a), critical_ratio_small(a),
               a > 0.0 ? critical_ratio_large(a) : std::nan("")});
    }
    return kSuccess;
  }
  if (c.mode == "branch") {
    const ModelParams p = c.scaled ? scaled_params(c.alpha4, c.ratio) : c.params;
    const auto xs = c.x_grid ? c.x_grid->values() : GridSpec{-6.0, 6.0, 601, false}.values();
    CsvWriter csv(run.path(".csv"), {"x", "epsilon", "sigma_x"});
    for (double x : xs) csv.row({x, lower_branch(p, x), branch_sigma_x(p, x)});
    const auto sol = minimize_branch(p);
    json summary = {{"x_min", sol.x_min},
                    {"energy_min", sol.energy_min},
                    {"energy_origin", sol.energy_origin},
                    {"sigma_x_at_min", sol.sigma_x_at_min},
                    {"symmetric_phase", sol.symmetric_phase},
                    {"alpha4", p.alpha4()},
                    {"g2_over_gt", p.coupling_ratio()},
                    {"critical_ratio", critical_ratio_exact(p.alpha4())}};
    write_json(run.path(".summary.json"), summary);
    return kSuccess;
  }
  // phase
  const auto a4s = c.a4_grid->values();
  const auto g2s = c.g2_values();
  const auto diagram = phase_diagram(c.params.omega, c.params.qubit_splitting, a4s, g2s);
  {
    CsvWriter csv(run.path(".csv"), {"a4", "g2", "sigma_x", "x_min", "symmetric"});
    for (const auto& cell : diagram.cells) {
      csv.row({cell.a4, cell.g2, cell.sigma_x, cell.x_min, cell.symmetric_phase ? 1.0 : 0.0});
    }
  }
  CsvWriter boundary(run.path(".boundary.csv"), {"a4", "alpha4", "g2c"});
  for (std::size_t i = 0; i < a4s.size(); ++i) {
    ModelParams p = c.params;
    p.a4 = a4s[i];
    boundary.row({a4s[i], p.alpha4(), diagram.boundary_g2[i]});
  }
  return kSuccess;
}

QfiOptions qfi_options(const RunConfig& c) {
  QfiOptions o;
  o.delta = c.delta;
  o.policy = policy_of(c, true);
  return o;
}

int cmd_qfi(Run& run) {
  const RunConfig& c = run.config;
  const auto grid = c.g2_values();
  const QfiOptions opts = qfi_options(c);
  auto s = sweep<QfiPoint>(grid.size(), c.jobs, [&](std::size_t i) {
    QfiOptions o = opts;
    if (o.delta <= 0.0) o.delta = 1e-5 * c.params.g_t();
    return qfi_at(at_g2(c, grid[i]), o);
  });

  std::optional<QfiCurve> curve;
  std::optional<Failure> peak_failure;
  if (s.exit_code() == kSuccess) {
    std::vector<QfiPoint> points;
    for (auto& r : s.results) points.push_back(*r);
    try {
      curve = assemble_qfi_curve(c.params, grid, std::move(points), opts);
    } catch (...) {
      peak_failure = classify(std::current_exception());
    }
  }
  const double peak = curve ? curve->peak_g2 : std::nan("");

  CsvWriter csv(run.path(".csv"), {"g2", "g2_over_peak", "fq", "ln_fq", "chi_f", "e_cr"});
  json points = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!s.results[i]) continue;
    const QfiPoint& q = *s.results[i];
    csv.row({grid[i], grid[i] / peak, q.fq, std::log(q.fq), q.chi_f, 1.0 / std::sqrt(q.fq)});
    points.push_back({{"g2", grid[i]},
                      {"cutoff", q.cutoff},
                      {"gap", q.gap},
                      {"same_parity_gap", q.same_parity_gap},
                      {"parity", q.parity},
                      {"one_sided", q.one_sided},
                      {"overlap_term", q.overlap_term}});
  }
  run.diagnostics["points"] = points;
  run.record_failures(s, grid, "g2");
  if (peak_failure) {
    run.failures.push_back({{"error", peak_failure->type}, {"message", peak_failure->message}});
    return peak_failure->exit_code;
  }
  if (curve) {
    write_json(run.path(".summary.json"),
               {{"peak_g2", curve->peak_g2},
                {"peak_fq", curve->peak_fq},
                {"peak_ln_fq", std::log(curve->peak_fq)},
                {"peak_e_cr", 1.0 / std::sqrt(curve->peak_fq)},
                {"peak_over_gt", curve->peak_g2 / c.params.g_t()},
                {"delta_lambda", curve->delta_lambda},
                {"edge_peak", curve->edge_peak},
                {"analytic_g2c", critical_ratio_exact(c.params.alpha4()) * c.params.g_t()}});
  }
  return s.exit_code();
}

int cmd_observables(Run& run) {
  const RunConfig& c = run.config;
  const auto grid = c.g2_values();
  struct Row {
    double sigma_x;
    X2Expectation x2;
    int parity;
    std::size_t cutoff;
  };
  auto s = sweep<Row>(grid.size(), c.jobs, [&](std::size_t i) {
    const auto spec = ground_state(c, grid[i]);
    const FockSpinBasis basis(spec.cutoff_used);
    const auto psi = spec.state(0);
    return Row{observable_sigma_x(psi, basis), observable_x2(psi, basis), spec.parities[0], spec.cutoff_used};
  });
  CsvWriter csv(run.path(".csv"), {"g2", "sigma_x", "x2"});
  json points = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!s.results[i]) continue;
    const Row& r = *s.results[i];
    csv.row({grid[i], r.sigma_x, r.x2.value});
    points.push_back({{"g2", grid[i]},
                      {"cutoff", r.cutoff},
                      {"parity", r.parity},
                      {"boundary_weight", r.x2.boundary_weight},
                      {"truncation_warning", r.x2.truncation_warning}});
  }
  run.diagnostics["points"] = points;
  run.record_failures(s, grid, "g2");
  return s.exit_code();
}

int cmd_wavefunction(Run& run) {
  const RunConfig& c = run.config;
  const auto grid = c.g2_values();
  auto s = sweep<PositionWavefunction>(grid.size(), c.jobs, [&](std::size_t i) {
    const auto spec = ground_state(c, grid[i]);
    const FockSpinBasis basis(spec.cutoff_used);
    const auto xs = c.x_grid ? c.x_grid->values() : default_position_grid(basis.cutoff(), c.x_points);
    return to_position(spec.state(0), basis, xs);
  });
  json points = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!s.results[i]) continue;
    const auto& wf = *s.results[i];
    CsvWriter csv(run.path("_g2=" + fmt(grid[i]) + ".csv"), {"x", "psi_plus", "psi_minus"});
    for (std::size_t j = 0; j < wf.x_grid.size(); ++j) {
      csv.row({wf.x_grid[j], wf.psi_plus[j], wf.psi_minus[j]});
    }
    points.push_back({{"g2", grid[i]}, {"norm_check", wf.norm_check}});
  }
  run.diagnostics["points"] = points;
  run.record_failures(s, grid, "g2");
  return s.exit_code();
}

int cmd_gap(Run& run) {
  const RunConfig& c = run.config;
  const auto grid = c.g2_values();
  auto s = sweep<GapPoint>(grid.size(), c.jobs, [&](std::size_t i) {
    return gap_at(at_g2(c, grid[i]), c.tol, policy_of(c, false));
  });
  CsvWriter csv(run.path(".csv"), {"g2", "delta"});
  json points = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!s.results[i]) continue;
    const GapPoint& g = *s.results[i];
    csv.row({grid[i], g.delta});
    points.push_back({{"g2", grid[i]},
                      {"same_parity_gap", g.same_parity_gap},
                      {"ground_parity", g.ground_parity},
                      {"excited_parity", g.excited_parity},
                      {"cutoff", g.cutoff},
                      {"converged", g.converged}});
  }
  run.diagnostics["points"] = points;
  run.record_failures(s, grid, "g2");
  return s.exit_code();
}

int cmd_ptps(Run& run) {
  const RunConfig& c = run.config;
  PtpsOptions opts;
  opts.tol = c.quad_tol;
  opts.gap_tol = c.tol;
  opts.policy = policy_of(c, false);

  double g2c = 0.0;
  bool edge_peak = false;
  if (c.g2c) {
    g2c = *c.g2c;
  } else {
    const auto curve = qfi_curve(c.params, c.g2_values(), qfi_options(c));
    g2c = curve.peak_g2;
    edge_peak = curve.edge_peak;
  }
  const PtpsResult r = ptps(c.params, g2c, opts);

  CsvWriter csv(run.path(".csv"), {"g2", "g2_over_peak", "delta", "same_parity_gap", "converged"});
  for (const auto& n : r.nodes) {
    csv.row({n.g2, n.g2 / g2c, n.delta, n.same_parity_gap, n.converged ? 1.0 : 0.0});
  }
  write_json(run.path(".summary.json"), {{"time", r.time},
                                         {"time_same_parity", r.time_same_parity},
                                         {"g2c_omega", r.g2c_omega},
                                         {"edge_peak", edge_peak},
                                         {"quadrature_points", r.quadrature_points},
                                         {"estimated_error", r.estimated_error},
                                         {"min_gap", r.min_gap},
                                         {"max_gap", r.max_gap},
                                         {"parity_crossings", r.parity_crossings},
                                         {"unconverged_nodes", r.unconverged_nodes}});
  return kSuccess;
}

}  // namespace

GridSpec GridSpec::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3 && parts.size() != 4) {
    throw ConfigError("grid '" + text + "' must be start:stop:count[:log]");
  }
  GridSpec g;
  try {
    std::size_t used = 0;
    g.start = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("start");
    g.stop = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("stop");
    const long long count = std::stoll(parts[2], &used);
    if (used != parts[2].size() || count < 0) throw std::invalid_argument("count");
    g.count = static_cast<std::size_t>(count);
  } catch (const std::exception&) {
    throw ConfigError("grid '" + text + "' has a malformed field");
  }
  if (parts.size() == 4) {
    if (parts[3] != "log" && parts[3] != "lin") {
      throw ConfigError("grid spacing must be 'log' or 'lin'");
    }
    g.log = parts[3] == "log";
  }
  return g;
}

std::string GridSpec::to_string() const {
  return fmt(start) + ":" + fmt(stop) + ":" + std::to_string(count) + (log ? ":log" : "");
}

std::vector<double> GridSpec::values() const {
  if (count == 0) throw ConfigError("grid " + to_string() + " is empty");
  if (!(stop >= start)) throw ConfigError("grid " + to_string() + " must be ascending");
  if (log && !(start > 0.0)) throw ConfigError("log grid needs positive bounds");
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = start;
    return v;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    v[i] = log ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start)))
               : start + t * (stop - start);
  }
  v.front() = start;
  v.back() = stop;
  return v;
}

std::vector<double> RunConfig::g2_values() const {
  if (!g2_grid) return {params.g2};
  auto v = g2_grid->values();
  if (g2_in_gt_units) {
    for (double& g : v) g *= params.g_t();
  }
  return v;
}

json to_json(const RunConfig& c) {
  auto grid = [](const std::optional<GridSpec>& g) -> json {
    return g ? json(g->to_string()) : json(nullptr);
  };
  return json{{"command", c.command},
              {"omega", c.params.omega},
              {"qubit_splitting", c.params.qubit_splitting},
              {"g2", c.params.g2},
              {"chi", c.params.chi},
              {"a4", c.params.a4},
              {"g2_grid", grid(c.g2_grid)},
              {"g2_in_gt_units", c.g2_in_gt_units},
              {"x_grid", grid(c.x_grid)},
              {"a4_grid", grid(c.a4_grid)},
              {"alpha4_grid", grid(c.alpha4_grid)},
              {"levels", c.levels},
              {"initial_cutoff", c.initial_cutoff},
              {"max_cutoff", c.max_cutoff},
              {"fixed_cutoff", c.fixed_cutoff},
              {"tol", c.tol},
              {"delta", c.delta},
              {"quad_tol", c.quad_tol},
              {"g2c", c.g2c ? json(*c.g2c) : json(nullptr)},
              {"mode", c.mode},
              {"scaled", c.scaled},
              {"alpha4", c.alpha4},
              {"ratio", c.ratio},
              {"x_points", c.x_points},
              {"out", c.out},
              {"jobs", c.jobs}};
}

RunConfig config_from_json(const json& input) {
  const json& j = input.contains("config") ? input.at("config") : input;
  RunConfig c;
  try {
    auto grid = [&](const char* key) -> std::optional<GridSpec> {
      if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
      return GridSpec::parse(j.at(key).get<std::string>());
    };
    c.command = j.value("command", std::string{});
    c.params.omega = j.value("omega", c.params.omega);
    c.params.qubit_splitting = j.value("qubit_splitting", c.params.qubit_splitting);
    c.params.g2 = j.value("g2", c.params.g2);
    c.params.chi = j.value("chi", c.params.chi);
    c.params.a4 = j.value("a4", c.params.a4);
    c.g2_grid = grid("g2_grid");
    c.g2_in_gt_units = j.value("g2_in_gt_units", false);
    c.x_grid = grid("x_grid");
    c.a4_grid = grid("a4_grid");
    c.alpha4_grid = grid("alpha4_grid");
    c.levels = j.value("levels", c.levels);
    c.initial_cutoff = j.value("initial_cutoff", c.initial_cutoff);
    c.max_cutoff = j.value("max_cutoff", c.max_cutoff);
    c.fixed_cutoff = j.value("fixed_cutoff", c.fixed_cutoff);
    c.tol = j.value("tol", c.tol);
    c.delta = j.value("delta", c.delta);
    c.quad_tol = j.value("quad_tol", c.quad_tol);
    if (j.contains("g2c") && !j.at("g2c").is_null()) c.g2c = j.at("g2c").get<double>();
    c.mode = j.value("mode", c.mode);
    c.scaled = j.value("scaled", c.scaled);
    c.alpha4 = j.value("alpha4", c.alpha4);
    c.ratio = j.value("ratio", c.ratio);
    c.x_points = j.value("x_points", c.x_points);
    c.out = j.value("out", c.out);
    c.jobs = j.value("jobs", c.jobs);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return c;
}

void validate(const RunConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    throw ConfigError("unknown command '" + c.command + "'");
  }
  c.params.validate();
  for (const auto* g : {&c.g2_grid, &c.x_grid, &c.a4_grid, &c.alpha4_grid}) {
    if (*g) (void)(*g)->values();
  }
  if (c.levels == 0) throw ConfigError("--levels must be positive");
  if (c.initial_cutoff < 4 || c.max_cutoff < c.initial_cutoff) {
    throw ConfigError("cutoffs must satisfy 4 <= initial <= max");
  }
  if (c.fixed_cutoff != 0 && c.fixed_cutoff < 4) throw ConfigError("--cutoff must be at least 4");
  if (!(c.tol > 0.0) || !(c.quad_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (c.delta < 0.0) throw ConfigError("--delta must be non-negative");
  if (c.jobs == 0) throw ConfigError("--jobs must be positive");
  if (c.x_points < 2) throw ConfigError("--x-points must be at least 2");

  if (c.command == "qfi" || (c.command == "ptps" && !c.g2c)) {
    if (!c.g2_grid || c.g2_grid->count < 3) {
      throw ConfigError(c.command + " needs a coupling grid with at least three points");
    }
  }
  if (c.command == "ptps" && c.g2c && !(*c.g2c > 0.0)) throw ConfigError("--g2c must be positive");
  if (c.command == "semiclassical") {
    if (c.mode != "table" && c.mode != "branch" && c.mode != "phase") {
      throw ConfigError("semiclassical mode must be table, branch or phase");
    }
    if (c.mode == "phase" && (!c.a4_grid || !c.g2_grid)) {
      throw ConfigError("phase diagram needs --a4-grid and a coupling grid");
    }
    if (c.scaled && !(c.alpha4 >= 0.0 && c.ratio >= 0.0)) {
      throw ConfigError("--alpha4 and --ratio must be non-negative");
    }
  }
}

int run(const RunConfig& config) {
  validate(config);
  Run r{config, config.out.empty() ? "qrabi-" + config.command : config.out};
  int code = kSuccess;
  std::optional<Failure> fatal;
  try {
    if (config.command == "spectrum") code = cmd_spectrum(r);
    else if (config.command == "potential") code = cmd_potential(r);
    else if (config.command == "semiclassical") code = cmd_semiclassical(r);
    else if (config.command == "qfi") code = cmd_qfi(r);
    else if (config.command == "observables") code = cmd_observables(r);
    else if (config.command == "wavefunction") code = cmd_wavefunction(r);
    else if (config.command == "gap") code = cmd_gap(r);
    else if (config.command == "ptps") code = cmd_ptps(r);
  } catch (...) {
    fatal = classify(std::current_exception());
    code = fatal->exit_code;
  }

  if (!r.failures.empty()) write_json(r.path(".failures.json"), r.failures);
  if (fatal) {
    json record = {{"error", fatal->type}, {"message", fatal->message}, {"exit_code", code}};
    write_json(r.path(".error.json"), record);
    std::cerr << record.dump() << '\n';
  } else if (code != kSuccess) {
    std::cerr << json{{"error", "partial_grid"}, {"exit_code", code}, {"failures", r.failures.size()}}.dump()
              << '\n';
  }
  json meta = {{"config", to_json(config)},
               {"diagnostics", r.diagnostics},
               {"exit_code", code}};
  r.outputs.push_back(r.prefix + ".meta.json");
  meta["outputs"] = r.outputs;
  write_json(r.prefix + ".meta.json", meta);
  return code;
}

int main(int argc, char** argv) {
  CLI::App app{"Spectra, semiclassical phase boundary, quantum Fisher information and probe "
               "preparation time of the quartic-stabilized two-photon Rabi model"};
  app.require_subcommand(1);

  std::optional<std::string> config_file, g2_grid, g2_ratio_grid, x_grid, a4_grid, alpha4_grid, mode, out;
  std::optional<double> omega, qubit_splitting, g2, g2_ratio, a4, a4_per_omega, chi, tol, delta,
      quad_tol, g2c, alpha4, ratio;
  std::optional<std::size_t> levels, initial_cutoff, max_cutoff, fixed_cutoff, x_points, jobs;
  bool table = false, branch = false, phase = false, scaled = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "JSON config or metadata sidecar to start from");
    sub->add_option("--omega", omega, "mode frequency (units of Omega)");
    sub->add_option("--qubit-splitting", qubit_splitting, "qubit splitting Omega");
    sub->add_option("--g2", g2, "two-photon coupling");
    sub->add_option("--g2-ratio", g2_ratio, "two-photon coupling in units of g_T");
    sub->add_option("--a4", a4, "quartic coefficient A4");
    sub->add_option("--a4-per-omega", a4_per_omega, "quartic coefficient as A4/omega");
    sub->add_option("--chi", chi, "Stark-like coefficient");
    sub->add_option("--g2-grid", g2_grid, "coupling grid start:stop:count[:log]");
    sub->add_option("--g2-ratio-grid", g2_ratio_grid, "coupling grid in units of g_T");
    sub->add_option("--initial-cutoff", initial_cutoff, "first photon cutoff of the doubling sequence");
    sub->add_option("--max-cutoff", max_cutoff, "photon cutoff ceiling");
    sub->add_option("--tol", tol, "level convergence tolerance");
    sub->add_option("--out", out, "output path prefix");
    sub->add_option("--jobs", jobs, "worker threads for grid sweeps");
  };

  std::map<std::string, CLI::App*> subs;
  for (const auto& name : kCommands) {
    subs[name] = app.add_subcommand(name);
    add_common(subs[name]);
  }
  subs["spectrum"]->description("lowest levels versus g2");
  subs["spectrum"]->add_option("--levels", levels, "number of levels");
  subs["spectrum"]->add_option("--cutoff", fixed_cutoff, "fixed photon cutoff (no convergence loop)");
  subs["potential"]->description("spin-resolved effective potentials");
  subs["potential"]->add_option("--x-grid", x_grid, "position grid");
  auto* semi = subs["semiclassical"];
  semi->description("semiclassical branch, phase diagram and critical-ratio table");
  semi->add_flag("--table", table, "critical ratio table (default)");
  semi->add_flag("--branch", branch, "lower branch epsilon(x)");
  semi->add_flag("--phase", phase, "<sigma_x> phase diagram");
  semi->add_flag("--scaled", scaled, "branch in scaled variables (--alpha4, --ratio)");
  semi->add_option("--mode", mode, "table | branch | phase");
  semi->add_option("--alpha4", alpha4, "alpha4 for --scaled");
  semi->add_option("--ratio", ratio, "g2/g_T for --scaled");
  semi->add_option("--alpha4-grid", alpha4_grid, "alpha4 grid for the table");
  semi->add_option("--a4-grid", a4_grid, "A4 grid for the phase diagram");
  semi->add_option("--x-grid", x_grid, "position grid for the branch");
  subs["qfi"]->description("quantum Fisher information of the ground state versus g2");
  subs["qfi"]->add_option("--delta", delta, "finite-difference step in g2");
  subs["observables"]->description("<sigma_x> and <x^2> of the ground state");
  subs["wavefunction"]->description("ground-state spin components psi_+-(x)");
  subs["wavefunction"]->add_option("--x-grid", x_grid, "position grid");
  subs["wavefunction"]->add_option("--x-points", x_points, "points of the default position grid");
  subs["gap"]->description("excitation gap versus g2");
  subs["ptps"]->description("probe-state preparation time");
  subs["ptps"]->add_option("--g2c", g2c, "upper coupling (skip QFI peak search)");
  subs["ptps"]->add_option("--quad-tol", quad_tol, "relative quadrature tolerance");
  subs["ptps"]->add_option("--delta", delta, "finite-difference step for the peak search");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    RunConfig c;
    if (config_file) {
      std::ifstream in(*config_file);
      if (!in) throw ConfigError("cannot read " + *config_file);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
      }
      c = config_from_json(j);
    }
    c.command = app.get_subcommands().front()->get_name();
    if (omega) c.params.omega = *omega;
    if (qubit_splitting) c.params.qubit_splitting = *qubit_splitting;
    if (chi) c.params.chi = *chi;
    if (a4) c.params.a4 = *a4;
    if (a4_per_omega) c.params.a4 = *a4_per_omega * c.params.omega;
    if (g2) c.params.g2 = *g2;
    if (g2_ratio) c.params.g2 = *g2_ratio * c.params.g_t();
    if (g2_grid && g2_ratio_grid) throw ConfigError("give either --g2-grid or --g2-ratio-grid");
    if (g2_grid) {
      c.g2_grid = GridSpec::parse(*g2_grid);
      c.g2_in_gt_units = false;
    }
    if (g2_ratio_grid) {
      c.g2_grid = GridSpec::parse(*g2_ratio_grid);
      c.g2_in_gt_units = true;
    }
    if (x_grid) c.x_grid = GridSpec::parse(*x_grid);
    if (a4_grid) c.a4_grid = GridSpec::parse(*a4_grid);
    if (alpha4_grid) c.alpha4_grid = GridSpec::parse(*alpha4_grid);
    if (levels) c.levels = *levels;
    if (initial_cutoff) c.initial_cutoff = *initial_cutoff;
    if (max_cutoff) c.max_cutoff = *max_cutoff;
    if (fixed_cutoff) c.fixed_cutoff = *fixed_cutoff;
    if (tol) c.tol = *tol;
    if (delta) c.delta = *delta;
    if (quad_tol) c.quad_tol = *quad_tol;
    if (g2c) c.g2c = *g2c;
    if (mode) c.mode = *mode;
    if (table + branch + phase > 1) throw ConfigError("choose one of --table, --branch, --phase");
    if (table) c.mode = "table";
    if (branch) c.mode = "branch";
    if (phase) c.mode = "phase";
    if (scaled) c.scaled = true;
    if (alpha4) c.alpha4 = *alpha4;
    if (ratio) c.ratio = *ratio;
    if (x_points) c.x_points = *x_points;
    if (out) c.out = *out;
    if (jobs) c.jobs = *jobs;
    return run(c);
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", "config"}, {"message", e.what()}, {"exit_code", kConfigError}}.dump()
              << '\n';
    return kConfigError;
  }
}

}  // namespace qrabi::cli
