#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrabi/model.hpp"

namespace qrabi::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kConvergenceFailure = 3,
  kInstability = 4,
};

/// Grid written as "start:stop:count" or "start:stop:count:log".
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;
  bool log = false;

  static GridSpec parse(const std::string& text);
  std::string to_string() const;
  std::vector<double> values() const;
};

struct RunConfig {
  std::string command;
  ModelParams params{};

  // g2 grid, either absolute or in units of g_T
  std::optional<GridSpec> g2_grid;
  bool g2_in_gt_units = false;
  std::optional<GridSpec> x_grid;
  std::optional<GridSpec> a4_grid;
  std::optional<GridSpec> alpha4_grid;

  std::size_t levels = 10;
  std::size_t initial_cutoff = 64;
  std::size_t max_cutoff = 4096;
  std::size_t fixed_cutoff = 0;  // > 0 disables cutoff doubling (spectrum only)
  double tol = 1e-8;
  double delta = 0.0;            // QFI step; 0 selects 1e-5 g_T
  double quad_tol = 1e-4;        // PTPS quadrature
  std::optional<double> g2c;     // PTPS upper coupling; located from the QFI when absent
  std::string mode = "table";    // semiclassical: table | branch | phase
  bool scaled = false;           // semiclassical branch in (alpha4, g2/g_T) variables
  double alpha4 = 0.0;
  double ratio = 1.0;
  std::size_t x_points = 1024;   // wavefunction grid
  std::string out;
  std::size_t jobs = 1;

  std::vector<double> g2_values() const;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

/// Validates the configuration; throws ConfigError.
void validate(const RunConfig& config);

/// Executes a validated configuration, writing files next to config.out.
/// Returns the process exit code.
int run(const RunConfig& config);

/// Full command-line entry point.
int main(int argc, char** argv);

}  // namespace qrabi::cli
