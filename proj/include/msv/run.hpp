#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "msv/csv_io.hpp"
#include "msv/diagnostics.hpp"

namespace msv {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitData = 2,
  kExitNumerical = 3,
};

struct SimulateSpec {
  int p = 0;
  std::size_t N = 0;
  double delta = 0.0;
};

struct RunSpec {
  std::filesystem::path input;
  InputMode mode = InputMode::returns;
  std::vector<double> deltas{0.7, 0.75, 0.8, 0.85, 0.9, 0.95};
  double baseline = 0.95;
  std::size_t prior_window = 30;
  FlatDayPolicy flat_day = FlatDayPolicy::floor;
  bool approx_scale = false;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 1;
  std::optional<SimulateSpec> simulate;
};

/// "0.7,0.8" -> {0.7, 0.8}. Throws DomainError on an empty list or a bad
/// number.
std::vector<double> parse_delta_list(const std::string& text);

/// "p,N,delta" for simulator mode.
SimulateSpec parse_simulate_spec(const std::string& text);

FlatDayPolicy parse_flat_day(const std::string& text);

/// Prior mean E(Σ_0) used when generating synthetic data from the CLI.
inline constexpr double kSimulationPriorVariance = 1e-4;

/// Runs the grid workflow (or the simulator when spec.simulate is set) and
/// writes its outputs into spec.out_dir:
///
///   report.tsv, report.json       grid table
///   series_delta_<δ>.csv          posterior volatilities and correlations
///   bayes_factors.csv             H_t of every δ against the baseline
///   manifest.json                 configuration, timings, warning counters
///
/// In simulator mode only simulated.csv and manifest.json are written.
/// Diagnostics go to `log`. Returns one of ExitCode.
int run(const RunSpec& spec, std::ostream& log);

}  // namespace msv
