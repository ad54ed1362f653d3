#include "msv/run.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "msv/errors.hpp"
#include "msv/report.hpp"
#include "msv/simulator.hpp"

namespace msv {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double parse_number(const std::string& token, const char* what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size()) {
    throw DomainError(fmt::format("cannot parse {} '{}'", what, token));
  }
  return value;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    const auto b = token.find_first_not_of(' ');
    const auto e = token.find_last_not_of(' ');
    out.push_back(b == std::string::npos ? std::string() : token.substr(b, e - b + 1));
  }
  return out;
}

/// Files are rendered in memory first and written together; a failed write
/// removes whatever was already written.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string contents) {
    files_.emplace_back(name, std::move(contents));
  }

  void commit() {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir_.string(), ec.message()));
    std::vector<std::filesystem::path> written;
    for (const auto& [name, contents] : files_) {
      const auto path = dir_ / name;
      std::ofstream out(path, std::ios::binary);
      out << contents;
      out.close();
      if (!out) {
        for (const auto& w : written) std::filesystem::remove(w, ec);
        std::filesystem::remove(path, ec);
        throw IoError(fmt::format("failed writing '{}'", path.string()));
      }
      written.push_back(path);
    }
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string flat_day_name(FlatDayPolicy policy) {
  return policy == FlatDayPolicy::skip ? "skip" : "floor";
}

int run_simulation(const RunSpec& spec, std::ostream& log) {
  const auto start = Clock::now();
  const SimulateSpec& sim = *spec.simulate;
  if (sim.p < 1) throw DomainError("simulate: p must be >= 1");
  const double n = 1.0 / (1.0 - sim.delta);
  if (!(sim.delta > 2.0 / 3.0 && sim.delta < 1.0)) {
    throw DomainError(fmt::format("simulate: delta {:g} outside (2/3, 1)", sim.delta));
  }
  const SymPosDef S0 =
      SymPosDef::identity(sim.p).scaled((n - 2.0) * kSimulationPriorVariance);
  const SimPath path = simulate_path({sim.p, sim.delta, sim.N, S0, spec.seed});
  std::ostringstream csv;
  write_returns_csv(csv, frame_from_path(path));

  nlohmann::json manifest = {
      {"mode", "simulate"},
      {"p", sim.p},
      {"N", sim.N},
      {"delta", sim.delta},
      {"seed", spec.seed},
      {"rng", "philox4x32-10"},
      {"prior_mean_variance", kSimulationPriorVariance},
      {"output", "simulated.csv"},
      {"timings", {{"total_seconds", seconds_since(start)}}},
  };
  OutputSet outputs(spec.out_dir);
  outputs.add("simulated.csv", csv.str());
  outputs.add("manifest.json", manifest.dump(2) + "\n");
  outputs.commit();
  log << fmt::format("wrote {} simulated returns (p={}) to {}\n", sim.N, sim.p,
                     (spec.out_dir / "simulated.csv").string());
  return kExitOk;
}

std::string delta_tag(double delta) { return fmt::format("{:.4g}", delta); }

int run_grid(const RunSpec& spec, std::ostream& log) {
  const auto start = Clock::now();
  if (spec.deltas.empty()) throw DomainError("empty discount-factor grid");
  if (spec.input.empty()) throw DomainError("no --input given");

  const auto load_start = Clock::now();
  const ReturnsFrame frame = load_csv(spec.input, spec.mode);
  const double load_seconds = seconds_since(load_start);

  EvalOptions options;
  options.prior_window = spec.prior_window;
  options.flat_day = spec.flat_day;
  options.record_posterior_means = true;
  options.approximate_scale = spec.approx_scale;
  const GridReport report = grid_search(frame.values, spec.deltas, spec.baseline, options);

  OutputSet outputs(spec.out_dir);
  outputs.add("report.tsv", grid_report_tsv(report));
  outputs.add("report.json", grid_report_json(report).dump(2) + "\n");

  nlohmann::json per_delta = nlohmann::json::object();
  nlohmann::json flat_days = nlohmann::json::object();
  nlohmann::json failures = nlohmann::json::object();
  for (const auto& row : report.rows) {
    const std::string tag = delta_tag(row.delta);
    if (!row.ok) {
      failures[tag] = row.error;
      log << fmt::format("delta {}: failed: {}\n", tag, row.error);
      continue;
    }
    per_delta[tag] = row.run->seconds;
    flat_days[tag] = row.run->flat_days;
    std::ostringstream series;
    write_series_csv(series, frame.time_header, frame.times, frame.labels,
                     row.run->posterior_means);
    outputs.add(fmt::format("series_delta_{}.csv", tag), series.str());
  }
  std::ostringstream bayes;
  write_bayes_factor_csv(bayes, frame.time_header, frame.times, report);
  outputs.add("bayes_factors.csv", bayes.str());

  const bool partial = !failures.empty();
  nlohmann::json manifest = {
      {"mode", "grid"},
      {"status", partial ? "partial" : "ok"},
      {"input", spec.input.string()},
      {"input_mode", spec.mode == InputMode::levels ? "levels" : "returns"},
      {"n_obs", frame.rows()},
      {"p", frame.cols()},
      {"labels", frame.labels},
      {"deltas", spec.deltas},
      {"baseline", spec.baseline},
      {"prior_window", spec.prior_window},
      {"prior_scale", "(n-2) * mean squared burn-in return * I"},
      {"flat_day", flat_day_name(spec.flat_day)},
      {"scale_mode", spec.approx_scale ? "approximate" : "exact"},
      {"seed", spec.seed},
      {"return_scaling", {{"applied", false}, {"factor", 1.0}}},
      {"warnings", {{"flat_days", flat_days}}},
      {"failed_rows", failures},
      {"timings",
       {{"load_seconds", load_seconds},
        {"per_delta_seconds", per_delta},
        {"total_seconds", seconds_since(start)}}},
  };
  outputs.add("manifest.json", manifest.dump(2) + "\n");
  outputs.commit();

  log << grid_report_tsv(report);
  if (partial) {
    log << "some discount factors failed; see manifest.json\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

std::vector<double> parse_delta_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& token : split_commas(text)) {
    if (token.empty()) continue;
    out.push_back(parse_number(token, "discount factor"));
  }
  if (out.empty()) throw DomainError("empty discount-factor grid");
  return out;
}

SimulateSpec parse_simulate_spec(const std::string& text) {
  const auto tokens = split_commas(text);
  if (tokens.size() != 3) throw DomainError(fmt::format("--simulate expects p,N,delta, got '{}'", text));
  const double p = parse_number(tokens[0], "dimension");
  const double n = parse_number(tokens[1], "path length");
  if (p < 1 || p != std::floor(p) || n < 0 || n != std::floor(n)) {
    throw DomainError(fmt::format("--simulate: p and N must be non-negative integers, got '{}'", text));
  }
  return {static_cast<int>(p), static_cast<std::size_t>(n), parse_number(tokens[2], "delta")};
}

FlatDayPolicy parse_flat_day(const std::string& text) {
  if (text == "skip") return FlatDayPolicy::skip;
  if (text == "floor") return FlatDayPolicy::floor;
  throw DomainError(fmt::format("unknown flat-day policy '{}' (expected skip or floor)", text));
}

int run(const RunSpec& spec, std::ostream& log) {
  try {
    return spec.simulate ? run_simulation(spec, log) : run_grid(spec, log);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    switch (e.category()) {
      case Error::Category::config:
        return kExitConfig;
      case Error::Category::data:
        return kExitData;
      case Error::Category::numerical:
        return kExitNumerical;
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
  }
  return kExitNumerical;
}

}  // namespace msv
