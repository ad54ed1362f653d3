// Command-line front end: grid evaluation of discount factors over a CSV of
// prices or log-returns, or generation of a synthetic returns CSV.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "msv/errors.hpp"
#include "msv/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sequential Wishart stochastic-volatility estimation and discount-factor selection"};

  std::string input;
  std::string mode = "returns";
  std::string deltas = "0.7,0.75,0.8,0.85,0.9,0.95";
  double baseline = 0.95;
  std::size_t prior_window = 30;
  std::string flat_day = "floor";
  std::string out = ".";
  std::uint64_t seed = 1;
  std::string simulate;
  bool approx_scale = false;

  app.add_option("--input", input, "CSV file (header row, optional leading time column)");
  app.add_option("--mode", mode, "levels | returns")->check(CLI::IsMember({"levels", "returns"}));
  app.add_option("--deltas", deltas, "comma-separated discount factors in (2/3, 1)");
  app.add_option("--baseline", baseline, "discount factor of the Bayes-factor baseline model");
  app.add_option("--prior-window", prior_window, "burn-in rows used to scale the prior");
  app.add_option("--flat-day", flat_day, "zero-return likelihood handling: skip | floor")
      ->check(CLI::IsMember({"skip", "floor"}));
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "seed for the simulator");
  app.add_option("--simulate", simulate, "p,N,delta: write a simulated returns CSV instead");
  app.add_flag("--approx-scale", approx_scale,
               "emit volatility series from the scale with the prior contribution removed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return msv::kExitConfig;
  }

  msv::RunSpec spec;
  try {
    spec.input = input;
    spec.mode = msv::parse_input_mode(mode);
    spec.deltas = msv::parse_delta_list(deltas);
    spec.baseline = baseline;
    spec.prior_window = prior_window;
    spec.flat_day = msv::parse_flat_day(flat_day);
    spec.approx_scale = approx_scale;
    spec.out_dir = out;
    spec.seed = seed;
    if (!simulate.empty()) spec.simulate = msv::parse_simulate_spec(simulate);
  } catch (const msv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return msv::kExitConfig;
  }
  return msv::run(spec, std::cerr);
}
