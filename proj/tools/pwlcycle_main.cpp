// pwlcycle: limit cycles of planar two-zone piecewise linear systems.
//
//   pwlcycle analyze    --config sys.json
//   pwlcycle halfmap    --config sys.json --side left --grid 0:5:101 [--out f.csv]
//   pwlcycle trajectory --config sys.json --start 0,2 --tspan 20 --points 500
//   pwlcycle sweep      --config sweep.json [--seed 7] [--out samples.csv]

#include "pwlcycle/commands.hpp"
#include "pwlcycle/errors.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

using namespace pwlcycle;

namespace {

Config load_with_env(const std::string& path) {
  Config cfg = load_config(path);
  apply_tolerance_env(cfg.tol, std::getenv("PWLCYCLE_TOL"));
  return cfg;
}

// Runs body with either --out or stdout as the CSV stream.
template <class Body>
int with_output(const std::string& out_path, Body&& body) {
  if (out_path.empty()) {
    return body(std::cout);
  }
  std::ofstream f(out_path);
  if (!f) {
    std::cerr << "error: cannot write \"" << out_path << "\"\n";
    return 1;
  }
  return body(f);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limit cycles of planar piecewise linear systems with two zones"};
  app.require_subcommand(1);

  std::string config_path;
  std::string side = "left";
  std::string grid = "0:1:11";
  std::string start = "0,1";
  double tspan = 10.0;
  std::size_t points = 200;
  std::uint64_t seed = 0;
  std::string out_path;

  auto* analyze = app.add_subcommand("analyze", "Full report as JSON");
  analyze->add_option("--config", config_path, "System config (JSON)")->required();

  auto* halfmap = app.add_subcommand("halfmap", "Sample one half-map as CSV");
  halfmap->add_option("--config", config_path, "System config (JSON)")->required();
  halfmap->add_option("--side", side, "left or right")
      ->check(CLI::IsMember({"left", "right"}))
      ->capture_default_str();
  halfmap->add_option("--grid", grid, "y0 grid lo:hi:n")->capture_default_str();
  halfmap->add_option("--out", out_path, "CSV path (default: stdout)");

  auto* trajectory = app.add_subcommand("trajectory", "Sample an orbit as CSV");
  trajectory->add_option("--config", config_path, "System config (JSON)")->required();
  trajectory->add_option("--start", start, "Initial point x,y")->capture_default_str();
  trajectory->add_option("--tspan", tspan, "Time span (negative runs backward)")
      ->capture_default_str();
  trajectory->add_option("--points", points, "Number of output samples")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}))
      ->capture_default_str();
  trajectory->add_option("--out", out_path, "CSV path (default: stdout)");

  auto* sweep = app.add_subcommand("sweep", "Randomized property sweep");
  sweep->add_option("--config", config_path, "Sweep config (JSON)")->required();
  auto* seed_opt = sweep->add_option("--seed", seed, "Override the sweep seed");
  sweep->add_option("--out", out_path, "Per-sample CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (analyze->parsed()) {
      return cmd_analyze(load_with_env(config_path), std::cout, std::cerr);
    }
    if (halfmap->parsed()) {
      const Config cfg = load_with_env(config_path);
      const Grid g = parse_grid(grid);
      const Side s = side == "left" ? Side::LeftForward : Side::RightBackward;
      return with_output(out_path,
                         [&](std::ostream& os) { return cmd_halfmap(cfg, s, g, os, std::cerr); });
    }
    if (trajectory->parsed()) {
      const Config cfg = load_with_env(config_path);
      const auto [x0, y0] = parse_pair(start);
      return with_output(out_path, [&](std::ostream& os) {
        return cmd_trajectory(cfg, x0, y0, tspan, points, os, std::cerr);
      });
    }
    if (sweep->parsed()) {
      Config cfg = load_with_env(config_path);
      if (cfg.sweep && seed_opt->count() > 0) {
        cfg.sweep->seed = seed;
      }
      std::unique_ptr<std::ofstream> csv;
      if (!out_path.empty()) {
        csv = std::make_unique<std::ofstream>(out_path);
        if (!*csv) {
          std::cerr << "error: cannot write \"" << out_path << "\"\n";
          return 1;
        }
      }
      return cmd_sweep(cfg, std::cout, csv.get(), std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 1;
}
