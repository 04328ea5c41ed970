#pragma once

#include "pwlcycle/canonical.hpp"
#include "pwlcycle/tolerances.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

namespace pwlcycle {

// Uniform box for the six canonical parameters, in the order
// t_l, t_r, d_l, d_r, a_l, a_r.
struct SweepRanges {
  std::array<std::pair<double, double>, 6> box{{
      {0.05, 1.0},
      {-1.0, -0.05},
      {-1.0, 3.0},
      {-1.0, 3.0},
      {-2.0, 2.0},
      {-2.0, 2.0},
  }};

  static const std::array<const char*, 6>& names();
};

struct SweepConfig {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  SweepRanges ranges;
  // Worker threads; 0 means hardware concurrency.
  std::size_t threads = 0;
};

struct Config {
  std::optional<RawSystem> raw;
  std::optional<CanonicalParams> canonical;
  Tolerances tol;
  std::optional<SweepConfig> sweep;

  bool has_system() const { return raw.has_value() || canonical.has_value(); }

  // Sewing verdict of the configured system (always Sewing for canonical
  // input). Throws ConfigError when no system is configured.
  SewingVerdict sewing() const;

  // Canonical parameters; throws SewingRejected for non-sewing raw input and
  // ConfigError when no system is configured.
  CanonicalParams params() const;
};

// Throws ConfigError on malformed documents.
Config parse_config(const nlohmann::json& doc);
Config parse_config_text(const std::string& text);
Config load_config(const std::string& path);

// Applies PWLCYCLE_TOL (a positive number) to the sewing tolerance.
void apply_tolerance_env(Tolerances& tol, const char* value);

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;

  // n points from lo to hi inclusive (lo alone when n == 1).
  double at(std::size_t k) const;
};

// "lo:hi:n"
Grid parse_grid(const std::string& text);

// "x,y"
std::pair<double, double> parse_pair(const std::string& text);

// Deterministic draw of sample `index` from the sweep box.
CanonicalParams draw_sample(const SweepRanges& ranges, std::uint64_t seed, std::size_t index);

} // namespace pwlcycle
