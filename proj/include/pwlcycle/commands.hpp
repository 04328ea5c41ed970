#pragma once

#include "pwlcycle/config.hpp"
#include "pwlcycle/cycles.hpp"
#include "pwlcycle/flow_oracle.hpp"

#include <cstddef>
#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace pwlcycle {

// 0 success, 1 bad config, 2 non-sewing input, 3 numerical failure.
int exit_code_for(const std::exception& e);

// 17 significant digits; empty for non-finite values.
std::string csv_number(double v);

int cmd_analyze(const Config& cfg, std::ostream& out, std::ostream& err);

int cmd_halfmap(const Config& cfg, Side side, const Grid& grid, std::ostream& out,
                std::ostream& err);

int cmd_trajectory(const Config& cfg, double x0, double y0, double t_span, std::size_t n,
                   std::ostream& out, std::ostream& err);

struct SweepSample {
  std::size_t index = 0;
  CanonicalParams params;
  bool left_exists = false;
  bool right_exists = false;
  CycleStatus status = CycleStatus::NotApplicable;
  std::optional<LimitCycleReport> cycle;
  double xi = 0.0;
  double c_inf = 0.0;
  bool sufficient = false;
  OriginClass origin = OriginClass::NotMonodromic;
  InfinityClass infinity = InfinityClass::NotMonodromic;
  Contraction contraction = Contraction::Inconclusive;
  bool uniqueness_violation = false;
  bool oracle_disagreement = false;
  bool stability_disagreement = false;
  bool numerical_failure = false;
  std::string error;
};

struct SweepSummary {
  std::size_t samples = 0;
  std::size_t both_defined = 0;
  std::size_t cycles_found = 0;
  std::size_t uniqueness_violations = 0;
  std::size_t oracle_disagreements = 0;
  std::size_t stability_disagreements = 0;
  std::size_t numerical_failures = 0;
  std::size_t non_isolated = 0;
  std::size_t indeterminate = 0;
  std::size_t contraction_inconclusive = 0;
  std::size_t sufficient = 0;
  std::size_t sufficient_without_cycle = 0;
};

// One sample through the full pipeline; never throws.
SweepSample evaluate_sample(std::size_t index, const CanonicalParams& p, const Tolerances& tol);

// Samples in index order, evaluated on sweep.threads workers.
std::vector<SweepSample> run_sweep(const SweepConfig& sweep, const Tolerances& tol);

SweepSummary summarize(const std::vector<SweepSample>& samples);

// JSON summary on `out`; per-sample CSV on `csv` when non-null.
int cmd_sweep(const Config& cfg, std::ostream& out, std::ostream* csv, std::ostream& err);

} // namespace pwlcycle
