#include "pwlcycle/commands.hpp"

#include "pwlcycle/errors.hpp"
#include "pwlcycle/report_json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

namespace pwlcycle {

using nlohmann::json;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) {
    return 1;
  }
  if (dynamic_cast<const SewingRejected*>(&e)) {
    return 2;
  }
  if (dynamic_cast<const json::exception*>(&e)) {
    return 1;
  }
  return 3;
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) {
    return "";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

} // namespace

int cmd_analyze(const Config& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SewingVerdict verdict = cfg.sewing();
    if (!verdict.sewing()) {
      json j;
      j["sewing"] = to_json(verdict);
      out << j.dump(2) << '\n';
      err << "error: input is not a sewing system (" << to_string(verdict.status) << ")\n";
      return 2;
    }
    AnalysisReport r = analyze(cfg.params(), cfg.tol);
    r.sewing = verdict;
    out << to_json(r).dump(2) << '\n';
    return 0;
  });
}

int cmd_halfmap(const Config& cfg, Side side, const Grid& grid, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    const CanonicalParams p = cfg.params();
    const HalfMapSpec spec = side == Side::LeftForward
                                 ? build_spec(p.a_L, p.T_L, p.D_L, side, cfg.tol)
                                 : build_spec(p.a_R, p.T_R, p.D_R, side, cfg.tol);
    require_exists(spec);

    // Limits at y0 = 0 when y(0) = 0: y' -> -1, y'' -> 2 c.
    const bool tangent_at_zero = spec.a != 0.0 && spec.domain.lo == 0.0 && spec.image_hi == 0.0;

    out << "y0,y1,d1,d2,residual\n";
    std::size_t omitted = 0;
    for (std::size_t k = 0; k < grid.n; ++k) {
      const double y0 = grid.at(k);
      if (!spec.domain.contains(y0)) {
        ++omitted;
        continue;
      }
      const HalfMapEval e = eval(spec, y0);
      double d1 = std::nan("");
      double d2 = std::nan("");
      if (e.y1 < 0.0) {
        const HalfMapDerivatives d = derivatives(spec, y0, e.y1);
        d1 = d.d1;
        d2 = d.d2;
      } else if (y0 == 0.0 && tangent_at_zero) {
        d1 = -1.0;
        d2 = 2.0 * taylor_quadratic_coeff(spec);
      }
      out << csv_number(y0) << ',' << csv_number(e.y1) << ',' << csv_number(d1) << ','
          << csv_number(d2) << ',' << csv_number(e.residual) << '\n';
    }
    if (omitted > 0) {
      out << "# omitted " << omitted << " points outside [" << csv_number(spec.domain.lo) << ", "
          << (spec.domain.bounded() ? csv_number(spec.domain.hi) : std::string("inf")) << ")\n";
    }
    return 0;
  });
}

int cmd_trajectory(const Config& cfg, double x0, double y0, double t_span, std::size_t n,
                   std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(t_span)) {
      throw ConfigError("trajectory: start and time span must be finite");
    }
    const CanonicalParams p = cfg.params();
    const auto samples = sample_trajectory(p, {x0, y0, 0.0}, t_span, n, cfg.tol);
    out << "t,x,y,side\n";
    for (const auto& s : samples) {
      out << csv_number(s.state.t) << ',' << csv_number(s.state.x) << ','
          << csv_number(s.state.y) << ',' << (s.side == ZoneSide::Left ? 'L' : 'R') << '\n';
    }
    return 0;
  });
}

SweepSample evaluate_sample(std::size_t index, const CanonicalParams& p, const Tolerances& tol) {
  SweepSample s;
  s.index = index;
  s.params = p;
  try {
    const CycleInvariants inv = invariants(p);
    s.xi = inv.xi;
    s.c_inf = inv.c_inf;
    const Displacement delta(p, tol);
    s.left_exists = delta.left().exists;
    s.right_exists = delta.right().exists;
    s.sufficient = existence_sufficient(p, tol);
    s.origin = classify_origin(p);
    s.infinity = classify_infinity(p).cls;

    const CycleSearch search = search_limit_cycle(p, tol);
    s.status = search.status;
    s.cycle = search.cycle;
    if (s.cycle) {
      const LimitCycleReport& c = *s.cycle;
      s.oracle_disagreement = !(c.oracle_residual <= 1e-8 * (1.0 + c.y0_star));
      s.contraction = oracle_contraction(p, c.y0_star, tol);
      const bool attracting = c.stability == Stability::Attracting;
      s.stability_disagreement = attracting != (s.xi < 0.0);
      if (s.contraction != Contraction::Inconclusive &&
          attracting != (s.contraction == Contraction::Contracting)) {
        s.stability_disagreement = true;
      }
    }
  } catch (const UniquenessViolation& e) {
    s.uniqueness_violation = true;
    s.error = e.what();
  } catch (const std::exception& e) {
    s.numerical_failure = true;
    s.error = e.what();
  }
  return s;
}

std::vector<SweepSample> run_sweep(const SweepConfig& sweep, const Tolerances& tol) {
  std::vector<SweepSample> out(sweep.count);
  std::size_t workers = sweep.threads;
  if (workers == 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  workers = std::min(workers, std::max<std::size_t>(sweep.count, 1));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < sweep.count; i = next++) {
      out[i] = evaluate_sample(i, draw_sample(sweep.ranges, sweep.seed, i), tol);
    }
  };
  if (workers <= 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back(work);
  }
  for (auto& t : pool) {
    t.join();
  }
  return out;
}

SweepSummary summarize(const std::vector<SweepSample>& samples) {
  SweepSummary s;
  s.samples = samples.size();
  for (const auto& x : samples) {
    s.both_defined += x.left_exists && x.right_exists;
    s.cycles_found += x.cycle.has_value();
    s.uniqueness_violations += x.uniqueness_violation;
    s.oracle_disagreements += x.oracle_disagreement;
    s.stability_disagreements += x.stability_disagreement;
    s.numerical_failures += x.numerical_failure;
    s.non_isolated += x.status == CycleStatus::NonIsolated;
    s.indeterminate += x.status == CycleStatus::Indeterminate;
    s.contraction_inconclusive += x.cycle && x.contraction == Contraction::Inconclusive;
    s.sufficient += x.sufficient;
    s.sufficient_without_cycle += x.sufficient && !x.cycle && !x.uniqueness_violation;
  }
  return s;
}

int cmd_sweep(const Config& cfg, std::ostream& out, std::ostream* csv, std::ostream& err) {
  return guarded(err, [&] {
    if (!cfg.sweep) {
      throw ConfigError("sweep: config has no \"sweep\" block");
    }
    const SweepConfig& sw = *cfg.sweep;
    const auto samples = run_sweep(sw, cfg.tol);
    const SweepSummary s = summarize(samples);

    json ranges;
    for (std::size_t i = 0; i < 6; ++i) {
      ranges[SweepRanges::names()[i]] = {sw.ranges.box[i].first, sw.ranges.box[i].second};
    }
    json j;
    j["count"] = sw.count;
    j["seed"] = sw.seed;
    j["ranges"] = ranges;
    j["summary"] = {{"samples", s.samples},
                    {"both_defined", s.both_defined},
                    {"cycles_found", s.cycles_found},
                    {"uniqueness_violations", s.uniqueness_violations},
                    {"oracle_disagreements", s.oracle_disagreements},
                    {"stability_disagreements", s.stability_disagreements},
                    {"numerical_failures", s.numerical_failures},
                    {"non_isolated", s.non_isolated},
                    {"indeterminate", s.indeterminate},
                    {"contraction_inconclusive", s.contraction_inconclusive},
                    {"sufficient", s.sufficient},
                    {"sufficient_without_cycle", s.sufficient_without_cycle}};
    out << j.dump(2) << '\n';

    if (csv) {
      *csv << "index,t_l,t_r,d_l,d_r,a_l,a_r,left,right,status,y0_star,y1_star,stability,xi,"
              "c_inf,origin,infinity,contraction,oracle_residual,sufficient,error\n";
      for (const auto& x : samples) {
        const auto& p = x.params;
        *csv << x.index << ',' << csv_number(p.T_L) << ',' << csv_number(p.T_R) << ','
             << csv_number(p.D_L) << ',' << csv_number(p.D_R) << ',' << csv_number(p.a_L) << ','
             << csv_number(p.a_R) << ',' << (x.left_exists ? "defined" : "not_defined") << ','
             << (x.right_exists ? "defined" : "not_defined") << ',';
        if (x.uniqueness_violation) {
          *csv << "uniqueness_violation";
        } else if (x.numerical_failure) {
          *csv << "numerical_failure";
        } else {
          *csv << to_string(x.status);
        }
        *csv << ',' << (x.cycle ? csv_number(x.cycle->y0_star) : "") << ','
             << (x.cycle ? csv_number(x.cycle->y1_star) : "") << ','
             << (x.cycle ? to_string(x.cycle->stability) : "") << ',' << csv_number(x.xi) << ','
             << csv_number(x.c_inf) << ',' << to_string(x.origin) << ','
             << to_string(x.infinity) << ',' << (x.cycle ? to_string(x.contraction) : "") << ','
             << (x.cycle ? csv_number(x.cycle->oracle_residual) : "") << ','
             << (x.sufficient ? 1 : 0) << ',';
        // Keep the message a single CSV cell.
        std::string msg = x.error;
        for (char& ch : msg) {
          if (ch == ',' || ch == '\n' || ch == '"') {
            ch = ' ';
          }
        }
        *csv << msg << '\n';
      }
    }
    const bool clean = s.uniqueness_violations == 0 && s.oracle_disagreements == 0 &&
                       s.stability_disagreements == 0 && s.numerical_failures == 0;
    return clean ? 0 : 3;
  });
}

} // namespace pwlcycle
