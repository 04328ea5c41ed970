#pragma once

#include "pwlcycle/canonical.hpp"
#include "pwlcycle/tolerances.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace pwlcycle {

// One linear half-system x' = T x - y, y' = D x - a.
struct LinearField {
  double a = 0.0;
  double T = 0.0;
  double D = 0.0;
};

struct FlowState {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

enum class SpectrumCase { ComplexPair, RealDistinct, RealRepeated, SingularZeroEigen };

const char* to_string(SpectrumCase c);

SpectrumCase classify_spectrum(double T, double D, double rel = 1e-12);

// Exact state at time state.t + dt.
FlowState flow(const LinearField& f, const FlowState& state, double dt, double spectrum_rel = 1e-12);

enum class CrossingDirection { ForwardFromLeft, BackwardFromRight };

// A flight from (0, y0) back to x = 0; time is signed (negative for
// BackwardFromRight).
struct Crossing {
  double time = 0.0;
  double y = 0.0;
};

std::optional<Crossing> first_crossing(const LinearField& f, double y0, CrossingDirection dir,
                                       const Tolerances& tol = {});

std::optional<double> first_crossing_time(const LinearField& f, double y0, CrossingDirection dir,
                                          const Tolerances& tol = {});

std::optional<double> oracle_half_map(const LinearField& f, double y0, CrossingDirection dir,
                                      const Tolerances& tol = {});

// Full turn from (0, y0): left flight to (0, y1 <= 0), then forward right
// flight back to (0, P(y0)). Nullopt when either flight does not return.
struct FullTurn {
  double y1 = 0.0;
  double y_return = 0.0;
  double tau_left = 0.0;
  double tau_right = 0.0;
};

std::optional<FullTurn> full_turn(const CanonicalParams& p, double y0, const Tolerances& tol = {});

struct CycleCheck {
  double residual = 0.0;
  double period = 0.0;
};

// Throws NotClosed when either flight is missing.
CycleCheck verify_cycle(const CanonicalParams& p, double y0_star, const Tolerances& tol = {});

enum class ZoneSide { Left, Right };

struct TrajectorySample {
  FlowState state;
  ZoneSide side = ZoneSide::Left;
};

// Piecewise-exact trajectory of the two-zone system, switching sides at the
// computed crossing times. n uniform output times over [0, t_span] (t_span
// may be negative).
std::vector<TrajectorySample> sample_trajectory(const CanonicalParams& p, const FlowState& start,
                                                double t_span, std::size_t n,
                                                const Tolerances& tol = {});

namespace detail {

// Smallest t > 0 with x(t) = 0 for the field f started at z0 = (x0, y0),
// x0 <= 0, with x < 0 on (0, t). Nullopt if the orbit never returns before
// the time cap.
std::optional<double> left_exit_time(const LinearField& f, double x0, double y0,
                                     const Tolerances& tol);

} // namespace detail

} // namespace pwlcycle
