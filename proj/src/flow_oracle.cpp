#include "pwlcycle/flow_oracle.hpp"

#include "pwlcycle/errors.hpp"
#include "pwlcycle/halfmap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace pwlcycle {

namespace {

constexpr double kPi = std::numbers::pi;

// expm1(z)/z
double phi1(double z) {
  if (z == 0.0) {
    return 1.0;
  }
  return std::expm1(z) / z;
}

// (expm1(z) - z)/z^2
double phi2(double z) {
  if (std::abs(z) < 0.5) {
    double term = 0.5;
    double sum = 0.0;
    for (int k = 0; k < 30; ++k) {
      sum += term;
      term *= z / (k + 3);
    }
    return sum;
  }
  return (std::expm1(z) - z) / (z * z);
}

// Homogeneous propagator e^{At} = e^{Tt/2} (c(t) I + s(t) M), M = A - T/2 I,
// M^2 = kappa I with kappa = T^2/4 - D.
struct Propagator {
  SpectrumCase kind;
  double half_trace;
  double rate;  // omega for ComplexPair, nu for RealDistinct

  // (e^{Tt/2} c(t), e^{Tt/2} s(t)) without overflowing the factors
  // separately.
  std::pair<double, double> scaled(double t) const {
    switch (kind) {
    case SpectrumCase::ComplexPair: {
      const double e = std::exp(half_trace * t);
      return {e * std::cos(rate * t), e * std::sin(rate * t) / rate};
    }
    case SpectrumCase::RealDistinct: {
      const double nt = rate * t;
      if (std::abs(nt) < 1.0) {
        const double e = std::exp(half_trace * t);
        return {e * std::cosh(nt), e * std::sinh(nt) / rate};
      }
      const double ep = std::exp((half_trace + rate) * t);
      const double em = std::exp((half_trace - rate) * t);
      return {0.5 * (ep + em), 0.5 * (ep - em) / rate};
    }
    default: {
      const double e = std::exp(half_trace * t);
      return {e, e * t};
    }
    }
  }
};

// Spectrum of A with the singular case folded into the real ones; used for
// the derivative x'(t), which solves the homogeneous system for every D.
Propagator homogeneous_propagator(double T, double D, double rel) {
  const double kappa = 0.25 * T * T - D;
  const double scale = std::max(1.0, T * T);
  if (std::abs(4.0 * kappa) < rel * scale) {
    return {SpectrumCase::RealRepeated, 0.5 * T, 0.0};
  }
  if (kappa < 0.0) {
    return {SpectrumCase::ComplexPair, 0.5 * T, std::sqrt(-kappa)};
  }
  return {SpectrumCase::RealDistinct, 0.5 * T, std::sqrt(kappa)};
}

double effective_D(double T, double D, double rel) {
  return classify_spectrum(T, D, rel) == SpectrumCase::SingularZeroEigen ? 0.0 : D;
}

// Successive zeros of x'(t), the ends of the intervals on which x(t) is
// monotone.
class StationaryTimes {
public:
  StationaryTimes(const LinearField& f, double D, double x0, double y0, double rel)
      : prop_(homogeneous_propagator(f.T, D, rel)) {
    p_ = f.T * x0 - y0;
    const double vy = D * x0 - f.a;
    qv_ = 0.5 * f.T * p_ - vy;
    if (prop_.kind == SpectrumCase::ComplexPair) {
      phase_ = std::atan2(qv_ / prop_.rate, p_);
    }
  }

  // Smallest stationary time strictly greater than t, or +inf.
  double next_after(double t) const {
    switch (prop_.kind) {
    case SpectrumCase::ComplexPair: {
      if (p_ == 0.0 && qv_ == 0.0) {
        return kInf;
      }
      const double w = prop_.rate;
      double k = std::floor((w * t - phase_ - 0.5 * kPi) / kPi);
      double tk = (phase_ + 0.5 * kPi + k * kPi) / w;
      while (tk <= t) {
        k += 1.0;
        tk = (phase_ + 0.5 * kPi + k * kPi) / w;
      }
      return tk;
    }
    case SpectrumCase::RealDistinct: {
      if (qv_ != 0.0) {
        const double r = -p_ * prop_.rate / qv_;
        if (std::abs(r) < 1.0) {
          const double tc = std::atanh(r) / prop_.rate;
          if (tc > t) {
            return tc;
          }
        }
      }
      return kInf;
    }
    default:
      if (qv_ != 0.0) {
        const double tc = -p_ / qv_;
        if (tc > t) {
          return tc;
        }
      }
      return kInf;
    }
  }

private:
  Propagator prop_;
  double p_ = 0.0;
  double qv_ = 0.0;
  double phase_ = 0.0;
};

struct Frame {
  double sx;  // x sign
  double sy;  // y sign
  double st;  // time sign
};

// Left-form field seen in the frame X = sx x, Y = sy y, s = st t.
LinearField to_frame(double a, double T, double D, const Frame& fr) {
  return {fr.sx * a, fr.st * T, D};
}

Frame frame_for(ZoneSide side, double dir) {
  const double sx = side == ZoneSide::Left ? 1.0 : -1.0;
  return {sx, sx * dir, dir};
}

} // namespace

const char* to_string(SpectrumCase c) {
  switch (c) {
  case SpectrumCase::ComplexPair:
    return "complex_pair";
  case SpectrumCase::RealDistinct:
    return "real_distinct";
  case SpectrumCase::RealRepeated:
    return "real_repeated";
  case SpectrumCase::SingularZeroEigen:
    return "singular_zero_eigen";
  }
  return "unknown";
}

SpectrumCase classify_spectrum(double T, double D, double rel) {
  const double scale = std::max(1.0, T * T);
  if (std::abs(D) <= rel * scale) {
    return SpectrumCase::SingularZeroEigen;
  }
  const double disc = T * T - 4.0 * D;
  if (std::abs(disc) < rel * scale) {
    return SpectrumCase::RealRepeated;
  }
  return disc < 0.0 ? SpectrumCase::ComplexPair : SpectrumCase::RealDistinct;
}

FlowState flow(const LinearField& f, const FlowState& state, double dt, double spectrum_rel) {
  FlowState out;
  out.t = state.t + dt;
  if (dt == 0.0) {
    out.x = state.x;
    out.y = state.y;
    return out;
  }
  const SpectrumCase kind = classify_spectrum(f.T, f.D, spectrum_rel);
  if (kind == SpectrumCase::SingularZeroEigen) {
    // y' = -a, x' = T x - y
    const double z = f.T * dt;
    out.x = state.x * std::exp(z) - state.y * dt * phi1(z) + f.a * dt * dt * phi2(z);
    out.y = state.y - f.a * dt;
    return out;
  }
  const double xs = f.a / f.D;
  const double ys = f.T * xs;
  const double wx = state.x - xs;
  const double wy = state.y - ys;
  const Propagator prop = homogeneous_propagator(f.T, f.D, spectrum_rel);
  const auto [c, s] = prop.scaled(dt);
  const double mx = 0.5 * f.T * wx - wy;
  const double my = f.D * wx - 0.5 * f.T * wy;
  out.x = xs + (c * wx + s * mx);
  out.y = ys + (c * wy + s * my);
  return out;
}

namespace detail {

std::optional<double> left_exit_time(const LinearField& f, double x0, double y0,
                                     const Tolerances& tol) {
  const bool enters = x0 < 0.0 || (x0 == 0.0 && (y0 > 0.0 || (y0 == 0.0 && f.a < 0.0)));
  if (!enters) {
    return std::nullopt;
  }
  const double rel = tol.spectrum_rel;
  const double D = effective_D(f.T, f.D, rel);
  const LinearField g{f.a, f.T, D};
  const Propagator prop = homogeneous_propagator(f.T, D, rel);

  // Fastest exponential rate, to keep exp() finite.
  double growth = prop.half_trace;
  if (prop.kind == SpectrumCase::RealDistinct) {
    growth += prop.rate;
  }
  double t_max = tol.oracle_time_cap;
  if (growth > 0.0) {
    t_max = std::min(t_max, 600.0 / growth);
  }
  if (prop.kind == SpectrumCase::ComplexPair && prop.half_trace <= 0.0) {
    // Successive maxima of x do not grow: a return, if any, happens within
    // one revolution about the equilibrium plus the half-turn to the next
    // extremum of x.
    t_max = std::min(t_max, 3.0 * kPi / prop.rate);
  }

  const double t_char = 1.0 / std::max({std::abs(f.T), std::sqrt(std::abs(D)), 1e-12});
  const double t_min = 1e-12 * t_char;

  auto x_at = [&](double t) { return flow(g, {x0, y0, 0.0}, t, rel).x; };
  const StationaryTimes stationary(g, D, x0, y0, rel);

  double t_prev = 0.0;
  for (long seg = 0; seg < 1000000 && t_prev < t_max; ++seg) {
    double t_end = std::min(stationary.next_after(std::max(t_prev, t_min)), t_max);
    const double x_end = x_at(t_end);
    if (x_end > 0.0 || (x_end == 0.0 && t_end > t_min)) {
      double lo = t_prev;
      double hi = t_end;
      for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) {
          break;
        }
        if (x_at(mid) < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      // A genuine exit has x' = -y >= 0. Anything else is rounding noise
      // from an orbit riding a separatrix.
      const double y_exit = flow(g, {x0, y0, 0.0}, hi, rel).y;
      if (y_exit > 1e-9 * (1.0 + std::abs(x0) + std::abs(y0))) {
        return std::nullopt;
      }
      return hi;
    }
    t_prev = t_end;
  }
  return std::nullopt;
}

} // namespace detail

std::optional<Crossing> first_crossing(const LinearField& f, double y0, CrossingDirection dir,
                                       const Tolerances& tol) {
  if (y0 < 0.0) {
    throw PreconditionError("first_crossing needs y0 >= 0");
  }
  if (y0 == 0.0 && f.a == 0.0) {
    return std::nullopt;
  }
  const Frame fr = dir == CrossingDirection::ForwardFromLeft ? frame_for(ZoneSide::Left, 1.0)
                                                             : frame_for(ZoneSide::Right, -1.0);
  const LinearField g = to_frame(f.a, f.T, f.D, fr);
  const auto t = detail::left_exit_time(g, 0.0, fr.sy * y0, tol);
  if (!t) {
    return std::nullopt;
  }
  const FlowState end = flow(g, {0.0, fr.sy * y0, 0.0}, *t, tol.spectrum_rel);
  return Crossing{fr.st * *t, fr.sy * end.y};
}

std::optional<double> first_crossing_time(const LinearField& f, double y0, CrossingDirection dir,
                                          const Tolerances& tol) {
  const auto c = first_crossing(f, y0, dir, tol);
  if (!c) {
    return std::nullopt;
  }
  return c->time;
}

std::optional<double> oracle_half_map(const LinearField& f, double y0, CrossingDirection dir,
                                      const Tolerances& tol) {
  const auto c = first_crossing(f, y0, dir, tol);
  if (!c) {
    return std::nullopt;
  }
  return c->y;
}

std::optional<FullTurn> full_turn(const CanonicalParams& p, double y0, const Tolerances& tol) {
  const auto left =
      first_crossing({p.a_L, p.T_L, p.D_L}, y0, CrossingDirection::ForwardFromLeft, tol);
  if (!left) {
    return std::nullopt;
  }
  const Frame fr = frame_for(ZoneSide::Right, 1.0);
  const LinearField g = to_frame(p.a_R, p.T_R, p.D_R, fr);
  const double start_y = fr.sy * left->y;
  const auto t = detail::left_exit_time(g, 0.0, start_y, tol);
  if (!t) {
    return std::nullopt;
  }
  const FlowState end = flow(g, {0.0, start_y, 0.0}, *t, tol.spectrum_rel);
  FullTurn out;
  out.y1 = left->y;
  out.y_return = fr.sy * end.y;
  out.tau_left = left->time;
  out.tau_right = *t;
  return out;
}

CycleCheck verify_cycle(const CanonicalParams& p, double y0_star, const Tolerances& tol) {
  const auto turn = full_turn(p, y0_star, tol);
  if (!turn) {
    throw NotClosed("orbit through (0, y0*) does not complete a full turn");
  }
  return {std::abs(turn->y_return - y0_star), turn->tau_left + turn->tau_right};
}

std::vector<TrajectorySample> sample_trajectory(const CanonicalParams& p, const FlowState& start,
                                                double t_span, std::size_t n,
                                                const Tolerances& tol) {
  std::vector<TrajectorySample> out;
  if (n == 0) {
    return out;
  }
  const double dir = t_span < 0.0 ? -1.0 : 1.0;
  const LinearField left{p.a_L, p.T_L, p.D_L};
  const LinearField right{p.a_R, p.T_R, p.D_R};
  auto field = [&](ZoneSide s) -> const LinearField& { return s == ZoneSide::Left ? left : right; };

  // Zone entered from a point on x = 0, or nullopt when the point is a
  // stationary tangency (both folds invisible, or an equilibrium).
  auto zone_from_section = [&](double y) -> std::optional<ZoneSide> {
    const double dx = -dir * y;
    if (dx < 0.0) {
      return ZoneSide::Left;
    }
    if (dx > 0.0) {
      return ZoneSide::Right;
    }
    if (p.a_L < 0.0) {
      return ZoneSide::Left;
    }
    if (p.a_R > 0.0) {
      return ZoneSide::Right;
    }
    return std::nullopt;
  };

  // Elapsed |time| until the active zone is left, or +inf.
  auto exit_after = [&](ZoneSide side, double x, double y) {
    const Frame fr = frame_for(side, dir);
    const LinearField g = to_frame(field(side).a, field(side).T, field(side).D, fr);
    const auto t = detail::left_exit_time(g, fr.sx * x, fr.sy * y, tol);
    return t ? *t : kInf;
  };

  FlowState seg{start.x, start.y, start.t};
  std::optional<ZoneSide> side;
  if (start.x < 0.0) {
    side = ZoneSide::Left;
  } else if (start.x > 0.0) {
    side = ZoneSide::Right;
  } else {
    side = zone_from_section(start.y);
  }
  double seg_len = side ? exit_after(*side, seg.x, seg.y) : kInf;

  std::size_t switches = 0;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double frac = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
    const double t_k = start.t + frac * t_span;
    while (side && dir * (t_k - seg.t) > seg_len) {
      const FlowState hit = flow(field(*side), seg, dir * seg_len, tol.spectrum_rel);
      seg = {0.0, hit.y, hit.t};
      side = zone_from_section(seg.y);
      seg_len = side ? exit_after(*side, seg.x, seg.y) : kInf;
      if (++switches > 1000000) {
        throw ConvergenceError("trajectory: too many switching events");
      }
    }
    TrajectorySample sample;
    if (side) {
      sample.state = flow(field(*side), seg, t_k - seg.t, tol.spectrum_rel);
      sample.side = *side;
    } else {
      sample.state = {seg.x, seg.y, t_k};
      sample.side = ZoneSide::Left;
    }
    out.push_back(sample);
  }
  return out;
}

} // namespace pwlcycle
