#pragma once

// Independent reference computations for the test suites. Nothing here calls
// the closed forms under test.

#include "pwlcycle/canonical.hpp"
#include "pwlcycle/flow_oracle.hpp"
#include "pwlcycle/halfmap.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>

namespace testsupport {

// Portable uniform doubles from mt19937_64.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  bool coin() { return (eng_() >> 63) != 0; }
  std::uint64_t raw() { return eng_(); }

private:
  std::mt19937_64 eng_;
};

// int_{y1}^{y0} -y / W(y) dy by adaptive Gauss-Kronrod (a != 0, W > 0 on the
// closed range).
inline double quad_integral(double a, double T, double D, double y1, double y0) {
  auto f = [&](double y) { return -y / ((D * y - a * T) * y + a * a); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, y1, y0, 12, 1e-13,
                                                                        &err);
}

// Numerical solution of x' = T x - y, y' = D x - a by a controlled
// Runge-Kutta-Fehlberg 7(8) stepper.
inline pwlcycle::FlowState ode_flow(const pwlcycle::LinearField& f, const pwlcycle::FlowState& s,
                                    double dt) {
  using State = std::array<double, 2>;
  namespace odeint = boost::numeric::odeint;
  State z{s.x, s.y};
  auto rhs = [&](const State& u, State& du, double) {
    du[0] = f.T * u[0] - u[1];
    du[1] = f.D * u[0] - f.a;
  };
  if (dt != 0.0) {
    auto stepper =
        odeint::make_controlled(1e-14, 1e-14, odeint::runge_kutta_fehlberg78<State>());
    odeint::integrate_adaptive(stepper, rhs, z, 0.0, dt, dt / 1000.0);
  }
  return {z[0], z[1], s.t + dt};
}

// Central differences with one Richardson step.
inline double richardson_d1(const std::function<double(double)>& g, double x, double h) {
  auto c = [&](double s) { return (g(x + s) - g(x - s)) / (2.0 * s); };
  return (4.0 * c(0.5 * h) - c(h)) / 3.0;
}

inline double richardson_d2(const std::function<double(double)>& g, double x, double h) {
  const double g0 = g(x);
  auto c = [&](double s) { return (g(x + s) - 2.0 * g0 + g(x - s)) / (s * s); };
  return (4.0 * c(0.5 * h) - c(h)) / 3.0;
}

// Ridders' extrapolation of a central-difference estimate est(h) whose error
// is a series in h^2: shrink h by 1.4 per row, Neville tableau, keep the entry
// with the smallest error estimate.
inline double ridders(const std::function<double(double)>& est, double h0) {
  constexpr int kRows = 12;
  constexpr double con = 1.4, con2 = con * con;
  double a[kRows][kRows];
  double h = h0;
  double best = est(h);
  double err = std::numeric_limits<double>::max();
  a[0][0] = best;
  for (int i = 1; i < kRows; ++i) {
    h /= con;
    a[0][i] = est(h);
    double fac = con2;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
      fac *= con2;
      const double e =
          std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
      if (e <= err) {
        err = e;
        best = a[j][i];
      }
    }
    if (std::abs(a[i][i] - a[i - 1][i - 1]) >= 2.0 * err) {
      break;
    }
  }
  return best;
}

inline double ridders_d1(const std::function<double(double)>& g, double x, double h0) {
  return ridders([&](double h) { return (g(x + h) - g(x - h)) / (2.0 * h); }, h0);
}

inline double ridders_d2(const std::function<double(double)>& g, double x, double h0) {
  const double g0 = g(x);
  return ridders([&](double h) { return (g(x + h) - 2.0 * g0 + g(x - h)) / (h * h); }, h0);
}

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// A point in the interior of the domain: u in (0, 1) over a bounded domain,
// or lo + max(scale, lo) * 10^(4u - 2) over an unbounded one (lo can be
// huge for weak foci).
inline double interior_point(const pwlcycle::Interval& dom, double u, double scale) {
  if (dom.bounded()) {
    return dom.lo + u * (dom.hi - dom.lo);
  }
  return dom.lo + std::max(scale, std::abs(dom.lo)) * std::pow(10.0, 4.0 * u - 2.0);
}

} // namespace testsupport
