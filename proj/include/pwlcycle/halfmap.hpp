#pragma once

#include "pwlcycle/tolerances.hpp"

#include <limits>

namespace pwlcycle {

// Which Poincare half-map of the section x = 0 is meant.
//   LeftForward:   forward flow of x' = T_L x - y, y' = D_L x - a_L in x < 0.
//   RightBackward: backward flow of the right system in x > 0.
enum class Side { LeftForward, RightBackward };

const char* to_string(Side s);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// [lo, hi), hi may be +inf.
struct Interval {
  double lo = 0.0;
  double hi = kInf;

  bool contains(double y) const { return y >= lo && y < hi; }
  bool interior(double y) const { return y > lo && y < hi; }
  bool bounded() const { return hi < kInf; }
};

// Everything needed to evaluate one half-map through the integral equation
//
//   PV int_{y1}^{y0} -y / W(y) dy = q,      W(y) = D y^2 - a T y + a^2.
//
// The right backward map is the left forward map of the system with
// (a, T) -> (-a, -T); W is invariant under that change, q is not.
struct HalfMapSpec {
  Side side = Side::LeftForward;
  double a = 0.0;
  double T = 0.0;
  double D = 0.0;
  double q = 0.0;
  bool exists = false;
  Interval domain{};
  double image_lo = -kInf;
  double image_hi = 0.0;
  Tolerances tol{};

  double W(double y) const { return (D * y - a * T) * y + a * a; }

  // Parameters of the equivalent left forward problem.
  double a_eff() const { return side == Side::LeftForward ? a : -a; }
  double T_eff() const { return side == Side::LeftForward ? T : -T; }

  // 4D - T^2
  double focus_discriminant() const { return 4.0 * D - T * T; }
};

struct HalfMapEval {
  double y0 = 0.0;
  double y1 = 0.0;
  double residual = 0.0;  // PV integral minus q at (y1, y0)
};

struct HalfMapDerivatives {
  double d1 = 0.0;
  double d2 = 0.0;
};

enum class Sensitivity { WrtT, WrtA };

// Existence gate, q, domain [lambda, mu) and image [image_lo, image_hi].
// Never throws for a failed gate: the returned spec has exists == false.
HalfMapSpec build_spec(double a, double T, double D, Side side, const Tolerances& tol = {});

// Throws NotDefined when the gate failed.
void require_exists(const HalfMapSpec& spec);

// Closed-form principal value of int_{y1}^{y0} -y/W(y) dy, y1 <= 0 <= y0.
// Throws DomainError if W has a root strictly inside (y1, y0) other than 0.
double pv_integral(const HalfMapSpec& spec, double y1, double y0);

// y1 = y(y0) for y0 in spec.domain, by bisection on the strictly decreasing
// map y1 -> pv_integral(spec, y1, y0).
HalfMapEval eval(const HalfMapSpec& spec, double y0);

// First and second derivative of the half-map at (y0, y1). Throws
// DomainError for y1 == 0.
HalfMapDerivatives derivatives(const HalfMapSpec& spec, double y0, double y1);

// Coefficient c in y(y0) = -y0 + c y0^2 + O(y0^3); requires a != 0 and y(0) = 0.
double taylor_quadratic_coeff(const HalfMapSpec& spec);

// lim y_L(y0)/y0 (left) or lim y0/y_R(y0) (right); requires 4D - T^2 > 0.
double asymptotic_ratio(const HalfMapSpec& spec);

// Partial derivative of y(y0) with respect to T (when q does not depend on T)
// or with respect to a (focus case where the scaling y -> y/a applies).
double sensitivity(const HalfMapSpec& spec, double y0, double y1, Sensitivity which);

namespace detail {

// int_{y1}^{y0} -y / W(y) dy for W(y) = D y^2 - a T y + a^2, principal value
// at y = 0 when a == 0. No domain checks.
double integral_closed_form(double a, double T, double D, double y1, double y0,
                            double discriminant_rel = 1e-20);

// Smallest strictly positive / largest strictly negative root of W, or +-inf.
double smallest_positive_root(double a, double T, double D);
double largest_negative_root(double a, double T, double D);

} // namespace detail

} // namespace pwlcycle
