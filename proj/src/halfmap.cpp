#include "pwlcycle/halfmap.hpp"

#include "pwlcycle/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace pwlcycle {

namespace {

constexpr double kPi = std::numbers::pi;

// W is treated as linear when the quadratic coefficient is negligible against
// the linear one; the general formula cancels catastrophically there.
bool quadratic_negligible(double T, double D) {
  return D == 0.0 || std::abs(D) <= 1e-12 * T * T;
}

// (log1p(-x) + x) / x^2, x < 1.
double log1p_remainder(double x) {
  if (std::abs(x) < 0.1) {
    double term = 1.0;
    double sum = 0.0;
    for (int k = 2; k < 40; ++k) {
      sum -= term / k;
      term *= x;
    }
    return sum;
  }
  return (std::log1p(-x) + x) / (x * x);
}

// Left-form constant q(a, T, D) of the integral equation.
double q_constant(double a, double T, double D) {
  if (a > 0.0) {
    return 0.0;
  }
  const double disc = 4.0 * D - T * T;
  const double base = kPi * T / (D * std::sqrt(disc));
  return a == 0.0 ? base : 2.0 * base;
}

// Plain bisection on a monotone function with f(lo) > 0 >= f(hi) in the
// sense of the caller. NaN values are treated as positive.
template <class F>
double bisect_decreasing(F&& f, double lo, double hi, double rel) {
  for (int it = 0; it < 4000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) {
      break;
    }
    const double fm = f(mid);
    if (fm <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (rel > 0.0 && hi - lo <= rel * (std::abs(lo) + std::abs(hi))) {
      break;
    }
  }
  return 0.5 * (lo + hi);
}

double solve_y1(const HalfMapSpec& spec, double y0) {
  auto f = [&](double y1) {
    return detail::integral_closed_form(spec.a, spec.T, spec.D, y1, y0, spec.tol.discriminant_rel) -
           spec.q;
  };
  const double f_hi = f(0.0);
  if (!(f_hi < 0.0)) {
    return 0.0;
  }
  double lo = spec.image_lo;
  if (!std::isfinite(lo)) {
    lo = -std::max({1.0, y0, std::abs(spec.a)});
    int grow = 0;
    while (f(lo) <= 0.0) {
      lo *= 2.0;
      if (++grow > 2000 || !std::isfinite(lo)) {
        throw ConvergenceError("half-map: no bracket for y1 below " + std::to_string(lo));
      }
    }
  }
  double y1 = bisect_decreasing(f, lo, 0.0, spec.tol.root_rel);
  return std::min(y1, 0.0);
}

// Left endpoint lambda > 0: root of y0 -> int_0^{y0} -y/W dy - q (decreasing).
double solve_lambda(const HalfMapSpec& spec) {
  auto f = [&](double y0) {
    return detail::integral_closed_form(spec.a, spec.T, spec.D, 0.0, y0, spec.tol.discriminant_rel) -
           spec.q;
  };
  double hi = std::max(std::abs(spec.a), 1e-300);
  int grow = 0;
  while (f(hi) > 0.0) {
    hi *= 2.0;
    if (++grow > 2000 || !std::isfinite(hi)) {
      throw ConvergenceError("half-map: no bracket for the left endpoint of the domain");
    }
  }
  return bisect_decreasing(f, 0.0, hi, spec.tol.root_rel);
}

} // namespace

const char* to_string(Side s) {
  return s == Side::LeftForward ? "left" : "right";
}

namespace detail {

double smallest_positive_root(double a, double T, double D) {
  if (a == 0.0) {
    return kInf;
  }
  if (quadratic_negligible(T, D)) {
    if (T == 0.0) {
      return kInf;
    }
    const double r = a / T;
    return r > 0.0 ? r : kInf;
  }
  const double disc = T * T - 4.0 * D;
  if (disc < 0.0) {
    return kInf;
  }
  const double b = -a * T;
  const double sq = std::abs(a) * std::sqrt(disc);
  const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double best = kInf;
  for (double r : {qq / D, qq != 0.0 ? a * a / qq : kInf}) {
    if (r > 0.0 && r < best) {
      best = r;
    }
  }
  return best;
}

double largest_negative_root(double a, double T, double D) {
  if (a == 0.0) {
    return -kInf;
  }
  if (quadratic_negligible(T, D)) {
    if (T == 0.0) {
      return -kInf;
    }
    const double r = a / T;
    return r < 0.0 ? r : -kInf;
  }
  const double disc = T * T - 4.0 * D;
  if (disc < 0.0) {
    return -kInf;
  }
  const double b = -a * T;
  const double sq = std::abs(a) * std::sqrt(disc);
  const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double best = -kInf;
  for (double r : {qq / D, qq != 0.0 ? a * a / qq : -kInf}) {
    if (r < 0.0 && r > best) {
      best = r;
    }
  }
  return best;
}

double integral_closed_form(double a, double T, double D, double y1, double y0,
                            double discriminant_rel) {
  if (y0 == y1) {
    return 0.0;
  }
  const double span = y0 - y1;

  if (a == 0.0) {
    // W = D y^2: the two log singularities cancel in the principal value.
    if (y0 == 0.0 || y1 == 0.0) {
      throw DomainError("principal value diverges: a = 0 and an endpoint at 0");
    }
    return -std::log(y0 / -y1) / D;
  }

  // Near y = 0 expand 1/W in powers of y. The differences y0^n - y1^n come
  // from P_n = s P_{n-1} - p P_{n-2} (s = y0 + y1, p = y0 y1), which keeps
  // the factor y0 + y1 exact when y1 is close to -y0.
  const double tau = T / a;
  const double dd = D / (a * a);
  const double reach = std::max(std::abs(y0), std::abs(y1));
  if (reach * std::max(std::abs(tau), std::sqrt(std::abs(dd))) <= 0.05) {
    const double s = y0 + y1;
    const double p = y0 * y1;
    double p_prev = span;  // P_1
    double p_cur = s * span;  // P_2
    double c_prev = 0.0;
    double c_cur = 1.0;
    double sum = 0.0;
    for (int k = 0; k < 80; ++k) {
      const double term = c_cur * p_cur / (k + 2);
      sum += term;
      if (k > 2 && std::abs(term) <= 1e-18 * std::abs(sum)) {
        break;
      }
      const double c_next = tau * c_cur - dd * c_prev;
      c_prev = c_cur;
      c_cur = c_next;
      const double p_next = s * p_cur - p * p_prev;
      p_prev = p_cur;
      p_cur = p_next;
    }
    return -sum / (a * a);
  }

  // Dropping D y^2 moves W by less than an ulp over the range.
  if (D == 0.0 ||
      std::abs(D) * reach * reach <= 1e-17 * std::abs(a) * (std::abs(a) + std::abs(T) * reach)) {
    // W = a (a - T y).
    const double w1 = a - T * y1;
    const double x = T * span / w1;
    return -span * y1 / (a * w1) + span * span * log1p_remainder(x) / (w1 * w1);
  }

  const double aT = a * T;
  const double disc4 = 4.0 * D - T * T;
  if (aT != 0.0 && disc4 < 0.0 && std::abs(disc4) >= discriminant_rel * std::max(1.0, T * T)) {
    // Real roots r1 (larger) and r2. Partial fractions pivoted on r2:
    //   -y/W = -[r2 (1/(y-r1) - 1/(y-r2)) + dr/(y-r1)] / (D dr),  dr = r1 - r2,
    // stays free of 1/D cancellation both for small D and for r1 close to r2.
    const double sq = std::abs(a) * std::sqrt(-disc4);
    const double b = -aT;
    const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    const double r1 = qq / D;
    const double r2 = a * a / qq;
    const double ddr = b >= 0.0 ? -sq : sq;  // D * (r1 - r2)
    const double dr = ddr / D;
    const double l12 = std::log1p(dr * span / ((y1 - r1) * (y0 - r2)));
    const double l1 = std::log1p(span / (y1 - r1));
    return -(r2 * l12 / ddr + l1 / D);
  }

  const double w1 = (D * y1 - a * T) * y1 + a * a;
  const double dw = span * (D * (y0 + y1) - a * T);
  const double log_part = -std::log1p(dw / w1) / (2.0 * D);
  if (aT == 0.0) {
    return log_part;
  }

  // int dy / W between y1 and y0
  double dj = 0.0;
  if (std::abs(disc4) < discriminant_rel * std::max(1.0, T * T)) {
    const double r = aT / (2.0 * D);
    dj = span / (D * (y0 - r) * (y1 - r));
  } else {
    const double s = std::abs(a) * std::sqrt(disc4);
    const double u0 = (2.0 * D * y0 - aT) / s;
    const double u1 = (2.0 * D * y1 - aT) / s;
    const double du = 2.0 * D * span / s;
    dj = 2.0 / s * std::atan2(du, 1.0 + u0 * u1);
  }
  return log_part - aT / (2.0 * D) * dj;
}

} // namespace detail

HalfMapSpec build_spec(double a, double T, double D, Side side, const Tolerances& tol) {
  HalfMapSpec spec;
  spec.side = side;
  spec.a = a;
  spec.T = T;
  spec.D = D;
  spec.tol = tol;

  const double ae = spec.a_eff();
  const double te = spec.T_eff();
  const double disc4 = spec.focus_discriminant();

  spec.exists = (ae <= 0.0 && disc4 > 0.0) || ae > 0.0;
  if (!spec.exists) {
    spec.q = 0.0;
    spec.domain = {0.0, 0.0};
    spec.image_lo = 0.0;
    spec.image_hi = 0.0;
    return spec;
  }

  spec.q = q_constant(ae, te, D);
  spec.domain.hi = detail::smallest_positive_root(a, T, D);
  spec.image_lo = detail::largest_negative_root(a, T, D);
  spec.domain.lo = 0.0;
  spec.image_hi = 0.0;

  if (ae < 0.0 && disc4 > 0.0 && te < 0.0) {
    spec.domain.lo = solve_lambda(spec);
  } else if (ae < 0.0 && disc4 > 0.0 && te > 0.0) {
    spec.image_hi = solve_y1(spec, 0.0);
  }
  return spec;
}

void require_exists(const HalfMapSpec& spec) {
  if (!spec.exists) {
    std::ostringstream os;
    os << to_string(spec.side) << " half-map not defined for (a, T, D) = (" << spec.a << ", "
       << spec.T << ", " << spec.D << ")";
    throw NotDefined(os.str());
  }
}

double pv_integral(const HalfMapSpec& spec, double y1, double y0) {
  if (!(y1 <= 0.0 && y0 >= 0.0)) {
    throw DomainError("pv_integral expects y1 <= 0 <= y0");
  }
  const double r_pos = detail::smallest_positive_root(spec.a, spec.T, spec.D);
  const double r_neg = detail::largest_negative_root(spec.a, spec.T, spec.D);
  if (y0 > r_pos || y1 < r_neg) {
    throw DomainError("W vanishes inside the integration range");
  }
  if (spec.a == 0.0 && spec.D == 0.0) {
    throw DomainError("W is identically zero");
  }
  if (spec.a == 0.0 && y0 == 0.0 && y1 == 0.0) {
    return 0.0;
  }
  return detail::integral_closed_form(spec.a, spec.T, spec.D, y1, y0, spec.tol.discriminant_rel);
}

HalfMapEval eval(const HalfMapSpec& spec, double y0) {
  require_exists(spec);
  if (!spec.domain.contains(y0)) {
    std::ostringstream os;
    os << "y0 = " << y0 << " outside the domain [" << spec.domain.lo << ", " << spec.domain.hi
       << ")";
    throw DomainError(os.str());
  }

  HalfMapEval out;
  out.y0 = y0;
  if (y0 == 0.0 && spec.image_hi < 0.0) {
    out.y1 = spec.image_hi;
  } else if (y0 == spec.domain.lo && (spec.domain.lo > 0.0 || spec.image_hi == 0.0)) {
    out.y1 = 0.0;
  } else if (spec.a == 0.0) {
    // Homogeneous side: the map is linear.
    out.y1 = -y0 * std::exp(spec.D * spec.q);
  } else {
    out.y1 = solve_y1(spec, y0);
  }

  if (spec.a == 0.0 && y0 == 0.0) {
    out.residual = 0.0;
  } else {
    out.residual =
        detail::integral_closed_form(spec.a, spec.T, spec.D, out.y1, y0, spec.tol.discriminant_rel) -
        spec.q;
  }
  return out;
}

HalfMapDerivatives derivatives(const HalfMapSpec& spec, double y0, double y1) {
  if (y1 == 0.0) {
    throw DomainError("half-map derivatives need y1 < 0");
  }
  const double w0 = spec.W(y0);
  const double w1 = spec.W(y1);
  HalfMapDerivatives d;
  d.d1 = y0 * w1 / (y1 * w0);
  d.d2 = -spec.a * spec.a * (y0 * y0 - y1 * y1) * w1 / (y1 * y1 * y1 * w0 * w0);
  return d;
}

double taylor_quadratic_coeff(const HalfMapSpec& spec) {
  require_exists(spec);
  if (spec.a == 0.0 || spec.domain.lo != 0.0 || spec.image_hi != 0.0) {
    throw PreconditionError("Taylor expansion at 0 needs a != 0 and y(0) = 0");
  }
  return -2.0 * spec.T / (3.0 * spec.a);
}

double asymptotic_ratio(const HalfMapSpec& spec) {
  const double disc4 = spec.focus_discriminant();
  if (!(disc4 > 0.0)) {
    throw NotApplicable("asymptotic ratio needs 4D - T^2 > 0");
  }
  return -std::exp(kPi * spec.T / std::sqrt(disc4));
}

double sensitivity(const HalfMapSpec& spec, double y0, double y1, Sensitivity which) {
  require_exists(spec);
  if (!(y1 < 0.0)) {
    throw PreconditionError("sensitivity needs y1 < 0");
  }
  const double ae = spec.a_eff();
  if (which == Sensitivity::WrtT) {
    if (!(ae > 0.0)) {
      throw PreconditionError("dy/dT needs q independent of T (a > 0 left, a < 0 right)");
    }
    auto integrand = [&](double y) {
      const double r = y / spec.W(y);
      return r * r;
    };
    double err = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, y1, y0, 20, spec.tol.quadrature_abs, &err);
    return spec.a * spec.W(y1) / y1 * integral;
  }
  if (!(ae < 0.0 && spec.focus_discriminant() > 0.0)) {
    throw PreconditionError("dy/da needs a focus side with a < 0 (left) or a > 0 (right)");
  }
  return (y0 - y1) * (spec.T * y0 * y1 - spec.a * (y0 + y1)) / (y1 * spec.W(y0));
}

} // namespace pwlcycle
