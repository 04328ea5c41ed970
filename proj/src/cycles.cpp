#include "pwlcycle/cycles.hpp"

#include "pwlcycle/errors.hpp"
#include "pwlcycle/flow_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pwlcycle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

double rel_residual(double lhs, double rhs, double scale) {
  const double s = std::max(scale, std::numeric_limits<double>::min());
  return std::abs(lhs - rhs) / s;
}

bool focus(double T, double D) { return 4.0 * D - T * T > 0.0; }

// Bisection on a continuous function with f(lo), f(hi) of opposite strict
// signs, down to adjacent doubles.
template <class F>
double bisect_sign_change(F&& f, double lo, double hi, int sign_lo) {
  for (int it = 0; it < 2000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) {
      break;
    }
    const double v = f(mid);
    if (v == 0.0) {
      return mid;
    }
    if (sign_of(v) == sign_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

std::vector<double> scan_grid(const Interval& I, const Tolerances& tol) {
  std::vector<double> pts;
  const std::size_t n = std::max<std::size_t>(tol.scan_points, 8);
  if (I.bounded()) {
    const double w = I.hi - I.lo;
    for (std::size_t k = 1; k <= n; ++k) {
      pts.push_back(I.lo + w * static_cast<double>(k) / static_cast<double>(n + 1));
    }
    for (int k = 10; k <= 40; ++k) {
      const double u = std::ldexp(1.0, -k);
      pts.push_back(I.lo + w * u);
      pts.push_back(I.hi - w * u);
    }
  } else {
    const double cap = std::max(tol.scan_cap, 1.0);
    const double e_lo = -12.0;
    const double e_hi = std::log10(cap);
    for (std::size_t k = 0; k < n; ++k) {
      const double e = e_lo + (e_hi - e_lo) * static_cast<double>(k) / static_cast<double>(n - 1);
      pts.push_back(I.lo + std::pow(10.0, e));
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double y) { return !I.interior(y); }),
            pts.end());
  return pts;
}

} // namespace

CycleInvariants invariants(const CanonicalParams& p) {
  const double aL = p.a_L, aR = p.a_R, TL = p.T_L, TR = p.T_R, DL = p.D_L, DR = p.D_R;
  CycleInvariants inv;
  inv.xi = aR * TL - aL * TR;
  inv.c0 = aR * aL * inv.xi;
  inv.c1 = aR * TR * DL - aL * TL * DR;
  inv.c2 = aL * aL * DR - aR * aR * DL;
  inv.c_inf = TL * (TL * TL * DR - TR * TR * DL);
  inv.mu = (focus(TL, DL) && focus(TR, DR))
               ? TL / std::sqrt(4.0 * DL - TL * TL) + TR / std::sqrt(4.0 * DR - TR * TR)
               : kNaN;

  if (inv.c1 != 0.0) {
    const double m = -inv.c2 / inv.c1;
    inv.gamma_center = std::make_pair(m, m);
    inv.gamma_asymptote = m;
    if (inv.c0 * inv.c1 >= 0.0) {
      inv.gamma_bisector_point = std::sqrt(inv.c0 / inv.c1);
    }
  }

  // c0 (D_L, D_R) + c2 (a_L T_L, a_R T_R) + c1 (a_L^2, a_R^2) = 0
  {
    const double tL[3] = {inv.c0 * DL, inv.c2 * aL * TL, inv.c1 * aL * aL};
    const double tR[3] = {inv.c0 * DR, inv.c2 * aR * TR, inv.c1 * aR * aR};
    const double sL = std::abs(tL[0]) + std::abs(tL[1]) + std::abs(tL[2]);
    const double sR = std::abs(tR[0]) + std::abs(tR[1]) + std::abs(tR[2]);
    const double rL = sL > 0.0 ? std::abs(tL[0] + tL[1] + tL[2]) / sL : 0.0;
    const double rR = sR > 0.0 ? std::abs(tR[0] + tR[1] + tR[2]) / sR : 0.0;
    inv.identity_residual_1 = std::max(rL, rR);
  }
  // a_L a_R T_L^2 c1 + a_L^2 a_R c_inf = T_L T_R D_L c0
  {
    const double lhs1 = aL * aR * TL * TL * inv.c1;
    const double lhs2 = aL * aL * aR * inv.c_inf;
    const double rhs = TL * TR * DL * inv.c0;
    const double s = std::abs(lhs1) + std::abs(lhs2) + std::abs(rhs);
    inv.identity_residual_2 = s > 0.0 ? rel_residual(lhs1 + lhs2, rhs, s) : 0.0;
  }
  return inv;
}

double F_value(const CycleInvariants& inv, double y0, double y1) {
  return inv.c0 + inv.c1 * y0 * y1 + inv.c2 * (y0 + y1);
}

Displacement::Displacement(const CanonicalParams& p, const Tolerances& tol)
    : left_(build_spec(p.a_L, p.T_L, p.D_L, Side::LeftForward, tol)),
      right_(build_spec(p.a_R, p.T_R, p.D_R, Side::RightBackward, tol)) {
  if (left_.exists && right_.exists) {
    interval_ = {std::max(left_.domain.lo, right_.domain.lo),
                 std::min(left_.domain.hi, right_.domain.hi)};
  } else {
    interval_ = {0.0, 0.0};
  }
}

std::pair<double, double> Displacement::images(double y0) const {
  require_exists(left_);
  require_exists(right_);
  return {eval(left_, y0).y1, eval(right_, y0).y1};
}

double Displacement::operator()(double y0) const {
  const auto [yl, yr] = images(y0);
  return yr - yl;
}

double Displacement::derivative(double y0) const {
  const auto [yl, yr] = images(y0);
  return derivatives(right_, y0, yr).d1 - derivatives(left_, y0, yl).d1;
}

double displacement(const CanonicalParams& p, double y0, const Tolerances& tol) {
  const Displacement delta(p, tol);
  if (!delta.left().exists || !delta.right().exists) {
    require_exists(delta.left());
    require_exists(delta.right());
  }
  if (!delta.interval().contains(y0)) {
    std::ostringstream os;
    os << "y0 = " << y0 << " outside [" << delta.interval().lo << ", " << delta.interval().hi
       << ")";
    throw DomainError(os.str());
  }
  return delta(y0);
}

int delta_prime_sign(const CanonicalParams& p, double y0, double y1) {
  return sign_of(F_value(invariants(p), y0, y1));
}

int delta_second_sign(const CanonicalParams& p, double y0, double y1) {
  const CycleInvariants inv = invariants(p);
  const int s_left = sign_of(p.T_L * (inv.c2 * y0 + inv.c0));
  const int s_right = -sign_of(p.T_R * (inv.c2 * y1 + inv.c0));
  if (s_left != s_right) {
    std::ostringstream os;
    os << "second-derivative sign mismatch at (" << y0 << ", " << y1 << "): " << s_left
       << " vs " << s_right;
    throw UniquenessViolation(os.str());
  }
  return s_left;
}

const char* to_string(Stability s) {
  return s == Stability::Attracting ? "attracting" : "repelling";
}

const char* to_string(CycleStatus s) {
  switch (s) {
  case CycleStatus::NotApplicable:
    return "not_applicable";
  case CycleStatus::NoCycle:
    return "no_cycle";
  case CycleStatus::Cycle:
    return "cycle";
  case CycleStatus::NonIsolated:
    return "non_isolated";
  case CycleStatus::Indeterminate:
    return "indeterminate";
  }
  return "?";
}

CycleSearch search_limit_cycle(const CanonicalParams& p, const Tolerances& tol) {
  CycleSearch out;
  const Displacement delta(p, tol);
  if (!delta.defined()) {
    out.note = !delta.left().exists    ? "left half-map not defined"
               : !delta.right().exists ? "right half-map not defined"
                                       : "empty interval of definition";
    return out;
  }
  const Interval I = delta.interval();
  const CycleInvariants inv = invariants(p);

  std::vector<double> ys = scan_grid(I, tol);
  std::vector<double> ds;
  ds.reserve(ys.size());
  auto f = [&](double y) {
    ++out.evaluations;
    return delta(y);
  };
  for (double y : ys) {
    ds.push_back(f(y));
  }

  // Sign beyond the cap is fixed by the asymptotic ratios once both sides
  // are foci; scan further out if the last sample disagrees.
  if (!I.bounded() && std::isfinite(inv.mu) && inv.mu != 0.0 && !ys.empty()) {
    double y = ys.back();
    while (sign_of(ds.back()) != sign_of(inv.mu) && y < tol.scan_cap_max) {
      y *= std::pow(10.0, 1.0 / 16.0);
      ys.push_back(y);
      ds.push_back(f(y));
    }
  }

  // Near a monodromic origin with a_L > 0 > a_R the sign of delta is
  // -sign(xi); extend the geometric refinement toward 0 if needed.
  if (p.a_L > 0.0 && p.a_R < 0.0 && I.lo == 0.0 && inv.xi != 0.0 && !ys.empty()) {
    const double w = I.bounded() ? I.hi - I.lo : 1.0;
    for (int k = 41; k <= 52 && sign_of(ds.front()) != -sign_of(inv.xi); ++k) {
      const double y = I.lo + w * std::ldexp(1.0, -k);
      if (!(y < ys.front()) || !I.interior(y)) {
        break;
      }
      ys.insert(ys.begin(), y);
      ds.insert(ds.begin(), f(y));
    }
  }
  out.scan_lo = ys.empty() ? I.lo : ys.front();
  out.scan_hi = ys.empty() ? I.lo : ys.back();

  // delta identically zero: a continuum of periodic orbits.
  bool all_zero = !ys.empty();
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (std::abs(ds[i]) > 1e-10 * (1.0 + std::abs(ys[i]))) {
      all_zero = false;
      break;
    }
  }
  if (all_zero) {
    out.status = CycleStatus::NonIsolated;
    out.note = "displacement vanishes on the whole scan";
    return out;
  }

  // Brackets of sign changes, plus those uncovered by refining local minima
  // of |delta|.
  std::vector<std::pair<double, double>> brackets;
  std::vector<double> exact;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (ds[i] == 0.0) {
      exact.push_back(ys[i]);
    }
    if (i + 1 < ys.size() && sign_of(ds[i]) * sign_of(ds[i + 1]) < 0) {
      brackets.emplace_back(ys[i], ys[i + 1]);
    }
  }
  for (std::size_t i = 1; i + 1 < ys.size(); ++i) {
    const int s = sign_of(ds[i]);
    if (s == 0 || sign_of(ds[i - 1]) != s || sign_of(ds[i + 1]) != s) {
      continue;
    }
    if (!(std::abs(ds[i]) < std::abs(ds[i - 1]) && std::abs(ds[i]) < std::abs(ds[i + 1]))) {
      continue;
    }
    // Golden-section on |delta| over [y_{i-1}, y_{i+1}].
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = ys[i - 1], b = ys[i + 1];
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80; ++it) {
      if (sign_of(fc) != s || sign_of(fd) != s) {
        break;
      }
      if (std::abs(fc) < std::abs(fd)) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = f(d);
      }
    }
    for (const auto& [y, v] : {std::make_pair(c, fc), std::make_pair(d, fd)}) {
      if (sign_of(v) == 0) {
        exact.push_back(y);
      } else if (sign_of(v) != s) {
        brackets.emplace_back(ys[i - 1], y);
        brackets.emplace_back(y, ys[i + 1]);
        break;
      }
    }
  }

  std::vector<double> zeros = exact;
  for (const auto& [lo, hi] : brackets) {
    const double z = bisect_sign_change(f, lo, hi, sign_of(f(lo)));
    if (!(std::abs(f(z)) < tol.cycle_residual * (1.0 + std::abs(z)))) {
      std::ostringstream os;
      os << "sign change of the displacement in [" << lo << ", " << hi
         << "] does not bisect to a zero";
      throw ConvergenceError(os.str());
    }
    zeros.push_back(z);
  }
  std::sort(zeros.begin(), zeros.end());
  zeros.erase(std::unique(zeros.begin(), zeros.end(),
                          [](double u, double v) {
                            return std::abs(u - v) <= 1e-9 * std::max(std::abs(u), std::abs(v));
                          }),
              zeros.end());
  out.zeros = zeros;

  if (zeros.empty()) {
    out.status = CycleStatus::NoCycle;
    return out;
  }
  if (inv.xi == 0.0) {
    std::ostringstream os;
    os << "displacement changes sign at y0 = " << zeros.front() << " although xi = 0";
    throw UniquenessViolation(os.str());
  }

  const double c_scale = 1.0 + std::abs(inv.c0) + std::abs(inv.c1) + std::abs(inv.c2);
  std::vector<std::pair<double, double>> simple;
  for (double z : zeros) {
    const double y1 = delta.images(z).first;
    if (std::abs(F_value(inv, z, y1)) > tol.simple_zero * c_scale) {
      simple.emplace_back(z, y1);
    }
  }
  if (simple.size() > 1) {
    std::ostringstream os;
    os << simple.size() << " simple zeros of the displacement:";
    for (const auto& s : simple) {
      os << ' ' << s.first;
    }
    throw UniquenessViolation(os.str());
  }
  if (simple.empty()) {
    out.status = CycleStatus::Indeterminate;
    out.note = "zero of the displacement with F below the simple-zero threshold";
    return out;
  }

  LimitCycleReport cyc;
  cyc.y0_star = simple.front().first;
  cyc.y1_star = simple.front().second;
  cyc.delta_prime = delta.derivative(cyc.y0_star);
  cyc.stability = inv.xi < 0.0 ? Stability::Attracting : Stability::Repelling;

  const int sF = sign_of(F_value(inv, cyc.y0_star, cyc.y1_star));
  if (sF != sign_of(inv.xi)) {
    std::ostringstream os;
    os << "sign(F) = " << sF << " disagrees with sign(xi) = " << sign_of(inv.xi)
       << " at y0 = " << cyc.y0_star;
    throw UniquenessViolation(os.str());
  }
  if (sign_of(cyc.delta_prime) != sF &&
      std::abs(cyc.delta_prime) > 1e-8 * (1.0 + std::abs(cyc.y0_star))) {
    std::ostringstream os;
    os << "delta'(y0*) = " << cyc.delta_prime << " disagrees with sign(F) = " << sF;
    throw UniquenessViolation(os.str());
  }

  try {
    const CycleCheck check = verify_cycle(p, cyc.y0_star, tol);
    cyc.period = check.period;
    cyc.oracle_residual = check.residual;
  } catch (const NotClosed&) {
    cyc.period = kNaN;
    cyc.oracle_residual = kInf;
  }
  out.cycle = cyc;
  out.status = CycleStatus::Cycle;
  if (zeros.size() > 1) {
    out.note = "additional non-simple zeros of the displacement";
  }
  return out;
}

std::optional<LimitCycleReport> find_limit_cycle(const CanonicalParams& p,
                                                 const Tolerances& tol) {
  return search_limit_cycle(p, tol).cycle;
}

const char* to_string(Contraction c) {
  switch (c) {
  case Contraction::Contracting:
    return "contracting";
  case Contraction::Expanding:
    return "expanding";
  case Contraction::Inconclusive:
    return "inconclusive";
  }
  return "?";
}

Contraction oracle_contraction(const CanonicalParams& p, double y0_star, const Tolerances& tol) {
  const Displacement delta(p, tol);
  const Interval I = delta.interval();
  double eps = 1e-3 * y0_star;
  eps = std::min(eps, 0.5 * (y0_star - I.lo));
  if (I.bounded()) {
    eps = std::min(eps, 0.5 * (I.hi - y0_star));
  }
  for (int attempt = 0; attempt < 4 && eps > 0.0; ++attempt, eps *= 0.1) {
    const auto up = full_turn(p, y0_star + eps, tol);
    const auto down = full_turn(p, y0_star - eps, tol);
    if (!up || !down) {
      return Contraction::Inconclusive;
    }
    const bool in_up = std::abs(up->y_return - y0_star) < eps;
    const bool in_down = std::abs(down->y_return - y0_star) < eps;
    if (in_up == in_down) {
      return in_up ? Contraction::Contracting : Contraction::Expanding;
    }
  }
  return Contraction::Inconclusive;
}

std::array<bool, 3> necessary_conditions(const CanonicalParams& p) {
  const CycleInvariants inv = invariants(p);
  return {p.a_L * p.a_L + p.a_R * p.a_R != 0.0, p.T_L * p.T_R < 0.0,
          inv.c0 * inv.c0 + (inv.c1 * inv.c2) * (inv.c1 * inv.c2) != 0.0};
}

const char* to_string(OriginClass c) {
  switch (c) {
  case OriginClass::NotMonodromic:
    return "not_monodromic";
  case OriginClass::MonodromicAttracting:
    return "monodromic_attracting";
  case OriginClass::MonodromicRepelling:
    return "monodromic_repelling";
  case OriginClass::MonodromicUndetermined:
    return "monodromic_undetermined";
  }
  return "?";
}

bool origin_monodromic(const CanonicalParams& p) {
  const bool left = (p.a_L == 0.0 && focus(p.T_L, p.D_L)) || p.a_L > 0.0;
  const bool right = (p.a_R == 0.0 && focus(p.T_R, p.D_R)) || p.a_R < 0.0;
  return left && right;
}

OriginClass classify_origin(const CanonicalParams& p) {
  if (!origin_monodromic(p)) {
    return OriginClass::NotMonodromic;
  }
  if (p.a_L > 0.0 && p.a_R < 0.0) {
    const double xi = invariants(p).xi;
    if (xi > 0.0) {
      return OriginClass::MonodromicAttracting;
    }
    if (xi < 0.0) {
      return OriginClass::MonodromicRepelling;
    }
  }
  return OriginClass::MonodromicUndetermined;
}

const char* to_string(InfinityClass c) {
  switch (c) {
  case InfinityClass::NotMonodromic:
    return "not_monodromic";
  case InfinityClass::Attracting:
    return "attracting";
  case InfinityClass::Repelling:
    return "repelling";
  case InfinityClass::Undetermined:
    return "undetermined";
  }
  return "?";
}

InfinityVerdict classify_infinity(const CanonicalParams& p) {
  InfinityVerdict v;
  if (!(focus(p.T_L, p.D_L) && focus(p.T_R, p.D_R))) {
    return v;
  }
  const CycleInvariants inv = invariants(p);
  v.cls = inv.mu > 0.0   ? InfinityClass::Attracting
          : inv.mu < 0.0 ? InfinityClass::Repelling
                         : InfinityClass::Undetermined;
  if (p.T_L * p.T_R < 0.0) {
    v.c_inf_discrepancy = sign_of(inv.mu) != sign_of(inv.c_inf);
  }
  return v;
}

SingularityCensus monodromic_singularities(const CanonicalParams& p) {
  SingularityCensus c;
  c.origin = origin_monodromic(p);
  // Equilibrium of x' = T x - y, y' = D x - a sits at x = a/D.
  c.left_equilibrium = p.D_L != 0.0 && p.a_L / p.D_L < 0.0 && focus(p.T_L, p.D_L);
  c.right_equilibrium = p.D_R != 0.0 && p.a_R / p.D_R > 0.0 && focus(p.T_R, p.D_R);
  return c;
}

bool existence_sufficient(const CanonicalParams& p, const Tolerances& tol) {
  const CycleInvariants inv = invariants(p);
  if (!(p.T_L * p.T_R < 0.0) || inv.c0 == 0.0) {
    return false;
  }
  if (!(focus(p.T_L, p.D_L) && focus(p.T_R, p.D_R))) {
    return false;
  }
  if (monodromic_singularities(p).count() != 1) {
    return false;
  }
  const Displacement delta(p, tol);
  if (!delta.left().exists || !delta.right().exists) {
    return false;
  }
  return inv.xi * inv.c_inf > 0.0;
}

AnalysisReport analyze(const CanonicalParams& p, const Tolerances& tol) {
  AnalysisReport r;
  r.sewing = check_sewing(p.as_raw(), tol.sewing_rel);
  r.params = p;
  r.left = build_spec(p.a_L, p.T_L, p.D_L, Side::LeftForward, tol);
  r.right = build_spec(p.a_R, p.T_R, p.D_R, Side::RightBackward, tol);
  r.inv = invariants(p);
  r.necessary = necessary_conditions(p);
  r.sufficient = existence_sufficient(p, tol);
  r.origin = classify_origin(p);
  r.infinity = classify_infinity(p);
  r.search = search_limit_cycle(p, tol);
  if (r.search.cycle && !(r.necessary[0] && r.necessary[1] && r.necessary[2])) {
    throw UniquenessViolation("cycle found although a necessary condition fails");
  }
  return r;
}

AnalysisReport analyze(const RawSystem& raw, const Tolerances& tol) {
  const SewingVerdict verdict = check_sewing(raw, tol.sewing_rel);
  if (!verdict.sewing()) {
    throw SewingRejected(std::string(to_string(verdict.status)) + ": " + verdict.detail);
  }
  AnalysisReport r = analyze(lienard_parameters(raw), tol);
  r.sewing = verdict;
  return r;
}

} // namespace pwlcycle
