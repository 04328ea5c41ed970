#include "pwlcycle/canonical.hpp"

#include "pwlcycle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pwlcycle {

namespace {

bool all_finite(const Mat2& m) {
  return std::all_of(m.begin(), m.end(), [](const auto& row) {
    return std::isfinite(row[0]) && std::isfinite(row[1]);
  });
}

bool all_finite(const Vec2& v) { return std::isfinite(v[0]) && std::isfinite(v[1]); }

double trace(const Mat2& m) { return m[0][0] + m[1][1]; }
double det(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

} // namespace

bool RawSystem::finite() const {
  return all_finite(A_L) && all_finite(b_L) && all_finite(A_R) && all_finite(b_R);
}

bool CanonicalParams::finite() const {
  return std::isfinite(T_L) && std::isfinite(T_R) && std::isfinite(D_L) &&
         std::isfinite(D_R) && std::isfinite(a_L) && std::isfinite(a_R);
}

RawSystem CanonicalParams::as_raw() const {
  RawSystem raw;
  raw.A_L = {{{T_L, -1.0}, {D_L, 0.0}}};
  raw.b_L = {0.0, -a_L};
  raw.A_R = {{{T_R, -1.0}, {D_R, 0.0}}};
  raw.b_R = {0.0, -a_R};
  return raw;
}

const char* to_string(SewingStatus s) {
  switch (s) {
  case SewingStatus::Sewing:
    return "sewing";
  case SewingStatus::NonTransversal:
    return "non_transversal";
  case SewingStatus::SlidingPresent:
    return "sliding_present";
  }
  return "unknown";
}

SewingVerdict check_sewing(const RawSystem& raw, double rel_tol) {
  const double a12L = raw.A_L[0][1];
  const double a12R = raw.A_R[0][1];
  const double b1L = raw.b_L[0];
  const double b1R = raw.b_R[0];

  std::ostringstream why;
  const double prod = a12L * a12R;
  if (prod == 0.0) {
    why << "a12L*a12R = 0: the first component is monotone on one side, no crossing orbit can close";
    return {SewingStatus::NonTransversal, why.str()};
  }
  if (prod < 0.0) {
    why << "a12L*a12R = " << prod << " < 0: the fields point to opposite sides on a segment of x1 = 0";
    return {SewingStatus::SlidingPresent, why.str()};
  }
  const double lhs = a12L * b1R;
  const double rhs = a12R * b1L;
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  if (std::abs(lhs - rhs) > rel_tol * scale) {
    why << "a12L*b1R = " << lhs << " differs from a12R*b1L = " << rhs
        << ": the tangency points of the two sides do not coincide";
    return {SewingStatus::SlidingPresent, why.str()};
  }
  return {SewingStatus::Sewing, "a12L*a12R > 0 and a12L*b1R = a12R*b1L"};
}

CanonicalParams lienard_parameters(const RawSystem& raw) {
  CanonicalParams p;
  p.T_L = trace(raw.A_L);
  p.T_R = trace(raw.A_R);
  p.D_L = det(raw.A_L);
  p.D_R = det(raw.A_R);
  p.a_L = raw.A_L[0][1] * raw.b_L[1] - raw.A_L[1][1] * raw.b_L[0];
  p.a_R = raw.A_R[0][1] * raw.b_R[1] - raw.A_R[1][1] * raw.b_R[0];
  return p;
}

CanonicalParams reduce_to_lienard(const RawSystem& raw, double rel_tol) {
  const SewingVerdict verdict = check_sewing(raw, rel_tol);
  if (!verdict.sewing()) {
    throw SewingRejected(std::string(to_string(verdict.status)) + ": " + verdict.detail);
  }
  return lienard_parameters(raw);
}

} // namespace pwlcycle
