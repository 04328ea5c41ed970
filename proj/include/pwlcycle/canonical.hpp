#pragma once

#include <array>
#include <string>

namespace pwlcycle {

using Mat2 = std::array<std::array<double, 2>, 2>;
using Vec2 = std::array<double, 2>;

// x' = A_L x + b_L for x1 < 0, x' = A_R x + b_R for x1 > 0.
struct RawSystem {
  Mat2 A_L{};
  Vec2 b_L{};
  Mat2 A_R{};
  Vec2 b_R{};

  bool finite() const;
};

// Lienard canonical form:
//   x' = T x - y,  y' = D x - a   on each side of x = 0.
struct CanonicalParams {
  double T_L = 0.0;
  double T_R = 0.0;
  double D_L = 0.0;
  double D_R = 0.0;
  double a_L = 0.0;
  double a_R = 0.0;

  bool finite() const;

  // The raw system whose matrices are already in canonical shape.
  RawSystem as_raw() const;
};

enum class SewingStatus { Sewing, NonTransversal, SlidingPresent };

struct SewingVerdict {
  SewingStatus status = SewingStatus::Sewing;
  std::string detail;

  bool sewing() const { return status == SewingStatus::Sewing; }
};

const char* to_string(SewingStatus s);

SewingVerdict check_sewing(const RawSystem& raw, double rel_tol = 1e-12);

// Trace, determinant and a = a12*b2 - a22*b1 of each side, without the
// sewing gate.
CanonicalParams lienard_parameters(const RawSystem& raw);

// Throws SewingRejected when check_sewing does not return Sewing.
CanonicalParams reduce_to_lienard(const RawSystem& raw, double rel_tol = 1e-12);

} // namespace pwlcycle
