#pragma once

#include "pwlcycle/canonical.hpp"
#include "pwlcycle/halfmap.hpp"
#include "pwlcycle/tolerances.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pwlcycle {

struct CycleInvariants {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double xi = 0.0;
  double c_inf = 0.0;
  // T_L/sqrt(4D_L - T_L^2) + T_R/sqrt(4D_R - T_R^2); NaN unless both sides
  // have complex eigenvalues.
  double mu = 0.0;

  // Zero set of F(y0, y1) = c0 + c1 y0 y1 + c2 (y0 + y1).
  std::optional<std::pair<double, double>> gamma_center;
  std::optional<double> gamma_asymptote;
  std::optional<double> gamma_bisector_point;

  // Relative residuals of the two linear relations between the coefficients.
  double identity_residual_1 = 0.0;
  double identity_residual_2 = 0.0;
};

CycleInvariants invariants(const CanonicalParams& p);

// c0 + c1 y0 y1 + c2 (y0 + y1)
double F_value(const CycleInvariants& inv, double y0, double y1);

// Both half-maps of one system and the interval I on which the displacement
// y_R - y_L is defined.
class Displacement {
public:
  explicit Displacement(const CanonicalParams& p, const Tolerances& tol = {});

  bool defined() const { return left_.exists && right_.exists && interval_.lo < interval_.hi; }
  const HalfMapSpec& left() const { return left_; }
  const HalfMapSpec& right() const { return right_; }
  const Interval& interval() const { return interval_; }

  // (y_L(y0), y_R(y0)). Throws NotDefined / DomainError.
  std::pair<double, double> images(double y0) const;
  double operator()(double y0) const;

  // y_R'(y0) - y_L'(y0) at an interior point.
  double derivative(double y0) const;

private:
  HalfMapSpec left_;
  HalfMapSpec right_;
  Interval interval_;
};

double displacement(const CanonicalParams& p, double y0, const Tolerances& tol = {});

int delta_prime_sign(const CanonicalParams& p, double y0, double y1);

// Throws UniquenessViolation when the two expressions disagree.
int delta_second_sign(const CanonicalParams& p, double y0, double y1);

enum class Stability { Attracting, Repelling };

const char* to_string(Stability s);

struct LimitCycleReport {
  double y0_star = 0.0;
  double y1_star = 0.0;
  double delta_prime = 0.0;
  Stability stability = Stability::Attracting;
  double period = 0.0;           // NaN when the oracle orbit does not close
  double oracle_residual = 0.0;  // +inf when the oracle orbit does not close
};

enum class CycleStatus { NotApplicable, NoCycle, Cycle, NonIsolated, Indeterminate };

const char* to_string(CycleStatus s);

struct CycleSearch {
  CycleStatus status = CycleStatus::NotApplicable;
  std::optional<LimitCycleReport> cycle;
  // Zeros of the displacement found in the interior of I.
  std::vector<double> zeros;
  double scan_lo = 0.0;
  double scan_hi = 0.0;
  std::size_t evaluations = 0;
  std::string note;
};

// Full zero scan of the displacement function. Throws UniquenessViolation
// when more than one simple zero survives, or when the stability cross-checks
// disagree.
CycleSearch search_limit_cycle(const CanonicalParams& p, const Tolerances& tol = {});

std::optional<LimitCycleReport> find_limit_cycle(const CanonicalParams& p,
                                                 const Tolerances& tol = {});

enum class Contraction { Contracting, Expanding, Inconclusive };

const char* to_string(Contraction c);

// Compares the oracle return map P near y0*: |P(y0* +- eps) - y0*| < eps on
// both sides means contracting. Falls back to smaller eps when the two sides
// disagree.
Contraction oracle_contraction(const CanonicalParams& p, double y0_star,
                               const Tolerances& tol = {});

std::array<bool, 3> necessary_conditions(const CanonicalParams& p);

enum class OriginClass {
  NotMonodromic,
  MonodromicAttracting,
  MonodromicRepelling,
  MonodromicUndetermined
};

const char* to_string(OriginClass c);

bool origin_monodromic(const CanonicalParams& p);
OriginClass classify_origin(const CanonicalParams& p);

enum class InfinityClass { NotMonodromic, Attracting, Repelling, Undetermined };

const char* to_string(InfinityClass c);

struct InfinityVerdict {
  InfinityClass cls = InfinityClass::NotMonodromic;
  // sign(mu) != sign(c_inf) although T_L T_R < 0 with both traces nonzero.
  bool c_inf_discrepancy = false;
};

InfinityVerdict classify_infinity(const CanonicalParams& p);

struct SingularityCensus {
  bool origin = false;
  // Real equilibria that are foci or centers.
  bool left_equilibrium = false;
  bool right_equilibrium = false;

  int count() const { return int(origin) + int(left_equilibrium) + int(right_equilibrium); }
};

SingularityCensus monodromic_singularities(const CanonicalParams& p);

bool existence_sufficient(const CanonicalParams& p, const Tolerances& tol = {});

struct AnalysisReport {
  SewingVerdict sewing;
  CanonicalParams params;
  HalfMapSpec left;
  HalfMapSpec right;
  CycleInvariants inv;
  std::array<bool, 3> necessary{};
  bool sufficient = false;
  OriginClass origin = OriginClass::NotMonodromic;
  InfinityVerdict infinity;
  CycleSearch search;
};

AnalysisReport analyze(const CanonicalParams& p, const Tolerances& tol = {});

// Throws SewingRejected for non-sewing input.
AnalysisReport analyze(const RawSystem& raw, const Tolerances& tol = {});

} // namespace pwlcycle
