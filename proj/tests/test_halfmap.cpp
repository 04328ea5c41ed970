#include "pwlcycle/errors.hpp"
#include "pwlcycle/flow_oracle.hpp"
#include "pwlcycle/halfmap.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <numbers>

using namespace pwlcycle;
using Catch::Approx;
using testsupport::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

CrossingDirection direction(Side s) {
  return s == Side::LeftForward ? CrossingDirection::ForwardFromLeft
                                : CrossingDirection::BackwardFromRight;
}

} // namespace

TEST_CASE("existence gate and q constants", "[halfmap]") {
  const HalfMapSpec s1 = build_spec(1.0, 0.3, -2.0, Side::LeftForward);
  CHECK(s1.exists);
  CHECK(s1.q == 0.0);

  const HalfMapSpec s2 = build_spec(-1.0, -2.0, 2.0, Side::LeftForward);
  REQUIRE(s2.exists);
  CHECK(s2.q == Approx(-kPi).epsilon(1e-15));

  // Virtual saddle on the right.
  const HalfMapSpec s3 = build_spec(1.0, -2.0 / 7.0, -1.0, Side::RightBackward);
  CHECK_FALSE(s3.exists);
  CHECK_THROWS_AS(require_exists(s3), NotDefined);
  CHECK_THROWS_AS(eval(s3, 1.0), NotDefined);

  // a = 0 focus: half of the a < 0 value.
  const HalfMapSpec s4 = build_spec(0.0, 0.5, 1.0, Side::LeftForward);
  REQUIRE(s4.exists);
  CHECK(s4.q == Approx(kPi * 0.5 / std::sqrt(3.75)).epsilon(1e-15));

  // Right side mirrors (a, T) -> (-a, -T).
  const HalfMapSpec r = build_spec(1.0, 2.0, 2.0, Side::RightBackward);
  REQUIRE(r.exists);
  CHECK(r.q == Approx(-kPi).epsilon(1e-15));
  CHECK_FALSE(build_spec(-1.0, 0.0, -1.0, Side::LeftForward).exists);
  CHECK(build_spec(-1.0, 0.0, -1.0, Side::RightBackward).exists);
}

TEST_CASE("saddle domain endpoint is the positive root of W", "[halfmap]") {
  const HalfMapSpec s = build_spec(6.0 / 5.0, 1.0, -1.0, Side::LeftForward);
  REQUIRE(s.exists);
  CHECK(s.domain.lo == 0.0);
  CHECK(s.domain.hi == Approx(0.6 * (std::sqrt(5.0) - 1.0)).epsilon(1e-14));
  CHECK(std::abs(s.domain.hi - 0.6 * (std::sqrt(5.0) - 1.0)) <= 1e-12);
  CHECK(s.W(s.domain.hi) == Approx(0.0).margin(1e-14));
  CHECK(s.image_lo == Approx(-0.6 * (std::sqrt(5.0) + 1.0)).epsilon(1e-14));
}

TEST_CASE("domain and image endpoints by case", "[halfmap]") {
  // a < 0, focus, T < 0: lambda > 0 with y(lambda) = 0.
  const HalfMapSpec s = build_spec(-0.5, -0.1, 1.0, Side::LeftForward);
  REQUIRE(s.exists);
  CHECK(s.domain.lo > 0.0);
  CHECK(s.image_hi == 0.0);
  CHECK(pv_integral(s, 0.0, s.domain.lo) == Approx(s.q).margin(1e-13));
  CHECK(eval(s, s.domain.lo).y1 == 0.0);
  CHECK_THROWS_AS(eval(s, 0.5 * s.domain.lo), DomainError);

  // a < 0, focus, T > 0: image_hi < 0, domain starts at 0.
  const HalfMapSpec t = build_spec(-0.5, 0.1, 1.0, Side::LeftForward);
  REQUIRE(t.exists);
  CHECK(t.domain.lo == 0.0);
  CHECK(t.image_hi < 0.0);
  CHECK(eval(t, 0.0).y1 == t.image_hi);
  const auto orc = oracle_half_map({-0.5, 0.1, 1.0}, 1e-300, CrossingDirection::ForwardFromLeft);
  REQUIRE(orc);
  CHECK(*orc == Approx(t.image_hi).epsilon(1e-9));

  // W > 0 on the hull of domain and image, away from 0.
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const double a = rng.uniform(-2, 2), T = rng.uniform(-2, 2), D = rng.uniform(-2, 3);
    const Side side = rng.coin() ? Side::LeftForward : Side::RightBackward;
    const HalfMapSpec h = build_spec(a, T, D, side);
    if (!h.exists) {
      continue;
    }
    CHECK(h.W(0.0) == a * a);
    const double lo = std::isfinite(h.image_lo) ? h.image_lo : -1e3;
    const double hi = h.domain.bounded() ? h.domain.hi : 1e3;
    for (int k = 1; k < 50; ++k) {
      const double y = lo + (hi - lo) * k / 50.0;
      if (y != 0.0) {
        CHECK(h.W(y) > 0.0);
      }
    }
  }
}

TEST_CASE("principal value integral", "[halfmap]") {
  const HalfMapSpec centre = build_spec(0.0, 0.0, 1.0, Side::LeftForward);
  for (double c : {0.1, 1.0, 17.0}) {
    CHECK(pv_integral(centre, -c, c) == Approx(0.0).margin(1e-15));
  }
  const HalfMapSpec even = build_spec(-0.5, 0.0, 1.0, Side::LeftForward);
  for (double c : {0.3, 2.0}) {
    CHECK(pv_integral(even, -c, c) == Approx(0.0).margin(1e-15));
  }

  const HalfMapSpec s = build_spec(1.0, 0.5, 1.0, Side::LeftForward);
  const double want = testsupport::quad_integral(1.0, 0.5, 1.0, -0.1, 0.1);
  CHECK(std::abs(pv_integral(s, -0.1, 0.1) - want) <= 1e-12);

  // a = 0: -(1/D) ln(y0/|y1|).
  const HalfMapSpec h = build_spec(0.0, 0.7, 2.0, Side::LeftForward);
  CHECK(pv_integral(h, -3.0, 1.5) == Approx(-std::log(0.5) / 2.0).epsilon(1e-14));

  const HalfMapSpec saddle = build_spec(6.0 / 5.0, 1.0, -1.0, Side::LeftForward);
  CHECK_THROWS_AS(pv_integral(saddle, -0.1, 2.0), DomainError);
}

TEST_CASE("closed form matches quadrature on random ranges", "[halfmap]") {
  Rng rng(17);
  int checked = 0;
  while (checked < 300) {
    const double a = rng.uniform(-2, 2), T = rng.uniform(-2, 2), D = rng.uniform(-2, 3);
    if (std::abs(a) < 0.05) {
      continue;
    }
    const double rp = detail::smallest_positive_root(a, T, D);
    const double rn = detail::largest_negative_root(a, T, D);
    const double y0 = std::min(rng.uniform(0.0, 5.0), 0.9 * rp);
    const double y1 = std::max(-rng.uniform(0.0, 5.0), 0.9 * rn);
    const HalfMapSpec s = build_spec(a, T, D, Side::LeftForward);
    const double got = pv_integral(s, y1, y0);
    const double want = testsupport::quad_integral(a, T, D, y1, y0);
    CHECK(std::abs(got - want) <= 1e-11 * (1.0 + std::abs(want)));
    ++checked;
  }
}

TEST_CASE("closed form across the discriminant and D = 0 branches", "[halfmap]") {
  // 4D = T^2 exactly, nearby on both sides, and D = 0. Ranges stay clear of
  // the roots of W (near -1 and -1.25).
  for (double D : {1.0, 1.0 + 1e-11, 1.0 - 1e-11, 1.0 + 1e-6, 1.0 - 1e-6}) {
    const double got = detail::integral_closed_form(-1.0, 2.0, D, -0.6, 3.0);
    const double want = testsupport::quad_integral(-1.0, 2.0, D, -0.6, 3.0);
    CHECK(std::abs(got - want) <= 1e-11 * (1.0 + std::abs(want)));
  }
  for (double D : {0.0, 1e-14, -1e-14, 1e-9}) {
    const double got = detail::integral_closed_form(1.0, -0.8, D, -1.0, 2.5);
    const double want = testsupport::quad_integral(1.0, -0.8, D, -1.0, 2.5);
    CHECK(std::abs(got - want) <= 1e-11 * (1.0 + std::abs(want)));
  }
  // W constant.
  CHECK(detail::integral_closed_form(2.0, 0.0, 0.0, -1.0, 3.0) ==
        Approx(-(9.0 - 1.0) / 8.0).epsilon(1e-14));
}

TEST_CASE("eval examples", "[halfmap]") {
  const HalfMapSpec s = build_spec(-0.5, 0.0, 1.0, Side::LeftForward);
  CHECK(eval(s, 1.0).y1 == Approx(-1.0).epsilon(1e-13));

  const HalfMapSpec z = build_spec(0.5, 0.5, 1.0, Side::LeftForward);
  CHECK(eval(z, 0.0).y1 == 0.0);

  const HalfMapSpec f = build_spec(-0.5, -0.1, 1.0, Side::LeftForward);
  const HalfMapEval e = eval(f, 1.0);
  const auto o = oracle_half_map({-0.5, -0.1, 1.0}, 1.0, CrossingDirection::ForwardFromLeft);
  REQUIRE(o);
  CHECK(std::abs(e.y1 - *o) <= 1e-8);
  CHECK(std::abs(e.residual) <= 1e-12);

  // Homogeneous side: linear map.
  const HalfMapSpec h = build_spec(0.0, 0.4, 1.0, Side::LeftForward);
  const double ratio = eval(h, 1.0).y1;
  CHECK(eval(h, 3.0).y1 == Approx(3.0 * ratio).epsilon(1e-14));
  CHECK(ratio == Approx(asymptotic_ratio(h)).epsilon(1e-13));
}

TEST_CASE("eval agrees with the flow oracle on random sides", "[halfmap]") {
  Rng rng(23);
  int sides = 0;
  while (sides < 60) {
    const double a = rng.uniform(-2, 2), T = rng.uniform(-1, 1), D = rng.uniform(-1, 3);
    const Side side = rng.coin() ? Side::LeftForward : Side::RightBackward;
    const HalfMapSpec s = build_spec(a, T, D, side);
    if (!s.exists) {
      continue;
    }
    ++sides;
    for (int k = 0; k < 5; ++k) {
      const double y0 =
          testsupport::interior_point(s.domain, rng.uniform(0.01, 0.99), std::max(std::abs(a), 0.1));
      const double y1 = eval(s, y0).y1;
      const auto o = oracle_half_map({a, T, D}, y0, direction(side));
      REQUIRE(o);
      CHECK(std::abs(y1 - *o) <= 1e-8 * (1.0 + std::abs(y1)));
      CHECK(y1 < 0.0);
    }
  }
}

TEST_CASE("sign laws and monotonicity", "[halfmap]") {
  Rng rng(29);
  int sides = 0;
  while (sides < 200) {
    const double a = rng.uniform(-2, 2), T = rng.uniform(-1, 1), D = rng.uniform(-1, 3);
    const Side side = rng.coin() ? Side::LeftForward : Side::RightBackward;
    const HalfMapSpec s = build_spec(a, T, D, side);
    if (!s.exists) {
      continue;
    }
    ++sides;
    const int want = side == Side::LeftForward ? -testsupport::sign(T) : testsupport::sign(T);
    for (int k = 0; k < 5; ++k) {
      const double y0 =
          testsupport::interior_point(s.domain, rng.uniform(0.01, 0.99), std::max(std::abs(a), 0.1));
      const double y1 = eval(s, y0).y1;
      CHECK(testsupport::sign(y0 + y1) == want);
      CHECK(derivatives(s, y0, y1).d1 < 0.0);
    }
  }
}

TEST_CASE("graph of the half-map is an orbit of the cubic field", "[halfmap]") {
  const HalfMapSpec s = build_spec(-0.5, -0.1, 1.0, Side::LeftForward);
  const double h = 1e-3;
  for (double y0 : {0.7, 1.0, 2.0, 5.0}) {
    const double ya = eval(s, y0).y1;
    const double yb = eval(s, y0 + h).y1;
    const double ym0 = y0 + 0.5 * h;
    const double ym1 = 0.5 * (ya + yb);
    // Field X = -(y1 W(y0), y0 W(y1)) at the secant midpoint.
    const double fx = -ym1 * s.W(ym0);
    const double fy = -ym0 * s.W(ym1);
    const double cross = h * fy - (yb - ya) * fx;
    const double scale = h * std::hypot(fx, fy);
    CHECK(std::abs(cross) / scale <= 1e-5);
  }
}

TEST_CASE("derivative formulas", "[halfmap]") {
  const HalfMapSpec even = build_spec(-0.5, 0.0, 1.0, Side::LeftForward);
  const HalfMapDerivatives d0 = derivatives(even, 1.3, eval(even, 1.3).y1);
  CHECK(d0.d1 == Approx(-1.0).epsilon(1e-12));
  CHECK(d0.d2 == Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(derivatives(even, 1.0, 0.0), DomainError);

  const HalfMapSpec s = build_spec(-0.5, -0.1, 1.0, Side::LeftForward);
  auto g = [&](double y) { return eval(s, y).y1; };
  const HalfMapDerivatives d = derivatives(s, 1.0, g(1.0));
  CHECK(testsupport::rel_err(d.d1, testsupport::richardson_d1(g, 1.0, 1e-3)) <= 1e-6);
  CHECK(testsupport::rel_err(d.d2, testsupport::richardson_d2(g, 1.0, 1e-2)) <= 1e-6);

  // Right side uses the same expressions.
  const HalfMapSpec r = build_spec(-1.0, -0.5, 0.5, Side::RightBackward);
  auto gr = [&](double y) { return eval(r, y).y1; };
  const HalfMapDerivatives dr = derivatives(r, 1.0, gr(1.0));
  CHECK(testsupport::rel_err(dr.d1, testsupport::richardson_d1(gr, 1.0, 1e-3)) <= 1e-6);
  CHECK(testsupport::rel_err(dr.d2, testsupport::richardson_d2(gr, 1.0, 1e-2)) <= 1e-6);
}

TEST_CASE("Taylor coefficient at the origin", "[halfmap]") {
  const HalfMapSpec s = build_spec(0.5, 0.5, 1.0, Side::LeftForward);
  CHECK(taylor_quadratic_coeff(s) == Approx(-2.0 / 3.0).epsilon(1e-15));
  CHECK(taylor_quadratic_coeff(build_spec(0.5, 0.0, 1.0, Side::LeftForward)) == 0.0);
  CHECK_THROWS_AS(taylor_quadratic_coeff(build_spec(-0.5, 0.1, 1.0, Side::LeftForward)),
                  PreconditionError);

  // Least-squares fit of y + y0 on y0^2, y0^3, y0^4.
  const double c = taylor_quadratic_coeff(s);
  Eigen::MatrixXd A(10, 3);
  Eigen::VectorXd rhs(10);
  for (int k = 0; k < 10; ++k) {
    const double y0 = 1e-3 * (k + 1);
    A(k, 0) = y0 * y0;
    A(k, 1) = y0 * y0 * y0;
    A(k, 2) = y0 * y0 * y0 * y0;
    rhs(k) = eval(s, y0).y1 + y0;
  }
  const double fitted = A.colPivHouseholderQr().solve(rhs)(0);
  CHECK(testsupport::rel_err(fitted, c) <= 1e-4);
}

TEST_CASE("asymptotic ratio", "[halfmap]") {
  CHECK(asymptotic_ratio(build_spec(0.3, 0.0, 1.0, Side::LeftForward)) == Approx(-1.0));
  const HalfMapSpec f = build_spec(-0.5, -0.1, 1.0, Side::LeftForward);
  const double r = asymptotic_ratio(f);
  CHECK(r == Approx(-std::exp(-kPi / (10.0 * std::sqrt(3.99)))).epsilon(1e-14));
  CHECK(r == Approx(-0.8544679).margin(1e-6));
  CHECK(std::abs(eval(f, 1e6).y1 / 1e6 - r) <= 1e-2);

  const HalfMapSpec g = build_spec(0.5, 0.5, 1.0, Side::LeftForward);
  CHECK(asymptotic_ratio(g) == Approx(-std::exp(kPi / (2.0 * std::sqrt(3.75)))).epsilon(1e-14));
  CHECK_THROWS_AS(asymptotic_ratio(build_spec(0.5, 3.0, 1.0, Side::LeftForward)), NotApplicable);

  // Right side: y0 / y_R(y0).
  const HalfMapSpec r2 = build_spec(0.4, 0.3, 1.5, Side::RightBackward);
  CHECK(std::abs(1e6 / eval(r2, 1e6).y1 - asymptotic_ratio(r2)) <= 1e-2);
}

TEST_CASE("parameter sensitivities", "[halfmap]") {
  // dy/dT with a > 0 on the left is negative.
  const HalfMapSpec s = build_spec(0.8, 0.4, 1.2, Side::LeftForward);
  const double y0 = 1.1;
  const double y1 = eval(s, y0).y1;
  const double sT = sensitivity(s, y0, y1, Sensitivity::WrtT);
  CHECK(sT < 0.0);
  auto gT = [&](double T) { return eval(build_spec(0.8, T, 1.2, Side::LeftForward), y0).y1; };
  CHECK(testsupport::rel_err(sT, testsupport::richardson_d1(gT, 0.4, 1e-3)) <= 1e-5);

  // dy/da with a < 0, focus: sign(T y0 y1 - a (y0 + y1)) = -sign(T).
  const HalfMapSpec f = build_spec(-0.5, -0.1, 1.0, Side::LeftForward);
  const double fy1 = eval(f, 1.0).y1;
  const double sA = sensitivity(f, 1.0, fy1, Sensitivity::WrtA);
  CHECK(testsupport::sign(-0.1 * 1.0 * fy1 + 0.5 * (1.0 + fy1)) == 1);
  auto gA = [&](double a) { return eval(build_spec(a, -0.1, 1.0, Side::LeftForward), 1.0).y1; };
  CHECK(testsupport::rel_err(sA, testsupport::richardson_d1(gA, -0.5, 1e-3)) <= 1e-5);

  CHECK_THROWS_AS(sensitivity(f, 1.0, fy1, Sensitivity::WrtT), PreconditionError);
  CHECK_THROWS_AS(sensitivity(s, y0, y1, Sensitivity::WrtA), PreconditionError);
}
