#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eal/systems.hpp"
#include "test_helpers.hpp"

using namespace eal;
using namespace test_helpers;
using systems::Angle;
using systems::Complex;
using systems::Observable;
using systems::PointState;
using systems::SystemSpec;
using systems::TrigPoly;

namespace {

SystemSpec rotation_rational(std::int64_t p, std::int64_t q) {
  return SystemSpec(systems::CircleRotation{Angle::rational(p, q)});
}

SystemSpec rotation_named(const std::string& name) {
  return SystemSpec(systems::CircleRotation{Angle::named(name)});
}

}  // namespace

TEST_CASE("named constants agree with long double expansions") {
  CHECK(std::abs(static_cast<long double>(dd_e().hi) + dd_e().lo -
                 std::exp(1.0L)) < 1e-18L);
  CHECK(std::abs(static_cast<long double>(dd_pi().hi) + dd_pi().lo -
                 3.14159265358979323846L) < 1e-18L);
  DD s2 = dd_sqrt_int(2);
  CHECK(std::abs(static_cast<long double>(s2.hi) + s2.lo - std::sqrt(2.0L)) < 1e-18L);
}

TEST_CASE("rotation powers are exact") {
  PointState x = PointState::circle(0.1);
  PointState y = systems::apply_power(rotation_rational(1, 4), 6, x);
  CHECK(y.x == doctest::Approx(0.6).epsilon(1e-15));

  SystemSpec cyc(systems::FiniteCycle{5});
  PointState c = systems::apply_power(cyc, -7, PointState::cycle(3));
  CHECK(c.n == 1);
}

TEST_CASE("huge rotation powers match the 128-bit fixed-point oracle") {
  Angle theta = Angle::irrational(dd_add(dd_sqrt_int(2), -1.0));
  PointState x = PointState::circle(0.0);
  SystemSpec rot(systems::CircleRotation{theta});
  for (std::int64_t k : {std::int64_t{1000000}, std::int64_t{999999937},
                         std::int64_t{123456789}}) {
    double got = systems::apply_power(rot, k, x).x;
    double want = frac_mul_oracle(theta.value(), k);
    INFO("k=" << k);
    CHECK(std::abs(got - want) <= 1e-9);
  }
}

TEST_CASE("group law holds to 1e-12 per composition") {
  SystemSpec rot = rotation_named("sqrt2");
  SystemSpec cyc(systems::FiniteCycle{7});
  std::vector<std::pair<std::int64_t, std::int64_t>> cases = {
      {3, 11}, {-5, 9}, {1000, -999}, {123456, 654321}};
  for (auto [j, k] : cases) {
    PointState a = systems::apply_power(rot, j, systems::apply_power(rot, k,
                                        PointState::circle(0.3)));
    PointState b = systems::apply_power(rot, j + k, PointState::circle(0.3));
    double d = std::abs(a.x - b.x);
    d = std::min(d, 1.0 - d);
    CHECK(d <= 2e-12);
    PointState ca = systems::apply_power(cyc, j, systems::apply_power(cyc, k,
                                         PointState::cycle(2)));
    CHECK(ca.n == systems::apply_power(cyc, j + k, PointState::cycle(2)).n);
  }
}

TEST_CASE("space averages are exact") {
  TrigPoly p(2);
  p.c(0) = {0.3, 0.0};
  p.c(1) = {0.5, -0.25};
  CHECK(systems::space_average(rotation_named("sqrt2"), Observable(p)) ==
        Complex{0.3, 0.0});

  systems::IndicatorInterval ind{0.0, 1.0 / 3.0};
  CHECK(systems::space_average(rotation_named("sqrt2"), Observable(ind)).real() ==
        doctest::Approx(1.0 / 3.0));

  systems::ProductSystem prod;
  prod.factors.push_back(rotation_named("sqrt2"));
  prod.factors.push_back(rotation_named("sqrt3"));
  systems::TensorProductObs tens;
  tens.factors.push_back(Observable(TrigPoly::constant({0.5, 0.0})));
  tens.factors.push_back(Observable(TrigPoly::constant({0.25, 0.0})));
  CHECK(systems::space_average(SystemSpec(prod), Observable(tens)).real() ==
        doctest::Approx(0.125));
}

TEST_CASE("measure preservation: indicators keep their mass under shifts") {
  SystemSpec rot = rotation_named("golden");
  systems::IndicatorInterval ind{0.8, 0.3};  // wraps around
  for (std::int64_t k : {1, -3, 1000, 999999}) {
    Observable shifted = systems::shift_observable(rot, k, Observable(ind));
    CHECK(systems::space_average(rot, shifted).real() == doctest::Approx(0.3));
  }
}

TEST_CASE("conditional expectations on rotations") {
  // theta = 1/2 kills mode 1, keeps mode 2
  SystemSpec half = rotation_rational(1, 2);
  Observable e1(TrigPoly::mode(1));
  Observable e2(TrigPoly::mode(2));
  const auto p1 = std::get<TrigPoly>(systems::cond_exp_invariant(half, e1).v);
  CHECK(p1.c(1) == Complex{0.0, 0.0});
  const auto p2 = std::get<TrigPoly>(systems::cond_exp_invariant(half, e2).v);
  CHECK(p2.c(2) == Complex{1.0, 0.0});

  // irrational rotation: only the mean survives
  TrigPoly mix(3);
  mix.c(0) = {0.4, 0.1};
  mix.c(1) = {1.0, 0.0};
  mix.c(-3) = {0.0, 2.0};
  const auto pc = std::get<TrigPoly>(
      systems::cond_exp_invariant(rotation_named("sqrt2"), Observable(mix)).v);
  CHECK(pc.c(0) == Complex{0.4, 0.1});
  CHECK(pc.c(1) == Complex{0.0, 0.0});
  CHECK(pc.c(-3) == Complex{0.0, 0.0});

  // an indicator under an ergodic rotation projects onto its mass
  const auto pi = std::get<TrigPoly>(
      systems::cond_exp_invariant(rotation_named("sqrt2"),
                                  Observable(systems::IndicatorInterval{0.1, 0.25})).v);
  CHECK(pi.c(0) == Complex{0.25, 0.0});
}

TEST_CASE("conditional expectation is an averaging projection") {
  SystemSpec sys = rotation_rational(2, 6);  // reduces to 1/3
  TrigPoly mix(4);
  mix.c(0) = {0.2, 0.0};
  mix.c(3) = {0.7, 0.3};
  mix.c(1) = {1.0, -1.0};
  mix.c(-4) = {0.5, 0.5};
  Observable f(mix);
  Observable once = systems::cond_exp_invariant(sys, f);
  Observable twice = systems::cond_exp_invariant(sys, once);
  const auto& a = std::get<TrigPoly>(once.v);
  const auto& b = std::get<TrigPoly>(twice.v);
  for (int m = -4; m <= 4; ++m) CHECK(a.c(m) == b.c(m));
  // mean is preserved
  CHECK(systems::space_average(sys, once) == systems::space_average(sys, f));
  // modes divisible by 3 survive, others die
  CHECK(a.c(3) == mix.c(3));
  CHECK(a.c(1) == Complex{0.0, 0.0});
}

TEST_CASE("conditional expectation under powers of the map") {
  Observable f(TrigPoly::mode(1, {0.8, 0.1}));
  // theta = 1/3, p = 3: the cube is the identity, everything is invariant
  Observable same = systems::cond_exp_power(rotation_rational(1, 3), 3, f);
  CHECK(std::get<TrigPoly>(same.v).c(1) == Complex{0.8, 0.1});
  // theta = 1/4, p = 2: rotation by 1/2 keeps even modes
  TrigPoly mix(2);
  mix.c(1) = {1.0, 0.0};
  mix.c(2) = {0.5, 0.0};
  const auto kept = std::get<TrigPoly>(
      systems::cond_exp_power(rotation_rational(1, 4), 2, Observable(mix)).v);
  CHECK(kept.c(1) == Complex{0.0, 0.0});
  CHECK(kept.c(2) == Complex{0.5, 0.0});
  // irrational theta, p = 2: still uniquely ergodic
  const auto erg = std::get<TrigPoly>(
      systems::cond_exp_power(rotation_named("sqrt2"), 2, Observable(mix)).v);
  CHECK(erg.c(1) == Complex{0.0, 0.0});
  CHECK(erg.c(2) == Complex{0.0, 0.0});
}

TEST_CASE("finite cycle conditional expectations") {
  SystemSpec cyc(systems::FiniteCycle{6});
  systems::Tabulated tab{{0, 1, 2, 3, 4, 5}};
  const auto flat = std::get<systems::Tabulated>(
      systems::cond_exp_invariant(cyc, Observable(tab)).v);
  for (double v : flat.values) CHECK(v == doctest::Approx(2.5));
  // shift by 2 on 6 points: orbits are the residues mod 2
  const auto orb = std::get<systems::Tabulated>(
      systems::cond_exp_power(cyc, 2, Observable(tab)).v);
  CHECK(orb.values[0] == doctest::Approx(2.0));  // mean of 0,2,4
  CHECK(orb.values[1] == doctest::Approx(3.0));  // mean of 1,3,5
}

TEST_CASE("eigenprojection picks matched modes") {
  DD gamma = dd_sqrt_int(2);
  SystemSpec rot(systems::CircleRotation{
      Angle::irrational(dd_div(DD(1.0), gamma))});
  TrigPoly f(5);
  for (int k = -5; k <= 5; ++k) f.c(k) = {1.0 + k * 0.1, -k * 0.05};

  // m = 3 keeps exactly mode 3 (brute-force over k confirms the match set)
  const auto p3 = std::get<TrigPoly>(systems::eigenprojection(rot, gamma, 3,
                                      Observable(f)).v);
  for (int k = -5; k <= 5; ++k) {
    DD diff = dd_sub(dd_mul(dd_div(DD(1.0), gamma), static_cast<double>(k)),
                     dd_div(DD(3.0), gamma));
    double fr = dd_frac(diff);
    bool matched = std::min(fr, 1.0 - fr) <= 1e-9;
    CHECK(matched == (k == 3));
    CHECK(p3.c(k) == (matched ? f.c(k) : Complex{0.0, 0.0}));
  }

  // m = 0 keeps the constant part only
  const auto p0 = std::get<TrigPoly>(systems::eigenprojection(rot, gamma, 0,
                                      Observable(f)).v);
  for (int k = -5; k <= 5; ++k)
    CHECK(p0.c(k) == (k == 0 ? f.c(0) : Complex{0.0, 0.0}));
}

TEST_CASE("eigenprojection on a rational rotation selects a residue class") {
  // theta = 1/4, gamma = 2, m = 1: k/4 = 1/2 mod 1 iff k = 2 mod 4
  SystemSpec rot = rotation_rational(1, 4);
  TrigPoly f(8);
  for (int k = -8; k <= 8; ++k) f.c(k) = {1.0, 0.0};
  const auto p = std::get<TrigPoly>(systems::eigenprojection(rot, DD(2.0), 1,
                                     Observable(f)).v);
  for (int k = -8; k <= 8; ++k) {
    bool want = ((k % 4) + 4) % 4 == 2;
    CHECK(p.c(k) == (want ? Complex{1.0, 0.0} : Complex{0.0, 0.0}));
  }
}

TEST_CASE("eigenprojections partition the matched modes") {
  DD gamma = dd_sqrt_int(2);
  SystemSpec rot(systems::CircleRotation{Angle::irrational(dd_div(DD(1.0), gamma))});
  TrigPoly f(4);
  for (int k = -4; k <= 4; ++k) f.c(k) = {1.0, 0.0};
  TrigPoly sum(4);
  for (std::int64_t m = -4; m <= 4; ++m) {
    const auto pm = std::get<TrigPoly>(systems::eigenprojection(rot, gamma, m,
                                        Observable(f)).v);
    for (int k = -4; k <= 4; ++k) {
      if (pm.c(k) != Complex{0.0, 0.0}) {
        // no double counting across m classes
        CHECK(sum.c(k) == Complex{0.0, 0.0});
        sum.c(k) += pm.c(k);
      }
    }
  }
  for (int k = -4; k <= 4; ++k) CHECK(sum.c(k) == f.c(k));
}

TEST_CASE("suspension stepping") {
  SystemSpec base(systems::CircleRotation{Angle::irrational(DD(0.3))});
  PointState s = PointState::susp(0.7, PointState::circle(0.2));
  PointState s1 = systems::suspension_step(base, DD(0.5), s);
  CHECK(s1.t.to_double() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(s1.parts[0].x == doctest::Approx(0.5).epsilon(1e-12));

  // integer gamma: time coordinate fixed, base advances by gamma
  PointState s2 = systems::suspension_step(base, DD(3.0), s);
  CHECK(s2.t.to_double() == doctest::Approx(0.7));
  CHECK(s2.parts[0].x == doctest::Approx(std::fmod(0.2 + 3 * 0.3, 1.0)).epsilon(1e-12));
}

TEST_CASE("iterated suspension steps follow the closed form") {
  DD gamma = dd_sqrt_int(2);
  DD ell(0.3);
  SystemSpec base = rotation_named("sqrt3");
  const systems::Angle& theta =
      std::get<systems::CircleRotation>(base.v).angle;
  double x0 = 0.37;
  std::int64_t ell_floor = dd_floor(ell);
  PointState s = PointState::susp(dd_frac(ell),
                                  systems::apply_power(base, ell_floor,
                                                       PointState::circle(x0)));
  SystemSpec susp(systems::Suspension{std::make_shared<SystemSpec>(base), gamma});
  for (std::int64_t n = 1; n <= 10000; ++n) {
    s = systems::suspension_step(base, gamma, s);
    DD lin = dd_add(dd_mul(gamma, static_cast<double>(n)), ell);
    double t_want = dd_frac(lin);
    double x_want = std::fmod(x0 + theta.frac_times(dd_floor(lin)), 1.0);
    double dt = std::abs(s.t.to_double() - t_want);
    double dx = std::abs(s.parts[0].x - x_want);
    dx = std::min(dx, 1.0 - dx);
    REQUIRE(dt <= 1e-9);
    REQUIRE(dx <= 1e-9);
    if (n == 1000) {
      // the one-shot power matches the step-by-step orbit
      PointState direct = systems::apply_power(
          susp, n,
          PointState::susp(dd_frac(ell), systems::apply_power(base, ell_floor,
                                                              PointState::circle(x0))));
      CHECK(std::abs(direct.t.to_double() - s.t.to_double()) <= 1e-9);
    }
  }
}

TEST_CASE("high modes evaluate at machine precision") {
  for (int m : {-64, -17, 33, 64}) {
    TrigPoly f = TrigPoly::mode(m, {1.0, 0.0});
    for (double x : {0.1, 0.37, 0.925}) {
      Complex got = f.eval(x);
      double frac = m * x - std::floor(m * x);
      Complex want = std::polar(1.0, 2 * std::numbers::pi * frac);
      CHECK(std::abs(got - want) <= 1e-13);
    }
  }
}

TEST_CASE("lifted observables ignore the time coordinate") {
  Observable f(TrigPoly::mode(1));
  Observable lifted = systems::lift_observable(f);
  PointState a = PointState::susp(0.1, PointState::circle(0.25));
  PointState b = PointState::susp(0.9, PointState::circle(0.25));
  CHECK(lifted.eval(a) == lifted.eval(b));
  CHECK(lifted.eval(a) == f.eval(PointState::circle(0.25)));
  PointState c = PointState::susp(0.5, PointState::circle(0.75));
  CHECK(lifted.eval(c) == f.eval(PointState::circle(0.75)));
}
