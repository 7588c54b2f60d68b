// Acceptance suite: one pass/fail line per criterion, full problem sizes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <set>
#include <vector>

#include "eal/config.hpp"
#include "eal/funclass.hpp"
#include "eal/limits.hpp"
#include "eal/runner.hpp"

using namespace eal;
using engine::ExperimentSpec;
using engine::IterateSequence;
using engine::Track;
using systems::Angle;
using systems::Complex;
using systems::Observable;
using systems::PointState;
using systems::SystemSpec;
using systems::TrigPoly;

namespace {

int failures = 0;

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int id, const char* name, bool pass, double seconds, const char* detail) {
  std::printf("[%s] criterion %d: %-34s %7.1fs  %s\n", pass ? "PASS" : "FAIL", id, name,
              seconds, detail);
  if (!pass) ++failures;
}

Track rotation_track(const char* angle, int mode, double start, IterateSequence it) {
  Track t;
  t.system = SystemSpec(systems::CircleRotation{Angle::named(angle)});
  t.observable = Observable(TrigPoly::mode(mode));
  t.start = PointState::circle(start);
  t.iterate = std::move(it);
  return t;
}

Complex e_at(double x) { return std::polar(1.0, 2 * std::numbers::pi * x); }

std::string config_path(const char* name) {
  return std::string(EAL_SOURCE_DIR) + "/tests/configs/" + name;
}

// ---------------------------------------------------------------- 1

void criterion1() {
  Stopwatch sw;
  config::SplitMix64 stream(0x00c0ffee);
  int decreasing = 0;
  bool final_ok = true;
  for (int run = 0; run < 16; ++run) {
    ExperimentSpec spec;
    spec.tracks.push_back(
        rotation_track("sqrt2", 1, stream.next_unit(), IterateSequence::power(0.9)));
    spec.tracks.push_back(
        rotation_track("sqrt3", 1, stream.next_unit(), IterateSequence::power(0.5)));
    spec.checkpoints = {10000, 100000, 1000000};
    spec.validate();
    engine::AverageTrace tr = engine::trace(spec);
    double a0 = std::abs(tr.values[0]);
    double a1 = std::abs(tr.values[1]);
    double a2 = std::abs(tr.values[2]);
    if (a2 < a1 && a1 < a0) ++decreasing;
    if (a2 > 0.1) final_ok = false;
  }
  char detail[160];
  std::snprintf(detail, sizeof detail, "decreasing %d/16, all finals <= 0.1: %s",
                decreasing, final_ok ? "yes" : "no");
  report(1, "two sublinear powers vanish", decreasing >= 14 && final_ok && sw.seconds() <= 60.0,
         sw.seconds(), detail);
}

// ---------------------------------------------------------------- 2

void criterion2() {
  Stopwatch sw;
  config::json cfg = config::load_config_file(config_path("linear_irrational.toml"));
  DD gamma = config::resolve_real(cfg.at("gamma"));
  DD ell = config::resolve_real(cfg.at("ell"));
  double x = cfg.at("x").get<double>();
  auto N = cfg.at("n").get<std::int64_t>();
  Observable fobs = config::build_observable(cfg.at("f"));
  const auto& f = std::get<TrigPoly>(fobs.v);

  ExperimentSpec spec;
  Track t;
  t.system = SystemSpec(systems::CircleRotation{Angle::irrational(dd_div(DD(1.0), gamma))});
  t.observable = fobs;
  t.start = PointState::circle(x);
  t.iterate = IterateSequence::linear_irrational(gamma, ell);
  spec.tracks.push_back(std::move(t));

  limits::LimitPrediction pred = limits::predicted_limit_linear_irrational(spec);
  limits::WindowOracleResult oracle = limits::sliding_window_oracle(gamma, ell, f, x);
  double closed_forms = std::abs(pred.value - oracle.value);

  Complex a = engine::multiple_average(spec, N);
  double gap = std::abs(a - pred.value);

  char detail[160];
  std::snprintf(detail, sizeof detail,
                "|A - F| = %.2e (<= 0.02), closed forms differ %.1e (<= 1e-10)", gap,
                closed_forms);
  report(2, "irrational linear limit", gap <= 0.02 && closed_forms <= 1e-10 &&
                                           sw.seconds() <= 30.0,
         sw.seconds(), detail);
}

// ---------------------------------------------------------------- 3

void criterion3() {
  Stopwatch sw;
  config::SplitMix64 stream(0x5eed);
  double worst = 0.0;
  for (int run = 0; run < 8; ++run) {
    double x = stream.next_unit();
    ExperimentSpec spec;
    Track t;
    t.system = SystemSpec(systems::CircleRotation{Angle::rational(1, 3)});
    t.observable = Observable(TrigPoly::mode(1));
    t.start = PointState::circle(x);
    t.iterate = IterateSequence::linear_rational(3, 2, DD(0.0));
    spec.tracks.push_back(std::move(t));
    Complex want = 0.5 * (e_at(x) + e_at(x + 1.0 / 3.0));
    Complex a = engine::multiple_average(spec, 1000000);
    worst = std::max(worst, std::abs(a - want));
  }
  char detail[160];
  std::snprintf(detail, sizeof detail, "worst |A - prediction| = %.2e (<= 1e-3)", worst);
  report(3, "rational linear limit", worst <= 1e-3, sw.seconds(), detail);
}

// ---------------------------------------------------------------- 4

void criterion4() {
  Stopwatch sw;
  IterateSequence pair[] = {IterateSequence::power(0.7), IterateSequence::power(0.4)};
  engine::TermDecomposition small = engine::term_decomposition(pair, 10000);
  engine::TermDecomposition big = engine::term_decomposition(pair, 1000000);
  bool shrink = big.matched < small.matched && big.appearing < small.appearing &&
                big.disappearing < small.disappearing;

  ExperimentSpec spec;
  spec.tracks.push_back(rotation_track("sqrt2", 1, 0.2, IterateSequence::power(0.7)));
  spec.tracks.push_back(rotation_track("sqrt3", 1, 0.6, IterateSequence::power(0.4)));
  systems::TensorProductObs g;
  g.factors.push_back(Observable(TrigPoly::mode(1)));
  g.factors.push_back(Observable(TrigPoly::mode(1)));
  double defect = engine::invariance_defect(spec, 1000000, Observable(g));

  char detail[160];
  std::snprintf(detail, sizeof detail,
                "terms shrink: %s; defect(1e6) = %.3e (<= 0.05)", shrink ? "yes" : "no",
                defect);
  report(4, "occupancy decomposition decays", shrink && defect <= 0.05, sw.seconds(), detail);
}

// ---------------------------------------------------------------- 5

void criterion5() {
  Stopwatch sw;
  DD gamma = dd_sqrt_int(2);
  TrigPoly e1 = TrigPoly::mode(1);
  double x = 0.0;
  // oracle floor: difference of the two window integrals (shift by one is
  // the same window with ell raised by 1)
  limits::WindowOracleResult w0 = limits::sliding_window_oracle(gamma, DD(0.0), e1, x);
  limits::WindowOracleResult w1 = limits::sliding_window_oracle(gamma, DD(1.0), e1, x);
  double floor_value = std::abs(w0.value - w1.value);

  ExperimentSpec spec;
  Track t;
  t.system = SystemSpec(systems::CircleRotation{Angle::irrational(dd_div(DD(1.0), gamma))});
  t.observable = Observable(e1);
  t.start = PointState::circle(x);
  t.iterate = IterateSequence::linear_irrational(gamma, DD(0.0));
  spec.tracks.push_back(std::move(t));
  double defect = engine::invariance_defect(spec, 1000000, Observable(e1));

  char detail[160];
  std::snprintf(detail, sizeof detail, "defect %.4f > 0.5 x floor %.4f", defect,
                floor_value);
  report(5, "non-invariance counterexample", defect > 0.5 * floor_value && floor_value > 0.1,
         sw.seconds(), detail);
}

// ---------------------------------------------------------------- 6

void criterion6() {
  Stopwatch sw;
  DD gamma = dd_sqrt_int(2);
  DD ell(0.3);
  double x = 0.37;
  SystemSpec base(systems::CircleRotation{Angle::irrational(dd_div(DD(1.0), gamma))});
  TrigPoly f(2);
  f.c(0) = {0.2, 0.0};
  f.c(1) = {0.6, 0.1};
  f.c(-1) = {0.6, -0.1};
  f.c(2) = {0.15, 0.0};
  f.c(-2) = {0.15, 0.0};

  Observable fobs(f);
  Observable lifted = systems::lift_observable(fobs);

  ExperimentSpec direct;
  Track t;
  t.system = base;
  t.observable = fobs;
  t.start = PointState::circle(x);
  t.iterate = IterateSequence::linear_irrational(gamma, ell);
  direct.tracks.push_back(std::move(t));

  std::int64_t N = 1000000;
  std::int64_t ell_floor = dd_floor(ell);
  PointState s = PointState::susp(
      dd_frac(ell), systems::apply_power(base, ell_floor, PointState::circle(x)));
  double max_term_gap = 0.0;
  double sr = 0, cr = 0, si = 0, ci = 0;
  auto add = [](double& sum, double& comp, double y) {
    double yy = y - comp;
    double tt = sum + yy;
    comp = (tt - sum) - yy;
    sum = tt;
  };
  const IterateSequence& it = direct.tracks[0].iterate;
  for (std::int64_t n = 0; n < N; ++n) {
    Complex susp_term = lifted.eval(s);
    Complex direct_term =
        fobs.eval(systems::apply_power(base, it.floor_at(n), PointState::circle(x)));
    max_term_gap = std::max(max_term_gap, std::abs(susp_term - direct_term));
    add(sr, cr, susp_term.real());
    add(si, ci, susp_term.imag());
    s = systems::suspension_step(base, gamma, s);
  }
  Complex susp_avg{sr / static_cast<double>(N), si / static_cast<double>(N)};
  Complex direct_avg = engine::multiple_average(direct, N);
  Complex predicted = limits::suspension_limit(base, gamma, ell, f, x);
  double gap_susp = std::abs(susp_avg - predicted);
  double gap_direct = std::abs(direct_avg - predicted);

  char detail[200];
  std::snprintf(detail, sizeof detail,
                "termwise %.1e (<= 1e-9); |avg - limit| susp %.2e direct %.2e (<= 0.02)",
                max_term_gap, gap_susp, gap_direct);
  report(6, "suspension identity",
         max_term_gap <= 1e-9 && gap_susp <= 0.02 && gap_direct <= 0.02, sw.seconds(),
         detail);
}

// ---------------------------------------------------------------- 7

void criterion7() {
  Stopwatch sw;
  using funclass::Verdict;
  bool ok = true;
  char buf[512];
  buf[0] = 0;
  auto expect = [&](const char* dsl, const char* cls, Verdict want,
                    funclass::ClassVerdict got) {
    if (got.verdict != want) {
      ok = false;
      std::snprintf(buf + std::strlen(buf), sizeof buf - std::strlen(buf), " [%s %s=%s]",
                    dsl, cls, funclass::to_string(got.verdict));
    }
  };

  expr::FunctionSpec sqrt_fn = expr::make_function("x^0.5");
  expect("x^0.5", "T", Verdict::Holds, funclass::check_T(sqrt_fn));

  expr::FunctionSpec x13log = expr::make_function("x^(1/3)*log(x)");
  funclass::ClassVerdict t13 = funclass::check_T(x13log);
  expect("x^(1/3)log(x)", "T", Verdict::Holds, t13);
  bool limit13 = t13.estimated_limit && std::abs(*t13.estimated_limit - 1.0 / 3.0) <= 1e-2;
  if (!limit13) ok = false;

  expr::FunctionSpec log2 = expr::make_function("log(x)^2");
  expect("log(x)^2", "F", Verdict::Holds, funclass::check_fejer(log2));
  expect("log(x)^2", "T", Verdict::Fails, funclass::check_T(log2));

  expr::FunctionSpec slow = expr::make_function("log(x)*log(log(x))");
  expect("logxloglogx", "S", Verdict::Holds, funclass::check_S(slow));
  expect("logxloglogx", "T", Verdict::Fails, funclass::check_T(slow));

  expr::FunctionSpec osc = expr::make_function("x^0.04*(4/0.04+sin(log(x)))^3");
  expect("oscillating", "S", Verdict::Holds, funclass::check_S(osc));
  funclass::ClassVerdict osc_t = funclass::check_T(osc);
  expect("oscillating", "T", Verdict::Fails, osc_t);
  if (osc_t.reason.find("oscillates") == std::string::npos) ok = false;
  // the oscillating ratio stays inside the stated band
  funclass::RatioProfile prof = funclass::ratio_profile(osc);
  for (double r : prof.r1)
    if (!(r >= 0.04 - 0.12 / 3.96 - 1e-9 && r <= 0.04 + 0.12 / 3.96 + 1e-9)) ok = false;

  expect("3x+1", "SL", Verdict::Fails,
         funclass::check_sublinear(expr::make_function("3*x+1")));

  char detail[600];
  std::snprintf(detail, sizeof detail, "limit(x^(1/3)logx)=%s%s",
                limit13 ? "1/3" : "off", buf);
  report(7, "function-class golden table", ok && sw.seconds() <= 120.0, sw.seconds(),
         detail);
}

// ---------------------------------------------------------------- 8

void criterion8() {
  Stopwatch sw;
  bool ok = true;
  std::string why;

  // expr round-trip and derivative check
  for (const char* dsl : {"x^0.5", "log(x)*log(log(x))", "x^0.04*(4/0.04+sin(log(x)))^3"}) {
    expr::NodePtr e = expr::parse(dsl);
    if (!expr::structurally_equal(e, expr::parse(expr::to_string(e)))) {
      ok = false;
      why += " round-trip";
    }
    expr::FunctionSpec fn = expr::make_function(dsl);
    double x = 577.0;
    double fd = (fn.value(x + 1e-4) - fn.value(x - 1e-4)) / 2e-4;
    if (std::abs(fn.deriv1(x) - fd) / std::abs(fd) > 1e-6) {
      ok = false;
      why += " derivative";
    }
  }

  // engine: boundedness, unit mass, occupancy partition, hit set, workers
  ExperimentSpec spec;
  spec.tracks.push_back(rotation_track("sqrt2", 1, 0.2, IterateSequence::power(0.7)));
  spec.tracks.push_back(rotation_track("sqrt3", 1, 0.6, IterateSequence::power(0.4)));
  std::int64_t N = 200000;
  Complex serial = engine::multiple_average_serial(spec, N);
  if (std::abs(serial) > 1.0 + 1e-12) {
    ok = false;
    why += " bound";
  }
  for (int workers : {1, 2, 8}) {
    Complex par = engine::multiple_average(spec, N, workers);
    if (std::memcmp(&serial, &par, sizeof serial) != 0) {
      ok = false;
      why += " workers";
    }
  }
  ExperimentSpec mass = spec;
  mass.tracks[0].observable = Observable(TrigPoly::constant({1.0, 0.0}));
  mass.tracks[1].observable = Observable(TrigPoly::constant({1.0, 0.0}));
  if (engine::multiple_average(mass, 123456) != Complex{1.0, 0.0}) {
    ok = false;
    why += " mass";
  }
  IterateSequence its[] = {IterateSequence::power(0.5)};
  engine::OccupancyTable table = engine::occupancy(its, 50000);
  std::int64_t sum = 0;
  for (const auto& [k, c] : table.counts) sum += c;
  if (sum != 50000) {
    ok = false;
    why += " partition";
  }
  {
    DD gamma = dd_sqrt_int(2);
    IterateSequence lin = IterateSequence::linear_irrational(gamma, DD(0.0));
    std::set<std::int64_t> seen;
    for (std::int64_t n = 0; n < 100000; ++n) seen.insert(lin.floor_at(n));
    for (std::int64_t m = 1; m <= *seen.rbegin(); ++m) {
      if (engine::hits_linear_floor(gamma, DD(0.0), m) != (seen.count(m) == 1)) {
        ok = false;
        why += " hitset";
        break;
      }
    }
  }

  // limits: coefficient modulus bound and the consistency triangle
  for (std::int64_t m = 1; m <= 64; ++m) {
    double g = 2.2360679;
    Complex c = limits::fourier_coefficient(DD(g), DD(0.4), m);
    if (std::abs(c) > std::min(1.0, g / (std::numbers::pi * m)) + 1e-12) {
      ok = false;
      why += " modulus";
      break;
    }
  }
  {
    DD gamma = dd_sqrt_int(2);
    DD ell(0.3);
    double x = 0.17;
    TrigPoly f(8);
    f.c(0) = {0.2, 0.0};
    for (int m = 1; m <= 8; ++m) {
      f.c(m) = Complex{0.3 / m, 0.1 / m};
      f.c(-m) = std::conj(f.c(m));
    }
    ExperimentSpec tri;
    Track t;
    t.system = SystemSpec(systems::CircleRotation{Angle::irrational(dd_div(DD(1.0), gamma))});
    t.observable = Observable(f);
    t.start = PointState::circle(x);
    t.iterate = IterateSequence::linear_irrational(gamma, ell);
    tri.tracks.push_back(std::move(t));
    limits::LimitPrediction pred = limits::predicted_limit_linear_irrational(tri);
    limits::WindowOracleResult oracle = limits::sliding_window_oracle(gamma, ell, f, x);
    Complex a = engine::multiple_average(tri, 1000000);
    if (std::abs(pred.value - oracle.value) > 1e-10) {
      ok = false;
      why += " closed-forms";
    }
    if (std::abs(a - pred.value) > 2e-2 || std::abs(a - oracle.value) > 2e-2) {
      ok = false;
      why += " triangle";
    }
  }

  // systems: group law and projection idempotence
  {
    SystemSpec rot(systems::CircleRotation{Angle::named("sqrt2")});
    PointState p0 = PointState::circle(0.3);
    PointState a = systems::apply_power(rot, 12345,
                                        systems::apply_power(rot, -777, p0));
    PointState b = systems::apply_power(rot, 12345 - 777, p0);
    double d = std::abs(a.x - b.x);
    if (std::min(d, 1.0 - d) > 1e-12) {
      ok = false;
      why += " group-law";
    }
    TrigPoly mix(3);
    mix.c(0) = {0.5, 0.0};
    mix.c(3) = {0.25, 0.1};
    mix.c(1) = {0.8, 0.0};
    SystemSpec third(systems::CircleRotation{Angle::rational(1, 3)});
    Observable once = systems::cond_exp_invariant(third, Observable(mix));
    Observable twice = systems::cond_exp_invariant(third, once);
    const auto& pa = std::get<TrigPoly>(once.v);
    const auto& pb = std::get<TrigPoly>(twice.v);
    for (int m = -3; m <= 3; ++m)
      if (pa.c(m) != pb.c(m)) {
        ok = false;
        why += " projection";
        break;
      }
    if (systems::space_average(third, once) !=
        systems::space_average(third, Observable(mix))) {
      ok = false;
      why += " mean-preserved";
    }
  }

  report(8, "property suites", ok, sw.seconds(), why.empty() ? "all properties hold" : why.c_str());
}

}  // namespace

int main() {
  std::printf("acceptance suite (%s)\n", runner::version());
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
