#include "eal/limits.hpp"

#include <cmath>
#include <numbers>

namespace eal::limits {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex cis(double turns) {  // e^{2 pi i turns}
  double arg = kTwoPi * (turns - std::floor(turns));
  return {std::cos(arg), std::sin(arg)};
}

Complex eval_cond_exp_at(const systems::SystemSpec& s, const systems::Observable& f,
                         const systems::PointState& x) {
  systems::Observable proj = systems::cond_exp_invariant(s, f);
  return proj.eval(x);
}

}  // namespace

LimitPrediction predicted_limit_sublinear(const engine::ExperimentSpec& spec) {
  LimitPrediction pred;
  pred.provenance = "product of invariant projections (sublinear iterates)";
  Complex prod{1.0, 0.0};
  for (const engine::Track& t : spec.tracks)
    prod *= eval_cond_exp_at(t.system, t.observable, t.start);
  pred.value = prod;
  return pred;
}

Complex fourier_coefficient(DD gamma, DD ell, std::int64_t m) {
  if (m == 0) return {1.0, 0.0};
  DD u_dd = dd_div(DD(static_cast<double>(m)), gamma);
  double u = u_dd.to_double();
  double u_frac = dd_frac(u_dd);
  Complex phase = cis(dd_frac(dd_div(dd_mul(ell, static_cast<double>(m)), gamma)));
  Complex num = cis(-u_frac) - Complex{1.0, 0.0};
  Complex den{0.0, -kTwoPi * u};
  return phase * (num / den);
}

namespace {

const systems::CircleRotation& rotation_of(const systems::SystemSpec& s) {
  const auto* rot = std::get_if<systems::CircleRotation>(&s.v);
  if (!rot) throw engine::ConfigError("the fastest track must live on a rotation");
  return *rot;
}

// smallest |m| with dist(k theta - m/gamma, Z) <= 1e-9, if any
std::optional<std::int64_t> match_mode(const systems::Angle& theta, DD gamma, int k) {
  DD ktheta = theta.frac_times_dd(k);
  std::optional<std::int64_t> best;
  for (std::int64_t j = -(std::abs(k) + 2); j <= std::abs(k) + 2; ++j) {
    DD target = dd_add(ktheta, static_cast<double>(j));
    DD m_real = dd_mul(gamma, target);
    auto m = static_cast<std::int64_t>(std::llround(m_real.to_double()));
    for (std::int64_t mc : {m - 1, m, m + 1}) {
      DD diff = dd_sub(ktheta, dd_div(DD(static_cast<double>(mc)), gamma));
      double fr = dd_frac(diff);
      double dist = std::min(fr, 1.0 - fr);
      if (dist <= 1e-9 && (!best || std::llabs(mc) < std::llabs(*best))) best = mc;
    }
  }
  return best;
}

}  // namespace

MeanErgodicLimit mean_ergodic_limit(const systems::SystemSpec& rotation, DD gamma,
                                    DD ell, const systems::TrigPoly& f) {
  const systems::CircleRotation& rot = rotation_of(rotation);
  MeanErgodicLimit out;
  systems::TrigPoly res(f.degree);
  for (int k = -f.degree; k <= f.degree; ++k) {
    if (f.c(k) == Complex{0.0, 0.0}) continue;
    std::optional<std::int64_t> m = match_mode(rot.angle, gamma, k);
    if (!m) continue;
    res.c(k) = fourier_coefficient(gamma, ell, *m) * f.c(k);
    out.matches.emplace_back(k, *m);
  }
  out.observable = systems::Observable(res);
  return out;
}

LimitPrediction predicted_limit_linear_irrational(const engine::ExperimentSpec& spec) {
  if (spec.tracks.empty()) throw engine::ConfigError("empty experiment");
  const engine::Track& first = spec.tracks.front();
  const auto* lin = std::get_if<engine::LinearIterate>(&first.iterate.v);
  if (!lin || lin->is_rational)
    throw engine::ConfigError("fastest iterate must be linear with irrational slope");
  const auto* poly = std::get_if<systems::TrigPoly>(&first.observable.v);
  if (!poly) throw engine::ConfigError("fastest observable must be a trig polynomial");

  MeanErgodicLimit mel = mean_ergodic_limit(first.system, lin->gamma, lin->ell, *poly);
  LimitPrediction pred;
  pred.provenance = "eigenmode series for an irrational linear iterate";
  pred.mode_range = poly->degree;
  pred.matches = mel.matches;
  pred.value = mel.observable.eval(first.start);
  for (std::size_t i = 1; i < spec.tracks.size(); ++i)
    pred.value *= eval_cond_exp_at(spec.tracks[i].system, spec.tracks[i].observable,
                                   spec.tracks[i].start);
  return pred;
}

LimitPrediction predicted_limit_linear_rational(const engine::ExperimentSpec& spec) {
  if (spec.tracks.empty()) throw engine::ConfigError("empty experiment");
  const engine::Track& first = spec.tracks.front();
  const auto* lin = std::get_if<engine::LinearIterate>(&first.iterate.v);
  if (!lin || !lin->is_rational)
    throw engine::ConfigError("fastest iterate must be linear with rational slope");
  std::int64_t p = lin->k.p, q = lin->k.q;

  LimitPrediction pred;
  pred.provenance = "averaged shifted projections for a rational linear iterate";
  Complex head{0.0, 0.0};
  for (std::int64_t j = 0; j < q; ++j) {
    // shift exponent [p j / q + ell]
    engine::IterateSequence shift_seq = engine::IterateSequence::linear_rational(p, q, lin->ell);
    std::int64_t s = shift_seq.floor_at(j);
    systems::Observable shifted = systems::shift_observable(first.system, s, first.observable);
    systems::Observable proj = systems::cond_exp_power(first.system, p, shifted);
    head += proj.eval(first.start);
  }
  head /= static_cast<double>(q);
  pred.value = head;
  for (std::size_t i = 1; i < spec.tracks.size(); ++i)
    pred.value *= eval_cond_exp_at(spec.tracks[i].system, spec.tracks[i].observable,
                                   spec.tracks[i].start);
  return pred;
}

namespace {

// exact integral of f over [a, a+len] on the line, f a 1-periodic trig polynomial
Complex window_integral(const systems::TrigPoly& f, DD a_dd, DD len_dd) {
  Complex sum{0.0, 0.0};
  double len = len_dd.to_double();
  for (int m = -f.degree; m <= f.degree; ++m) {
    Complex cm = f.c(m);
    if (cm == Complex{0.0, 0.0}) continue;
    if (m == 0) {
      sum += cm * len;
      continue;
    }
    // (e^{2 pi i m b} - e^{2 pi i m a}) / (2 pi i m)
    Complex eb = cis(dd_frac(dd_mul(dd_add(a_dd, len_dd), static_cast<double>(m))));
    Complex ea = cis(dd_frac(dd_mul(a_dd, static_cast<double>(m))));
    sum += cm * (eb - ea) / Complex{0.0, kTwoPi * m};
  }
  return sum;
}

engine::ExperimentSpec window_brute_spec(DD gamma, DD ell, const systems::TrigPoly& f,
                                         double x) {
  engine::Track t;
  t.system = systems::SystemSpec(
      systems::CircleRotation{systems::Angle::irrational(dd_div(DD(1.0), gamma))});
  t.observable = systems::Observable(f);
  t.start = systems::PointState::circle(x);
  t.iterate = engine::IterateSequence::linear_irrational(gamma, ell);
  engine::ExperimentSpec spec;
  spec.tracks.push_back(std::move(t));
  return spec;
}

}  // namespace

WindowOracleResult sliding_window_oracle(DD gamma, DD ell, const systems::TrigPoly& f,
                                         double x, std::int64_t calibration_N) {
  WindowOracleResult res;
  DD inv_gamma = dd_div(DD(1.0), gamma);
  // lower endpoint x + (ell-1)/gamma, length 1/gamma
  DD lo = dd_add(dd_mul(dd_sub(ell, DD(1.0)), inv_gamma), DD(x));
  res.printed = window_integral(f, lo, inv_gamma);
  res.gamma_scaled = res.printed * gamma.to_double();

  // calibration on the constant observable: its brute-force average is 1
  systems::TrigPoly one = systems::TrigPoly::constant({1.0, 0.0});
  Complex brute_one =
      engine::multiple_average(window_brute_spec(gamma, ell, one, x), calibration_N);
  double err_printed = std::abs(Complex{inv_gamma.to_double(), 0.0} - brute_one);
  double err_scaled = std::abs(Complex{1.0, 0.0} - brute_one);
  if (err_scaled <= err_printed && err_scaled <= 1e-3) {
    res.selected = WindowNormalization::GammaScaled;
    res.value = res.gamma_scaled;
    res.calibration_error = err_scaled;
  } else if (err_printed <= 1e-3) {
    res.selected = WindowNormalization::Printed;
    res.value = res.printed;
    res.calibration_error = err_printed;
  } else {
    throw OracleMismatch("window oracle: neither normalization matches the brute-force mass");
  }

  Complex brute_f =
      engine::multiple_average(window_brute_spec(gamma, ell, f, x), calibration_N);
  res.cross_check_error = std::abs(res.value - brute_f);
  if (res.cross_check_error > 2e-2)
    throw OracleMismatch("window oracle: closed form disagrees with the brute-force average");
  return res;
}

Complex suspension_limit(const systems::SystemSpec& base, DD gamma, DD ell,
                         const systems::TrigPoly& f, double x) {
  MeanErgodicLimit mel = mean_ergodic_limit(base, gamma, ell, f);
  return mel.observable.eval(systems::PointState::circle(x));
}

}  // namespace eal::limits
