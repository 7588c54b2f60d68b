#include "eal/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace eal::systems {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap01(double x) {
  x -= std::floor(x);
  if (x >= 1.0) x -= 1.0;
  if (x < 0.0) x += 1.0;
  return x;
}

// k*p mod q without overflow
std::int64_t mulmod(std::int64_t k, std::int64_t p, std::int64_t q) {
  __int128 r = static_cast<__int128>(k) * p % q;
  if (r < 0) r += q;
  return static_cast<std::int64_t>(r);
}

}  // namespace

Rational reduce(std::int64_t p, std::int64_t q) {
  if (q == 0) throw SystemError("rational angle with zero denominator");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  std::int64_t g = std::gcd(p < 0 ? -p : p, q);
  if (g > 1) {
    p /= g;
    q /= g;
  }
  return {p, q};
}

Angle Angle::rational(std::int64_t p, std::int64_t q) {
  Angle a;
  Rational r = reduce(p, q);
  r.p %= r.q;
  if (r.p < 0) r.p += r.q;
  a.ratio_ = r;
  a.rational_ = true;
  a.value_ = DD(static_cast<double>(r.p) / static_cast<double>(r.q));
  return a;
}

Angle Angle::irrational(DD v) {
  Angle a;
  // reduce mod 1 keeping the two-term residual
  a.value_ = dd_sub(v, static_cast<double>(dd_floor(v)));
  double f = a.value_.to_double();
  if (f < 0.0) a.value_ = dd_add(a.value_, 1.0);
  if (f >= 1.0) a.value_ = dd_add(a.value_, -1.0);
  return a;
}

Angle Angle::named(const std::string& name) {
  if (name == "sqrt2") return irrational(dd_sqrt_int(2));
  if (name == "sqrt3") return irrational(dd_sqrt_int(3));
  if (name == "sqrt5") return irrational(dd_sqrt_int(5));
  if (name == "golden") return irrational(dd_mul(dd_add(dd_sqrt_int(5), 1.0), 0.5));
  if (name == "e") return irrational(dd_e());
  if (name == "pi") return irrational(dd_pi());
  throw SystemError("unknown named constant '" + name + "'");
}

const Rational& Angle::ratio() const {
  if (!rational_) throw SystemError("angle is not declared rational");
  return ratio_;
}

double Angle::frac_times(std::int64_t k) const {
  if (rational_) {
    std::int64_t r = mulmod(k, ratio_.p, ratio_.q);
    return static_cast<double>(r) / static_cast<double>(ratio_.q);
  }
  return dd_frac_mul_int(value_, k);
}

DD Angle::frac_times_dd(std::int64_t k) const {
  if (rational_) return DD(frac_times(k));
  DD p = dd_mul(value_, static_cast<double>(k));
  return dd_sub(p, static_cast<double>(dd_floor(p)));
}

Angle Angle::times_int(std::int64_t p) const {
  if (rational_) return Angle::rational(ratio_.p * p, ratio_.q);
  if (p == 0) return Angle::rational(0, 1);
  return Angle::irrational(dd_mul(value_, static_cast<double>(p)));
}

// ------------------------------------------------------------- PointState

PointState PointState::circle(double x) {
  PointState p;
  p.kind = Kind::Circle;
  p.x = wrap01(x);
  return p;
}

PointState PointState::cycle(std::int64_t n) {
  PointState p;
  p.kind = Kind::Cycle;
  p.n = n;
  return p;
}

PointState PointState::product(std::vector<PointState> parts) {
  PointState p;
  p.kind = Kind::Product;
  p.parts = std::move(parts);
  return p;
}

PointState PointState::susp(double t, PointState base) {
  PointState p;
  p.kind = Kind::Susp;
  p.t = DD(t);
  p.parts.push_back(std::move(base));
  return p;
}

// ------------------------------------------------------------ observables

Complex TrigPoly::eval(double x) const {
  Complex sum{0.0, 0.0};
  for (int m = -degree; m <= degree; ++m) {
    Complex cm = c(m);
    if (cm == Complex{0.0, 0.0}) continue;
    double arg = kTwoPi * wrap01(m * x);
    sum += cm * Complex{std::cos(arg), std::sin(arg)};
  }
  return sum;
}

TrigPoly TrigPoly::constant(Complex v) {
  TrigPoly p(0);
  p.c(0) = v;
  return p;
}

TrigPoly TrigPoly::mode(int m, Complex c) {
  TrigPoly p(std::abs(m));
  p.c(m) = c;
  return p;
}

Complex Observable::eval(const PointState& p) const {
  return std::visit(
      [&](const auto& obs) -> Complex {
        using T = std::decay_t<decltype(obs)>;
        if constexpr (std::is_same_v<T, TrigPoly>) {
          if (p.kind != PointState::Kind::Circle)
            throw SystemError("trig polynomial evaluated off the circle");
          return obs.eval(p.x);
        } else if constexpr (std::is_same_v<T, IndicatorInterval>) {
          if (p.kind != PointState::Kind::Circle)
            throw SystemError("indicator evaluated off the circle");
          double d = p.x - obs.lo;
          d -= std::floor(d);
          return d < obs.len ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
        } else if constexpr (std::is_same_v<T, Tabulated>) {
          if (p.kind != PointState::Kind::Cycle)
            throw SystemError("tabulated observable off a finite cycle");
          auto q = static_cast<std::int64_t>(obs.values.size());
          std::int64_t i = ((p.n % q) + q) % q;
          return Complex{obs.values[static_cast<std::size_t>(i)], 0.0};
        } else if constexpr (std::is_same_v<T, TensorProductObs>) {
          if (p.kind != PointState::Kind::Product ||
              p.parts.size() != obs.factors.size())
            throw SystemError("tensor observable shape mismatch");
          Complex prod{1.0, 0.0};
          for (std::size_t i = 0; i < obs.factors.size(); ++i)
            prod *= obs.factors[i].eval(p.parts[i]);
          return prod;
        } else {
          if (p.kind != PointState::Kind::Susp)
            throw SystemError("lifted observable needs a suspension point");
          return obs.base->eval(p.parts[0]);
        }
      },
      v);
}

double Observable::sup_norm_bound() const {
  return std::visit(
      [&](const auto& obs) -> double {
        using T = std::decay_t<decltype(obs)>;
        if constexpr (std::is_same_v<T, TrigPoly>) {
          double s = 0;
          for (const Complex& c : obs.coeff) s += std::abs(c);
          return s;
        } else if constexpr (std::is_same_v<T, IndicatorInterval>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, Tabulated>) {
          double s = 0;
          for (double v2 : obs.values) s = std::max(s, std::abs(v2));
          return s;
        } else if constexpr (std::is_same_v<T, TensorProductObs>) {
          double s = 1;
          for (const Observable& f : obs.factors) s *= f.sup_norm_bound();
          return s;
        } else {
          return obs.base->sup_norm_bound();
        }
      },
      v);
}

// ------------------------------------------------------------- operations

PointState apply_power(const SystemSpec& s, std::int64_t k, const PointState& x) {
  return std::visit(
      [&](const auto& sys) -> PointState {
        using T = std::decay_t<decltype(sys)>;
        if constexpr (std::is_same_v<T, CircleRotation>) {
          if (x.kind != PointState::Kind::Circle)
            throw SystemError("rotation applied to a non-circle point");
          double shift = sys.angle.frac_times(k);
          double y = x.x + shift;
          if (y >= 1.0) y -= 1.0;
          return PointState::circle(y);
        } else if constexpr (std::is_same_v<T, FiniteCycle>) {
          if (x.kind != PointState::Kind::Cycle)
            throw SystemError("cycle shift applied to a non-cycle point");
          std::int64_t q = sys.size;
          std::int64_t n = ((x.n + k) % q + q) % q;
          return PointState::cycle(n);
        } else if constexpr (std::is_same_v<T, ProductSystem>) {
          if (x.kind != PointState::Kind::Product ||
              x.parts.size() != sys.factors.size())
            throw SystemError("product point shape mismatch");
          std::vector<PointState> parts;
          parts.reserve(x.parts.size());
          for (std::size_t i = 0; i < x.parts.size(); ++i)
            parts.push_back(apply_power(sys.factors[i], k, x.parts[i]));
          return PointState::product(std::move(parts));
        } else {
          if (x.kind != PointState::Kind::Susp)
            throw SystemError("suspension power applied to a non-suspension point");
          // S^k(t, y) = ({t + k gamma}, T^[t + k gamma] y)
          DD shifted = dd_add(dd_mul(sys.gamma, static_cast<double>(k)), x.t);
          std::int64_t j = dd_floor(shifted);
          DD t2 = dd_sub(shifted, static_cast<double>(j));
          PointState out;
          out.kind = PointState::Kind::Susp;
          out.t = t2;
          out.parts.push_back(apply_power(*sys.base, j, x.parts[0]));
          return out;
        }
      },
      s.v);
}

Complex space_average(const SystemSpec& s, const Observable& f) {
  return std::visit(
      [&](const auto& obs) -> Complex {
        using T = std::decay_t<decltype(obs)>;
        if constexpr (std::is_same_v<T, TrigPoly>) {
          return obs.c(0);
        } else if constexpr (std::is_same_v<T, IndicatorInterval>) {
          return Complex{obs.len, 0.0};
        } else if constexpr (std::is_same_v<T, Tabulated>) {
          double s2 = 0;
          for (double v2 : obs.values) s2 += v2;
          return Complex{s2 / static_cast<double>(obs.values.size()), 0.0};
        } else if constexpr (std::is_same_v<T, TensorProductObs>) {
          const auto* prod = std::get_if<ProductSystem>(&s.v);
          if (!prod || prod->factors.size() != obs.factors.size())
            throw SystemError("tensor observable needs a matching product system");
          Complex out{1.0, 0.0};
          for (std::size_t i = 0; i < obs.factors.size(); ++i)
            out *= space_average(prod->factors[i], obs.factors[i]);
          return out;
        } else {
          const auto* susp = std::get_if<Suspension>(&s.v);
          if (!susp) throw SystemError("lifted observable needs a suspension system");
          return space_average(*susp->base, *obs.base);
        }
      },
      f.v);
}

Observable shift_observable(const SystemSpec& s, std::int64_t k, const Observable& f) {
  return std::visit(
      [&](const auto& obs) -> Observable {
        using T = std::decay_t<decltype(obs)>;
        if constexpr (std::is_same_v<T, TrigPoly>) {
          const auto* rot = std::get_if<CircleRotation>(&s.v);
          if (!rot) throw SystemError("trig polynomial shift needs a rotation");
          double shift = rot->angle.frac_times(k);
          TrigPoly out(obs.degree);
          for (int m = -obs.degree; m <= obs.degree; ++m) {
            double arg = kTwoPi * wrap01(m * shift);
            out.c(m) = obs.c(m) * Complex{std::cos(arg), std::sin(arg)};
          }
          return Observable(out);
        } else if constexpr (std::is_same_v<T, IndicatorInterval>) {
          const auto* rot = std::get_if<CircleRotation>(&s.v);
          if (!rot) throw SystemError("indicator shift needs a rotation");
          IndicatorInterval out = obs;
          out.lo = wrap01(obs.lo - rot->angle.frac_times(k));
          return Observable(out);
        } else if constexpr (std::is_same_v<T, Tabulated>) {
          const auto* cyc = std::get_if<FiniteCycle>(&s.v);
          if (!cyc || cyc->size != static_cast<std::int64_t>(obs.values.size()))
            throw SystemError("tabulated shift needs a matching cycle");
          std::int64_t q = cyc->size;
          Tabulated out;
          out.values.resize(obs.values.size());
          for (std::int64_t i = 0; i < q; ++i)
            out.values[static_cast<std::size_t>(i)] =
                obs.values[static_cast<std::size_t>(((i + k) % q + q) % q)];
          return Observable(out);
        } else if constexpr (std::is_same_v<T, TensorProductObs>) {
          const auto* prod = std::get_if<ProductSystem>(&s.v);
          if (!prod || prod->factors.size() != obs.factors.size())
            throw SystemError("tensor shift needs a matching product system");
          TensorProductObs out;
          for (std::size_t i = 0; i < obs.factors.size(); ++i)
            out.factors.push_back(shift_observable(prod->factors[i], k, obs.factors[i]));
          return Observable(out);
        } else {
          throw SystemError("shift of a lifted observable is not supported");
        }
      },
      f.v);
}

namespace {

// dist(m1 t1 + ... , Z) <= 1e-9 for the declared angles
bool mode_invariant(const std::vector<const Angle*>& angles,
                    const std::vector<int>& modes) {
  bool all_rational = std::all_of(angles.begin(), angles.end(),
                                  [](const Angle* a) { return a->is_rational(); });
  if (all_rational) {
    // sum m_i p_i / q_i integer, done exactly
    __int128 num = 0;
    __int128 den = 1;
    for (std::size_t i = 0; i < angles.size(); ++i) {
      const Rational& r = angles[i]->ratio();
      num = num * r.q + den * static_cast<__int128>(modes[i]) * r.p;
      den *= r.q;
    }
    return num % den == 0;
  }
  DD sum{};
  for (std::size_t i = 0; i < angles.size(); ++i)
    sum = dd_add(sum, dd_mul(angles[i]->value(), static_cast<double>(modes[i])));
  double fr = dd_frac(sum);
  return fr <= 1e-9 || fr >= 1.0 - 1e-9;
}

Observable cond_exp_rotation(const CircleRotation& rot, const Observable& f) {
  const auto* poly = std::get_if<TrigPoly>(&f.v);
  if (!poly) {
    // an indicator under an ergodic rotation projects to its mean
    if (const auto* ind = std::get_if<IndicatorInterval>(&f.v); ind && !rot.angle.is_rational())
      return Observable(TrigPoly::constant(Complex{ind->len, 0.0}));
    throw SystemError("conditional expectation supports trig polynomials here");
  }
  TrigPoly out(poly->degree);
  std::vector<const Angle*> angles{&rot.angle};
  for (int m = -poly->degree; m <= poly->degree; ++m) {
    std::vector<int> modes{m};
    if (mode_invariant(angles, modes)) out.c(m) = poly->c(m);
  }
  return Observable(out);
}

}  // namespace

Observable cond_exp_invariant(const SystemSpec& s, const Observable& f) {
  return std::visit(
      [&](const auto& sys) -> Observable {
        using T = std::decay_t<decltype(sys)>;
        if constexpr (std::is_same_v<T, CircleRotation>) {
          return cond_exp_rotation(sys, f);
        } else if constexpr (std::is_same_v<T, FiniteCycle>) {
          const auto* tab = std::get_if<Tabulated>(&f.v);
          if (!tab) throw SystemError("finite cycle expects a tabulated observable");
          double mean = 0;
          for (double v2 : tab->values) mean += v2;
          mean /= static_cast<double>(tab->values.size());
          Tabulated out;
          out.values.assign(tab->values.size(), mean);
          return Observable(out);
        } else if constexpr (std::is_same_v<T, ProductSystem>) {
          const auto* tens = std::get_if<TensorProductObs>(&f.v);
          if (!tens || tens->factors.size() != sys.factors.size())
            throw SystemError("product conditional expectation needs a tensor observable");
          TensorProductObs out;
          for (std::size_t i = 0; i < sys.factors.size(); ++i)
            out.factors.push_back(cond_exp_invariant(sys.factors[i], tens->factors[i]));
          return Observable(out);
        } else {
          throw SystemError("unsupported variant for conditional expectation");
        }
      },
      s.v);
}

Observable cond_exp_power(const SystemSpec& s, std::int64_t p, const Observable& f) {
  if (p == 0) throw SystemError("power must be nonzero");
  return std::visit(
      [&](const auto& sys) -> Observable {
        using T = std::decay_t<decltype(sys)>;
        if constexpr (std::is_same_v<T, CircleRotation>) {
          CircleRotation powered{sys.angle.times_int(p)};
          if (powered.angle.is_rational() && powered.angle.ratio().p == 0) {
            // T^p is the identity: everything is invariant
            return f;
          }
          return cond_exp_rotation(powered, f);
        } else if constexpr (std::is_same_v<T, FiniteCycle>) {
          const auto* tab = std::get_if<Tabulated>(&f.v);
          if (!tab) throw SystemError("finite cycle expects a tabulated observable");
          std::int64_t q = sys.size;
          std::int64_t g = std::gcd(((p % q) + q) % q, q);
          if (g == 0) g = q;
          // orbits of shift-by-p are the residue classes mod gcd(p,q)
          Tabulated out;
          out.values.resize(tab->values.size());
          for (std::int64_t r = 0; r < g; ++r) {
            double mean = 0;
            std::int64_t count = 0;
            for (std::int64_t i = r; i < q; i += g) {
              mean += tab->values[static_cast<std::size_t>(i)];
              ++count;
            }
            mean /= static_cast<double>(count);
            for (std::int64_t i = r; i < q; i += g)
              out.values[static_cast<std::size_t>(i)] = mean;
          }
          return Observable(out);
        } else if constexpr (std::is_same_v<T, ProductSystem>) {
          const auto* tens = std::get_if<TensorProductObs>(&f.v);
          if (!tens || tens->factors.size() != sys.factors.size())
            throw SystemError("product conditional expectation needs a tensor observable");
          TensorProductObs out;
          for (std::size_t i = 0; i < sys.factors.size(); ++i)
            out.factors.push_back(cond_exp_power(sys.factors[i], p, tens->factors[i]));
          return Observable(out);
        } else {
          throw SystemError("unsupported variant for conditional expectation");
        }
      },
      s.v);
}

Observable eigenprojection(const SystemSpec& s, DD gamma, std::int64_t m,
                           const Observable& f) {
  const auto* rot = std::get_if<CircleRotation>(&s.v);
  const auto* poly = std::get_if<TrigPoly>(&f.v);
  if (!rot || !poly)
    throw SystemError("eigenprojection needs a rotation and a trig polynomial");
  DD target = dd_div(DD(static_cast<double>(m)), gamma);
  TrigPoly out(poly->degree);
  for (int k = -poly->degree; k <= poly->degree; ++k) {
    DD diff = dd_sub(rot->angle.frac_times_dd(k), target);
    double fr = dd_frac(diff);
    double dist = std::min(fr, 1.0 - fr);
    if (dist <= 1e-9) out.c(k) = poly->c(k);
  }
  return Observable(out);
}

PointState suspension_step(const SystemSpec& base, DD gamma, const PointState& state) {
  if (state.kind != PointState::Kind::Susp)
    throw SystemError("suspension step needs a suspension point");
  DD shifted = dd_add(state.t, gamma);
  std::int64_t j = dd_floor(shifted);
  PointState out;
  out.kind = PointState::Kind::Susp;
  out.t = dd_sub(shifted, static_cast<double>(j));
  out.parts.push_back(apply_power(base, j, state.parts[0]));
  return out;
}

Observable lift_observable(const Observable& f) {
  LiftedObs l;
  l.base = std::make_shared<Observable>(f);
  return Observable(l);
}

PointState start_point(const SystemSpec& s, double seed_coord) {
  return std::visit(
      [&](const auto& sys) -> PointState {
        using T = std::decay_t<decltype(sys)>;
        if constexpr (std::is_same_v<T, CircleRotation>) {
          return PointState::circle(seed_coord);
        } else if constexpr (std::is_same_v<T, FiniteCycle>) {
          auto n = static_cast<std::int64_t>(seed_coord * static_cast<double>(sys.size));
          return PointState::cycle(std::clamp<std::int64_t>(n, 0, sys.size - 1));
        } else if constexpr (std::is_same_v<T, ProductSystem>) {
          std::vector<PointState> parts;
          for (const SystemSpec& f2 : sys.factors) parts.push_back(start_point(f2, seed_coord));
          return PointState::product(std::move(parts));
        } else {
          return PointState::susp(seed_coord, start_point(*sys.base, seed_coord));
        }
      },
      s.v);
}

}  // namespace eal::systems
