#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "eal/dd.hpp"

namespace eal::systems {

struct SystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Rational {
  std::int64_t p = 0;
  std::int64_t q = 1;  // q > 0, gcd(p,q) = 1
};

Rational reduce(std::int64_t p, std::int64_t q);

// Rotation angle on the circle, held in [0,1). Rationality is declared by
// construction, never detected from the float value.
class Angle {
 public:
  Angle() = default;
  static Angle rational(std::int64_t p, std::int64_t q);
  static Angle irrational(DD v);
  // sqrt2, sqrt3, golden, e, pi reduced mod 1
  static Angle named(const std::string& name);

  bool is_rational() const { return rational_; }
  const Rational& ratio() const;
  DD value() const { return value_; }
  double to_double() const { return value_.to_double(); }

  // frac(k * theta), exact for rational angles
  double frac_times(std::int64_t k) const;
  DD frac_times_dd(std::int64_t k) const;

  Angle times_int(std::int64_t p) const;  // p*theta mod 1, keeps rationality

 private:
  DD value_{};
  bool rational_ = false;
  Rational ratio_{};
};

struct CircleRotation {
  Angle angle;
};

struct FiniteCycle {
  std::int64_t size = 1;  // shift by one on {0,...,size-1}, uniform measure
};

struct SystemSpec;

struct ProductSystem {
  std::vector<SystemSpec> factors;
};

struct Suspension {
  std::shared_ptr<const SystemSpec> base;
  DD gamma;
};

struct SystemSpec {
  std::variant<CircleRotation, FiniteCycle, ProductSystem, Suspension> v;

  SystemSpec() : v(CircleRotation{}) {}
  SystemSpec(CircleRotation r) : v(std::move(r)) {}
  SystemSpec(FiniteCycle c) : v(std::move(c)) {}
  SystemSpec(ProductSystem p) : v(std::move(p)) {}
  SystemSpec(Suspension s) : v(std::move(s)) {}
};

// Point of the state space; coordinates stay in canonical range.
struct PointState {
  enum class Kind { Circle, Cycle, Product, Susp } kind = Kind::Circle;
  double x = 0.0;           // Circle
  std::int64_t n = 0;       // Cycle
  DD t{};                   // Susp time coordinate, kept two-term
  std::vector<PointState> parts;  // Product factors; Susp base point in parts[0]

  static PointState circle(double x);
  static PointState cycle(std::int64_t n);
  static PointState product(std::vector<PointState> parts);
  static PointState susp(double t, PointState base);
};

using Complex = std::complex<double>;

// Trigonometric polynomial sum_{|m|<=M} c_m e^{2 pi i m x}.
struct TrigPoly {
  int degree = 0;
  std::vector<Complex> coeff;  // index m + degree, size 2*degree+1

  TrigPoly() : coeff(1, Complex{0.0, 0.0}) {}
  explicit TrigPoly(int M) : degree(M), coeff(2 * M + 1, Complex{0.0, 0.0}) {}

  Complex& c(int m) { return coeff[m + degree]; }
  Complex c(int m) const { return coeff[m + degree]; }
  Complex eval(double x) const;

  static TrigPoly constant(Complex v);
  static TrigPoly mode(int m, Complex c = {1.0, 0.0});
};

struct IndicatorInterval {
  double lo = 0.0;   // interval [lo, lo+len) wrapped mod 1
  double len = 0.0;
};

struct Tabulated {
  std::vector<double> values;
};

struct Observable;

struct TensorProductObs {
  std::vector<Observable> factors;
};

struct LiftedObs {
  std::shared_ptr<const Observable> base;  // evaluation ignores the time coordinate
};

struct Observable {
  std::variant<TrigPoly, IndicatorInterval, Tabulated, TensorProductObs, LiftedObs> v;

  Observable() : v(TrigPoly{}) {}
  Observable(TrigPoly p) : v(std::move(p)) {}
  Observable(IndicatorInterval i) : v(std::move(i)) {}
  Observable(Tabulated t) : v(std::move(t)) {}
  Observable(TensorProductObs t) : v(std::move(t)) {}
  Observable(LiftedObs l) : v(std::move(l)) {}

  Complex eval(const PointState& p) const;
  double sup_norm_bound() const;
};

// k-step action, exact in O(1) for rotations and cycles.
PointState apply_power(const SystemSpec& s, std::int64_t k, const PointState& x);

Complex space_average(const SystemSpec& s, const Observable& f);

// f composed with T^k as an Observable.
Observable shift_observable(const SystemSpec& s, std::int64_t k, const Observable& f);

// Projection onto the invariant factor of T. On products the factor used is
// the product of the per-coordinate invariant algebras, which is what the
// limit formulas consume.
Observable cond_exp_invariant(const SystemSpec& s, const Observable& f);

// Same, for the transformation T^p.
Observable cond_exp_power(const SystemSpec& s, std::int64_t p, const Observable& f);

// Keeps the modes k of f with dist(k*theta - m/gamma, Z) <= 1e-9, i.e. the
// eigenspace with T e_k = exp(2 pi i m/gamma) e_k.
Observable eigenprojection(const SystemSpec& s, DD gamma, std::int64_t m,
                           const Observable& f);

// One application of the suspension translation S(t,x) = ({t+gamma}, T^[t+gamma] x).
PointState suspension_step(const SystemSpec& base, DD gamma, const PointState& state);

Observable lift_observable(const Observable& f);

PointState start_point(const SystemSpec& s, double seed_coord);

}  // namespace eal::systems
