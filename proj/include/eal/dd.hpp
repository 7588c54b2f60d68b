#pragma once

#include <cmath>
#include <cstdint>

namespace eal {

// Two-term (hi + lo) representation of a real, |lo| <= ulp(hi)/2.
// Keeps frac(k*theta) accurate to well below 1e-9 for |k| <= 1e9.
struct DD {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DD() = default;
  constexpr DD(double h) : hi(h), lo(0.0) {}
  constexpr DD(double h, double l) : hi(h), lo(l) {}

  double to_double() const { return hi + lo; }
};

inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

// requires |a| >= |b| or a == 0
inline DD quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD dd_add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  return quick_two_sum(s.hi, s.lo + a.lo + b.lo);
}

inline DD dd_add(DD a, double b) {
  DD s = two_sum(a.hi, b);
  return quick_two_sum(s.hi, s.lo + a.lo);
}

inline DD dd_neg(DD a) { return {-a.hi, -a.lo}; }

inline DD dd_sub(DD a, DD b) { return dd_add(a, dd_neg(b)); }

inline DD dd_mul(DD a, DD b) {
  DD p = two_prod(a.hi, b.hi);
  return quick_two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
}

inline DD dd_mul(DD a, double b) {
  DD p = two_prod(a.hi, b);
  return quick_two_sum(p.hi, p.lo + a.lo * b);
}

inline DD dd_div(DD a, DD b) {
  double q0 = a.hi / b.hi;
  DD r = dd_sub(a, dd_mul(b, q0));
  double q1 = r.hi / b.hi;
  r = dd_sub(r, dd_mul(b, q1));
  double q2 = r.hi / b.hi;
  DD q = quick_two_sum(q0, q1);
  return dd_add(q, q2);
}

// floor; exact for |hi| < 2^52
inline std::int64_t dd_floor(DD a) {
  double f = std::floor(a.hi);
  double r = a.hi - f;  // exact
  double fr = r + a.lo;
  auto base = static_cast<std::int64_t>(f);
  if (fr >= 1.0) return base + 1;
  if (fr < 0.0) return base - 1;
  return base;
}

// fractional part in [0,1)
inline double dd_frac(DD a) {
  std::int64_t f = dd_floor(a);
  DD r = dd_add(a, static_cast<double>(-f));
  double x = r.to_double();
  if (x >= 1.0) x -= 1.0;
  if (x < 0.0) x += 1.0;
  return x;
}

// frac(k * theta) in [0,1)
inline double dd_frac_mul_int(DD theta, std::int64_t k) {
  return dd_frac(dd_mul(theta, static_cast<double>(k)));
}

// sqrt(n) for small integer n, accurate to ~1e-33
inline DD dd_sqrt_int(int n) {
  double s = std::sqrt(static_cast<double>(n));
  double e = std::fma(s, s, static_cast<double>(-n));  // s*s - n, error-free
  return {s, -e / (2.0 * s)};
}

// hi/lo splits of e and pi (qd library values)
inline DD dd_e() { return {2.718281828459045091e+00, 1.445646891729250158e-16}; }
inline DD dd_pi() { return {3.141592653589793116e+00, 1.224646799147353207e-16}; }

}  // namespace eal
