#include "eal/funclass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eal::funclass {

namespace {

constexpr int kTail = 8;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double safe(const std::function<double(double)>& fn, double x) {
  try {
    double v = fn(x);
    return std::isfinite(v) ? v : kNaN;
  } catch (const expr::EvalError&) {
    return kNaN;
  } catch (const expr::RootFindError&) {
    return kNaN;
  }
}

std::vector<double> finite_tail(std::span<const double> v, int count) {
  std::vector<double> out;
  for (auto it = v.rbegin(); it != v.rend() && static_cast<int>(out.size()) < count; ++it)
    if (std::isfinite(*it)) out.push_back(*it);
  std::reverse(out.begin(), out.end());
  return out;
}

// The grid the class checks sample for g. An inverse spec is sampled along
// the forward image y = f(x) of the default grid, which stays inside the
// range of f and inside the root finder's bracket bound.
std::vector<double> grid_for(const expr::FunctionSpec& g) {
  if (g.inverse_of) {
    std::vector<double> ys;
    for (double x : default_grid()) {
      double y = safe(g.inverse_of->value, x);
      if (std::isfinite(y)) ys.push_back(y);
    }
    return ys;
  }
  return default_grid();
}

const std::function<double(double)>& deriv_of(const expr::FunctionSpec& g, int order) {
  switch (order) {
    case 0: return g.value;
    case 1: return g.deriv1;
    case 2: return g.deriv2;
    default: return g.deriv3;
  }
}

void push_witness(ClassVerdict& v, std::span<const double> xs, std::span<const double> ys) {
  std::size_t n = std::min(xs.size(), ys.size());
  std::size_t start = n > kTail ? n - kTail : 0;
  for (std::size_t i = start; i < n; ++i) v.witness.emplace_back(xs[i], ys[i]);
}

}  // namespace

std::vector<double> default_grid(double x0, double ratio_exponent, double x_max) {
  std::vector<double> g;
  for (int k = 0;; ++k) {
    double x = x0 * std::pow(10.0, ratio_exponent * k);
    if (x > x_max * (1.0 + 1e-12)) break;
    g.push_back(x);
  }
  return g;
}

RatioProfile ratio_profile(const expr::FunctionSpec& f, std::span<const double> grid) {
  RatioProfile p;
  p.grid = grid.empty() ? grid_for(f) : std::vector<double>(grid.begin(), grid.end());
  p.r1.reserve(p.grid.size());
  p.r2.reserve(p.grid.size());
  p.r3.reserve(p.grid.size());
  for (double x : p.grid) {
    double a = safe(f.value, x);
    double d1 = safe(f.deriv1, x);
    double d2 = safe(f.deriv2, x);
    double d3 = safe(f.deriv3, x);
    p.r1.push_back(a != 0.0 ? x * d1 / a : kNaN);
    p.r2.push_back(d1 != 0.0 ? x * d2 / d1 : kNaN);
    p.r3.push_back(d2 != 0.0 ? x * d3 / d2 : kNaN);
  }
  return p;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    default: return "inconclusive";
  }
}

// ------------------------------------------------------- limit estimation

namespace {

std::optional<double> fit_harmonic(double v1, double v2, double v3, double scale) {
  double d1 = v2 - v1, d2 = v3 - v2;
  if (std::abs(d1 - d2) < 1e-14 * scale) return std::nullopt;
  double u = 2.0 * d2 / (d1 - d2);
  if (!(u > 0.5) || !std::isfinite(u)) return std::nullopt;
  double A = -d1 * u * (u + 1.0);
  return v1 - A / u;
}

std::optional<double> fit_aitken(double v1, double v2, double v3, double scale) {
  double d1 = v2 - v1, d2 = v3 - v2;
  if (std::abs(d2 - d1) < 1e-14 * scale) return std::nullopt;
  if (std::abs(d2) >= std::abs(d1)) return std::nullopt;
  return v3 - d2 * d2 / (d2 - d1);
}

std::optional<double> agree(const std::vector<double>& fits) {
  if (fits.size() < 2) return std::nullopt;
  auto [lo, hi] = std::minmax_element(fits.begin(), fits.end());
  if (*hi - *lo > 1e-3) return std::nullopt;
  double s = 0;
  for (double f : fits) s += f;
  return s / fits.size();
}

}  // namespace

LimitEstimate estimate_limit(std::span<const double> values) {
  LimitEstimate est;
  std::vector<double> v = finite_tail(values, 6);
  if (v.size() < 4) return est;

  auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  est.tail_spread = *mx - *mn;
  double scale = 1.0;
  for (double x : v) scale = std::max(scale, std::abs(x));

  // oscillation is judged over the whole profile: a six-point tail can look
  // monotone inside one swing of a slow oscillation
  {
    std::vector<double> all;
    for (double x : values)
      if (std::isfinite(x)) all.push_back(x);
    double full_lo = all.empty() ? 0 : all.front(), full_hi = full_lo;
    int sign_changes = 0, prev = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
      full_lo = std::min(full_lo, all[i]);
      full_hi = std::max(full_hi, all[i]);
      if (i + 1 == all.size()) break;
      double d = all[i + 1] - all[i];
      if (std::abs(d) < 1e-12 * scale) continue;
      int s = d > 0 ? 1 : -1;
      if (prev != 0 && s != prev) ++sign_changes;
      prev = s;
    }
    est.oscillating = sign_changes >= 2 && full_hi - full_lo >= 1e-2;
  }

  if (est.tail_spread <= 1e-3) {
    // a damped oscillation that has settled counts as convergent
    est.oscillating = false;
    est.has_limit = true;
    est.value = v.back();
    return est;
  }
  if (est.oscillating) return est;

  std::vector<double> harm, aitk;
  for (std::size_t i = 0; i + 2 < v.size(); ++i) {
    if (auto h = fit_harmonic(v[i], v[i + 1], v[i + 2], scale)) harm.push_back(*h);
    if (auto a = fit_aitken(v[i], v[i + 1], v[i + 2], scale)) aitk.push_back(*a);
  }
  if (auto L = agree(harm)) {
    est.has_limit = true;
    est.value = *L;
    return est;
  }
  if (auto L = agree(aitk)) {
    est.has_limit = true;
    est.value = *L;
    return est;
  }
  return est;
}

// ---------------------------------------------------------- class checks

namespace {

struct TailStats {
  std::vector<double> grid, values;  // finite pairs only
  std::vector<double> tail_x, tail_v;
  bool ok = false;
};

TailStats sample(const std::function<double(double)>& q, std::span<const double> grid) {
  TailStats s;
  for (double x : grid) {
    double v = q(x);
    if (std::isfinite(v)) {
      s.grid.push_back(x);
      s.values.push_back(v);
    }
  }
  if (static_cast<int>(s.values.size()) < kTail + 2) return s;
  s.tail_x.assign(s.grid.end() - kTail, s.grid.end());
  s.tail_v.assign(s.values.end() - kTail, s.values.end());
  s.ok = true;
  return s;
}

bool strictly_decreasing(std::span<const double> v) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (!(v[i + 1] < v[i])) return false;
  return true;
}

bool strictly_increasing(std::span<const double> v) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (!(v[i + 1] > v[i])) return false;
  return true;
}

// |q| tends to 0 along the grid: either it is decreasing and small/decayed,
// or an oscillating sequence whose tail envelope has clearly collapsed.
struct DecayCall {
  Verdict verdict;
  std::string reason;
};

DecayCall decays_to_zero(const TailStats& s) {
  double last = std::abs(s.values.back());
  double first = std::abs(s.values.front());
  double full_decay = first > 0 ? last / first : 0.0;
  bool decreasing = strictly_decreasing(s.tail_v);

  double tail_max = 0, head_max = 0;
  for (double v : s.tail_v) tail_max = std::max(tail_max, std::abs(v));
  for (std::size_t i = 0; i < s.values.size() && i < kTail; ++i)
    head_max = std::max(head_max, std::abs(s.values[i]));

  if (decreasing && (last < 1e-3 || full_decay <= 0.5))
    return {Verdict::Holds, "decreasing with clear decay"};
  if (tail_max < 1e-3 && head_max > 0 && tail_max <= 0.5 * head_max)
    return {Verdict::Holds, "oscillating under a collapsing envelope"};
  if (last >= 1e-2 && (!decreasing || full_decay >= 0.9))
    return {Verdict::Fails, "bounded away from 0 along the grid"};
  return {Verdict::Inconclusive, "no clear decay on this grid"};
}

}  // namespace

ClassVerdict check_sublinear(const expr::FunctionSpec& f) {
  ClassVerdict cv;
  cv.class_name = "SL";
  auto q = [&](double x) {
    double a = safe(f.value, x);
    return std::abs(a / x);
  };
  TailStats s = sample(q, grid_for(f));
  if (!s.ok) {
    cv.reason = "too few finite samples";
    return cv;
  }
  DecayCall call = decays_to_zero(s);
  cv.verdict = call.verdict;
  cv.reason = "|a(x)/x|: " + call.reason;
  push_witness(cv, s.grid, s.values);
  return cv;
}

namespace {

// condition (i) of a Fejer function: a' monotone with |a'| -> 0
Verdict derivative_to_zero_monotone(const expr::FunctionSpec& f,
                                    std::span<const double> grid, std::string& why) {
  TailStats d2s = sample([&](double x) { return safe(f.deriv2, x); }, grid);
  TailStats d1s = sample([&](double x) { return std::abs(safe(f.deriv1, x)); }, grid);
  if (!d2s.ok || !d1s.ok) {
    why = "too few finite samples";
    return Verdict::Inconclusive;
  }
  bool sign_const = std::all_of(d2s.tail_v.begin(), d2s.tail_v.end(),
                                [](double v) { return v > 0; }) ||
                    std::all_of(d2s.tail_v.begin(), d2s.tail_v.end(),
                                [](double v) { return v < 0; });
  bool dec = strictly_decreasing(d1s.tail_v);
  double last = d1s.tail_v.back();
  double decay = d1s.values.front() > 0 ? last / d1s.values.front() : 0.0;
  if (sign_const && dec && (last < 1e-3 || decay <= 0.5)) {
    why = "a' monotone on the tail, |a'| -> 0";
    return Verdict::Holds;
  }
  if (!sign_const) {
    why = "a'' changes sign on the tail";
    return Verdict::Fails;
  }
  if (dec && last >= 1e-2 && decay >= 0.9) {
    why = "|a'| stays bounded away from 0";
    return Verdict::Fails;
  }
  if (!dec && last >= 1e-2) {
    why = "|a'| not decreasing on the tail";
    return Verdict::Fails;
  }
  why = "monotone decay of a' not resolved on this grid";
  return Verdict::Inconclusive;
}

}  // namespace

ClassVerdict check_fejer(const expr::FunctionSpec& f) {
  ClassVerdict cv;
  cv.class_name = "F";
  auto grid = grid_for(f);

  std::string why1;
  Verdict c1 = derivative_to_zero_monotone(f, grid, why1);

  // condition (ii): x |a'(x)| -> infinity
  TailStats xs = sample([&](double x) { return x * std::abs(safe(f.deriv1, x)); }, grid);
  Verdict c2 = Verdict::Inconclusive;
  std::string why2 = "growth of x|a'| not resolved";
  if (xs.ok) {
    bool inc = strictly_increasing(xs.tail_v);
    double growth = xs.values.front() > 0 ? xs.values.back() / xs.values.front() : 0.0;
    double tail_max = *std::max_element(xs.tail_v.begin(), xs.tail_v.end());
    double head_max = 0;
    for (std::size_t i = 0; i < xs.values.size() && i < kTail; ++i)
      head_max = std::max(head_max, xs.values[i]);
    if (inc && growth >= 4.0) {
      c2 = Verdict::Holds;
      why2 = "x|a'| increasing without a ceiling";
    } else if (!inc && tail_max <= 2.0 * head_max) {
      c2 = Verdict::Fails;
      why2 = "x|a'| bounded";
    }
    push_witness(cv, xs.grid, xs.values);
  }

  if (c1 == Verdict::Holds && c2 == Verdict::Holds) cv.verdict = Verdict::Holds;
  else if (c1 == Verdict::Fails || c2 == Verdict::Fails) cv.verdict = Verdict::Fails;
  cv.reason = "(i) " + why1 + "; (ii) " + why2;
  return cv;
}

ClassVerdict check_T(const expr::FunctionSpec& f) {
  ClassVerdict cv;
  cv.class_name = "T";
  RatioProfile prof = ratio_profile(f);
  LimitEstimate l1 = estimate_limit(prof.r1);
  LimitEstimate l2 = estimate_limit(prof.r2);
  LimitEstimate l3 = estimate_limit(prof.r3);
  push_witness(cv, prof.grid, prof.r1);

  if (l1.oscillating) {
    cv.verdict = Verdict::Fails;
    cv.reason = "ratio oscillates, no limit";
    return cv;
  }
  if (!l1.has_limit) {
    cv.reason = "x a'/a does not stabilize on this grid";
    return cv;
  }
  cv.estimated_limit = l1.value;

  constexpr double kPositive = 1e-2;
  if (l1.value < kPositive) {
    cv.verdict = Verdict::Fails;
    cv.reason = "ratio limit below (0,1)";
    return cv;
  }
  if (l1.value > 1.0 + 1e-3) {
    cv.verdict = Verdict::Fails;
    cv.reason = "ratio limit above 1";
    return cv;
  }

  bool near_one = std::abs(l1.value - 1.0) <= 1e-3;
  bool interior = l1.value >= kPositive && l1.value <= 1.0 - 1e-3;
  if (near_one) {
    std::string why;
    Verdict mono = derivative_to_zero_monotone(f, grid_for(f), why);
    if (mono != Verdict::Holds) {
      cv.verdict = mono == Verdict::Fails ? Verdict::Fails : Verdict::Inconclusive;
      cv.reason = "ratio limit 1 but " + why;
      return cv;
    }
  } else if (!interior) {
    cv.reason = "ratio limit too close to 1 to call";
    return cv;
  }

  if (!l2.has_limit || !l3.has_limit) {
    cv.reason = l2.oscillating || l3.oscillating
                    ? "higher ratio oscillates"
                    : "higher ratios do not stabilize";
    if (l2.oscillating || l3.oscillating) cv.verdict = Verdict::Fails;
    return cv;
  }
  cv.verdict = Verdict::Holds;
  cv.reason = "x a'/a stabilizes inside (0,1]";
  return cv;
}

ClassVerdict check_Dk(const expr::FunctionSpec& g, int k) {
  ClassVerdict cv;
  cv.class_name = "D" + std::to_string(k);
  auto grid = grid_for(g);
  const auto& num = deriv_of(g, k + 1);
  const auto& den = deriv_of(g, k);

  std::vector<double> xs, qs;
  for (double x : grid) {
    double d = safe(den, x);
    if (!std::isfinite(d) || d == 0.0) continue;
    double sup = 0.0;
    bool any = false;
    for (int j = 0; j <= 20; ++j) {
      double h = -1.0 + j * 0.1;
      double v = safe(num, x + h);
      if (std::isfinite(v)) {
        sup = std::max(sup, std::abs(v));
        any = true;
      } else {
        sup = std::numeric_limits<double>::infinity();
        any = true;
        break;
      }
    }
    if (!any) continue;
    xs.push_back(x);
    qs.push_back(sup / std::abs(d));
  }
  push_witness(cv, xs, qs);

  // an overflowing sup is already evidence of unboundedness
  if (std::any_of(qs.begin(), qs.end(), [](double q) { return !std::isfinite(q); })) {
    cv.verdict = Verdict::Fails;
    cv.reason = "translated derivative ratio overflows along the grid";
    return cv;
  }
  if (qs.size() < 2) {
    cv.reason = "too few finite samples";
    return cv;
  }
  // violent growth before the function leaves binary64 range
  if (qs.size() < 6) {
    if (qs.back() >= 10.0 * qs.front() && qs.back() > 1e3) {
      cv.verdict = Verdict::Fails;
      cv.reason = "translated derivative ratio grows without bound";
    } else {
      cv.reason = "too few finite samples";
    }
    return cv;
  }

  std::size_t tail_n = std::min<std::size_t>(kTail, qs.size() - 2);
  std::size_t tail_start = qs.size() - tail_n;
  double tail_max = 0, pre_max = 0;
  for (std::size_t i = 0; i < qs.size(); ++i)
    (i < tail_start ? pre_max : tail_max) =
        std::max(i < tail_start ? pre_max : tail_max, qs[i]);

  LimitEstimate le = estimate_limit(qs);
  if (le.has_limit) cv.estimated_limit = le.value;

  bool tail_grows = true;
  for (std::size_t i = tail_start; i + 1 < qs.size(); ++i)
    if (!(qs[i + 1] > qs[i])) tail_grows = false;
  if (tail_grows && tail_max >= 10.0 * pre_max) {
    cv.verdict = Verdict::Fails;
    cv.reason = "translated derivative ratio grows without bound";
    return cv;
  }
  if (tail_max <= std::max(2.0 * pre_max, 1e-12)) {
    cv.verdict = Verdict::Holds;
    cv.reason = "ratio stays under a stable ceiling";
    return cv;
  }
  cv.reason = "ceiling not stable on this grid";
  return cv;
}

ClassVerdict check_Mk(const expr::FunctionSpec& g, int k) {
  ClassVerdict cv;
  cv.class_name = "M" + std::to_string(k);
  auto grid = grid_for(g);
  const auto& d = deriv_of(g, k + 1);
  TailStats s = sample([&](double x) { return safe(d, x); }, grid);
  if (!s.ok) {
    cv.reason = "too few finite samples";
    return cv;
  }
  push_witness(cv, s.grid, s.values);
  bool all_pos = std::all_of(s.tail_v.begin(), s.tail_v.end(), [](double v) { return v > 0; });
  bool all_neg = std::all_of(s.tail_v.begin(), s.tail_v.end(), [](double v) { return v < 0; });
  if (all_pos || all_neg) {
    cv.verdict = Verdict::Holds;
    cv.reason = "derivative sign constant on the tail";
    return cv;
  }
  double scale = 0;
  for (double v : s.tail_v) scale = std::max(scale, std::abs(v));
  int pos = 0, neg = 0;
  for (double v : s.tail_v) {
    if (v > 1e-9 * scale) ++pos;
    if (v < -1e-9 * scale) ++neg;
  }
  if (pos > 0 && neg > 0) {
    cv.verdict = Verdict::Fails;
    cv.reason = "derivative changes sign on the tail";
  } else {
    cv.reason = "derivative sign not resolved";
  }
  return cv;
}

expr::FunctionSpec compose_inverse(const expr::FunctionSpec& f) {
  if (f.monotone_hint == expr::Monotone::Unknown)
    throw expr::RootFindError("cannot invert '" + f.name + "': no monotone direction");
  auto base = std::make_shared<expr::FunctionSpec>(f);
  expr::FunctionSpec inv;
  inv.name = "inverse(" + f.name + ")";
  inv.inverse_of = base;
  inv.monotone_hint = f.monotone_hint;
  inv.domain_start = safe(f.value, f.domain_start + 1.0);
  if (!std::isfinite(inv.domain_start)) inv.domain_start = 0.0;

  auto root = [base](double y) { return expr::inverse_eval(*base, y); };
  inv.value = root;
  inv.deriv1 = [base, root](double y) {
    double x = root(y);
    return 1.0 / base->deriv1(x);
  };
  inv.deriv2 = [base, root](double y) {
    double x = root(y);
    double d1 = base->deriv1(x);
    return -base->deriv2(x) / (d1 * d1 * d1);
  };
  inv.deriv3 = [base, root](double y) {
    double x = root(y);
    double d1 = base->deriv1(x);
    double d2 = base->deriv2(x);
    double d3 = base->deriv3(x);
    return (3.0 * d2 * d2 - d1 * d3) / std::pow(d1, 5);
  };
  return inv;
}

expr::FunctionSpec reciprocal_derivative(const expr::FunctionSpec& f) {
  if (!f.ast_d1)
    throw expr::RootFindError("reciprocal derivative needs a symbolic spec");
  auto ast = expr::make_binary(expr::NodeKind::Div, expr::constant(1.0), f.ast_d1);
  return expr::make_function_from_ast(ast, "1/(" + f.name + ")'", f.domain_start);
}

ClassVerdict check_S(const expr::FunctionSpec& f) {
  ClassVerdict cv;
  cv.class_name = "S";

  std::vector<std::pair<std::string, Verdict>> parts;
  auto record = [&](const std::string& label, const ClassVerdict& sub) {
    parts.emplace_back(label, sub.verdict);
    return sub.verdict;
  };

  Verdict a_sl = record("a in SL", check_sublinear(f));

  Verdict rd_sl = Verdict::Inconclusive;
  try {
    rd_sl = record("1/a' in SL", check_sublinear(reciprocal_derivative(f)));
  } catch (const expr::RootFindError&) {
    parts.emplace_back("1/a' in SL", Verdict::Inconclusive);
  }

  Verdict m1 = Verdict::Inconclusive, d0 = Verdict::Inconclusive,
          d1 = Verdict::Inconclusive, d2 = Verdict::Inconclusive,
          m2 = Verdict::Inconclusive;
  try {
    expr::FunctionSpec inv = compose_inverse(f);
    m1 = record("a^-1 in M1", check_Mk(inv, 1));
    d0 = record("a^-1 in D0", check_Dk(inv, 0));
    d1 = record("a^-1 in D1", check_Dk(inv, 1));
    d2 = record("a^-1 in D2", check_Dk(inv, 2));
    m2 = record("a^-1 in M2", check_Mk(inv, 2));
  } catch (const expr::RootFindError&) {
    parts.emplace_back("a^-1", Verdict::Inconclusive);
  }

  bool tail_ok = (d2 == Verdict::Holds) || (m2 == Verdict::Holds);
  bool all_hold = a_sl == Verdict::Holds && rd_sl == Verdict::Holds &&
                  m1 == Verdict::Holds && d0 == Verdict::Holds &&
                  d1 == Verdict::Holds && tail_ok;
  bool any_fail = a_sl == Verdict::Fails || rd_sl == Verdict::Fails ||
                  m1 == Verdict::Fails || d0 == Verdict::Fails ||
                  d1 == Verdict::Fails ||
                  (d2 == Verdict::Fails && m2 == Verdict::Fails);

  if (all_hold) cv.verdict = Verdict::Holds;
  else if (any_fail) cv.verdict = Verdict::Fails;

  cv.reason.clear();
  for (const auto& [label, verdict] : parts) {
    if (!cv.reason.empty()) cv.reason += ", ";
    cv.reason += label + "=" + to_string(verdict);
  }
  return cv;
}

TranslatedDerivativeReport translated_derivative_bound(const expr::FunctionSpec& f,
                                                       double alpha, double beta,
                                                       double H) {
  TranslatedDerivativeReport rep;
  auto grid = grid_for(f);
  RatioProfile prof = ratio_profile(f, grid);
  auto tail = finite_tail(prof.r1, kTail);
  rep.precondition_ok =
      !tail.empty() && std::all_of(tail.begin(), tail.end(), [&](double r) {
        return r >= alpha - 1e-9 && r <= beta + 1e-9;
      });

  double expo = beta - alpha - 1.0;
  std::vector<double> cs;
  std::size_t start = grid.size() > 2 * kTail ? grid.size() - 2 * kTail : 0;
  for (std::size_t i = start; i < grid.size(); ++i) {
    double x = grid[i];
    double a = safe(f.value, x);
    if (!std::isfinite(a) || a == 0.0) continue;
    double sup = 0;
    for (int j = 0; j <= 20; ++j) {
      double h = -H + j * (2.0 * H / 20.0);
      double d = safe(f.deriv1, x + h);
      if (std::isfinite(d)) sup = std::max(sup, std::abs(d));
    }
    double c = (sup / std::abs(a)) / std::pow(x, expo);
    rep.samples.emplace_back(x, c);
    cs.push_back(c);
  }
  if (cs.size() >= 4) {
    rep.empirical_constant = *std::max_element(cs.begin(), cs.end());
    double tail_max = 0, head_max = 0;
    for (std::size_t i = 0; i < cs.size(); ++i)
      (i < cs.size() / 2 ? head_max : tail_max) = std::max(
          i < cs.size() / 2 ? head_max : tail_max, cs[i]);
    rep.stable = std::isfinite(rep.empirical_constant) &&
                 tail_max <= std::max(2.0 * head_max, 1e-12);
  }
  return rep;
}

TranslateRatioReport translate_ratio_bound(const expr::FunctionSpec& f, double H) {
  TranslateRatioReport rep;
  auto grid = grid_for(f);
  std::vector<double> ms;
  std::size_t start = grid.size() > 2 * kTail ? grid.size() - 2 * kTail : 0;
  for (std::size_t i = start; i < grid.size(); ++i) {
    double x = grid[i];
    double a = safe(f.value, x);
    if (!std::isfinite(a) || a == 0.0) continue;
    double m = 0;
    bool blown = false;
    for (int j = 0; j <= 20; ++j) {
      double rho = -H + j * (2.0 * H / 20.0);
      double v = safe(f.value, x + rho);
      if (!std::isfinite(v)) {
        blown = true;
        break;
      }
      m = std::max(m, std::abs(v / a));
    }
    if (blown) {
      rep.samples.emplace_back(x, std::numeric_limits<double>::infinity());
      ms.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    rep.samples.emplace_back(x, m);
    ms.push_back(m);
  }
  if (ms.size() >= 4) {
    rep.ceiling = *std::max_element(ms.begin(), ms.end());
    double tail_max = 0, head_max = 0;
    for (std::size_t i = 0; i < ms.size(); ++i)
      (i < ms.size() / 2 ? head_max : tail_max) = std::max(
          i < ms.size() / 2 ? head_max : tail_max, ms[i]);
    rep.bounded = std::isfinite(rep.ceiling) && tail_max <= std::max(2.0 * head_max, 1e-12);
  }
  return rep;
}

ClassifyResult classify(const expr::FunctionSpec& f, std::span<const std::string> classes) {
  ClassifyResult res;
  res.function = f.name;
  for (const std::string& c : classes) {
    if (c == "SL") res.verdicts.push_back(check_sublinear(f));
    else if (c == "F") res.verdicts.push_back(check_fejer(f));
    else if (c == "T") res.verdicts.push_back(check_T(f));
    else if (c == "S") res.verdicts.push_back(check_S(f));
    else if (c.size() == 2 && c[0] == 'D' && c[1] >= '0' && c[1] <= '2')
      res.verdicts.push_back(check_Dk(f, c[1] - '0'));
    else if (c.size() == 2 && c[0] == 'M' && c[1] >= '0' && c[1] <= '2')
      res.verdicts.push_back(check_Mk(f, c[1] - '0'));
    else {
      ClassVerdict cv;
      cv.class_name = c;
      cv.reason = "unknown class";
      res.verdicts.push_back(cv);
    }
  }
  return res;
}

}  // namespace eal::funclass
