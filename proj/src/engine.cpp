#include "eal/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eal::engine {

IterateSequence IterateSequence::sublinear(expr::FunctionSpec f) {
  return IterateSequence(SublinearIterate{std::move(f)});
}

IterateSequence IterateSequence::linear_rational(std::int64_t p, std::int64_t q, DD ell) {
  systems::Rational r = systems::reduce(p, q);
  LinearIterate l;
  l.is_rational = true;
  l.k = r;
  l.gamma = dd_div(DD(static_cast<double>(r.p)), DD(static_cast<double>(r.q)));
  l.ell = ell;
  return IterateSequence(l);
}

IterateSequence IterateSequence::linear_irrational(DD gamma, DD ell) {
  LinearIterate l;
  l.gamma = gamma;
  l.ell = ell;
  return IterateSequence(l);
}

IterateSequence IterateSequence::power(double c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "x^%.17g", c);
  return sublinear(expr::make_function(buf));
}

std::int64_t IterateSequence::floor_at(std::int64_t n) const {
  if (const auto* s = std::get_if<SublinearIterate>(&v)) {
    if (static_cast<double>(n) <= s->f.domain_start) return 0;
    double a = s->f.value(static_cast<double>(n));  // domain errors are bug guards
    return static_cast<std::int64_t>(std::floor(a));
  }
  const auto& l = std::get<LinearIterate>(v);
  if (l.is_rational) {
    // [p n / q + ell] = w + [r/q + ell], exact integer split
    __int128 num = static_cast<__int128>(l.k.p) * n;
    __int128 q = l.k.q;
    __int128 w = num >= 0 ? num / q : -((-num + q - 1) / q);
    auto r = static_cast<std::int64_t>(num - w * q);  // 0 <= r < q
    DD frac_part = dd_add(dd_div(DD(static_cast<double>(r)), DD(static_cast<double>(l.k.q))), l.ell);
    return static_cast<std::int64_t>(w) + dd_floor(frac_part);
  }
  return dd_floor(dd_add(dd_mul(l.gamma, static_cast<double>(n)), l.ell));
}

double IterateSequence::value_at(double n) const {
  if (const auto* s = std::get_if<SublinearIterate>(&v)) {
    if (n <= s->f.domain_start) return 0.0;
    return s->f.value(n);
  }
  const auto& l = std::get<LinearIterate>(v);
  return l.gamma.to_double() * n + l.ell.to_double();
}

std::vector<std::int64_t> floor_iterates(const IterateSequence& a, std::int64_t N) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(N));
  for (std::int64_t n = 0; n < N; ++n) out[static_cast<std::size_t>(n)] = a.floor_at(n);
  return out;
}

// --------------------------------------------------------------- validate

namespace {

bool ratio_vanishes(const std::vector<double>& r) {
  if (r.size() < 10) return false;
  for (std::size_t i = r.size() - 8; i + 1 < r.size(); ++i)
    if (!(r[i + 1] < r[i])) return false;
  double decay = r.front() > 0 ? r.back() / r.front() : 0.0;
  return r.back() < 1e-3 || decay <= 0.5;
}

std::vector<double> growth_grid() {
  std::vector<double> g;
  for (double x = 100.0; x <= 1.01e7; x *= std::pow(10.0, 0.25)) g.push_back(x);
  return g;
}

double deriv_at(const IterateSequence& it, double n) {
  if (const auto* s = std::get_if<SublinearIterate>(&it.v)) return s->f.deriv1(n);
  return std::get<LinearIterate>(it.v).gamma.to_double();
}

}  // namespace

void ExperimentSpec::validate() const {
  if (tracks.empty()) throw ConfigError("experiment needs at least one track");
  for (std::size_t i = 0; i + 1 < tracks.size(); ++i) {
    const IterateSequence& fast = tracks[i].iterate;
    const IterateSequence& slow = tracks[i + 1].iterate;
    if (slow.is_linear())
      throw ConfigError("only the fastest iterate may be linear");
    std::vector<double> ratio, dratio;
    for (double n : growth_grid()) {
      double a1 = fast.value_at(n), a2 = slow.value_at(n);
      if (std::isfinite(a1) && std::isfinite(a2) && a1 != 0.0)
        ratio.push_back(std::abs(a2 / a1));
      if (!fast.is_linear()) {
        double d1 = deriv_at(fast, n), d2 = deriv_at(slow, n);
        if (std::isfinite(d1) && std::isfinite(d2) && d1 != 0.0)
          dratio.push_back(std::abs(d2 / d1));
      }
    }
    if (!ratio_vanishes(ratio))
      throw ConfigError("iterate growth order violated between positions " +
                        std::to_string(i) + " and " + std::to_string(i + 1));
    if (!fast.is_linear() && !ratio_vanishes(dratio))
      throw ConfigError("iterate derivative growth order violated between positions " +
                        std::to_string(i) + " and " + std::to_string(i + 1));
  }
  for (std::size_t i = 0; i + 1 < checkpoints.size(); ++i)
    if (checkpoints[i] >= checkpoints[i + 1])
      throw ConfigError("checkpoints must be strictly increasing");
  if (!checkpoints.empty() && checkpoints.back() > n_max)
    throw ConfigError("checkpoint beyond the n_max budget");
}

// ------------------------------------------------------------- summation

Complex pairwise_sum(std::span<Complex> v) {
  if (v.empty()) return {0.0, 0.0};
  std::size_t m = v.size();
  while (m > 1) {
    std::size_t half = m / 2;
    for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
    if (m % 2) {
      v[half] = v[m - 1];
      m = half + 1;
    } else {
      m = half;
    }
  }
  return v[0];
}

namespace {

Complex orbit_term(const ExperimentSpec& spec, std::int64_t n) {
  Complex prod{1.0, 0.0};
  for (const Track& t : spec.tracks) {
    std::int64_t k = t.iterate.floor_at(n);
    systems::PointState p = systems::apply_power(t.system, k, t.start);
    prod *= t.observable.eval(p);
  }
  return prod;
}

// Kahan on re and im separately over one block
Complex block_sum(const ExperimentSpec& spec, std::int64_t n0, std::int64_t n1) {
  double sr = 0, cr = 0, si = 0, ci = 0;
  for (std::int64_t n = n0; n < n1; ++n) {
    Complex t = orbit_term(spec, n);
    double yr = t.real() - cr;
    double tr = sr + yr;
    cr = (tr - sr) - yr;
    sr = tr;
    double yi = t.imag() - ci;
    double ti = si + yi;
    ci = (ti - si) - yi;
    si = ti;
  }
  return {sr, si};
}

std::vector<Complex> all_block_sums(const ExperimentSpec& spec, std::int64_t N, int workers) {
  auto blocks = static_cast<std::int64_t>((N + kBlock - 1) / kBlock);
  std::vector<Complex> bs(static_cast<std::size_t>(blocks));
#ifdef _OPENMP
  int w = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(w)
  for (std::int64_t b = 0; b < blocks; ++b) {
    std::int64_t n0 = b * kBlock;
    bs[static_cast<std::size_t>(b)] = block_sum(spec, n0, std::min(n0 + kBlock, N));
  }
#else
  (void)workers;
  for (std::int64_t b = 0; b < blocks; ++b) {
    std::int64_t n0 = b * kBlock;
    bs[static_cast<std::size_t>(b)] = block_sum(spec, n0, std::min(n0 + kBlock, N));
  }
#endif
  return bs;
}

}  // namespace

Complex multiple_average(const ExperimentSpec& spec, std::int64_t N, int workers) {
  if (N <= 0) throw ConfigError("average needs N > 0");
  std::vector<Complex> bs = all_block_sums(spec, N, workers);
  return pairwise_sum(bs) / static_cast<double>(N);
}

Complex multiple_average_serial(const ExperimentSpec& spec, std::int64_t N) {
  if (N <= 0) throw ConfigError("average needs N > 0");
  auto blocks = static_cast<std::int64_t>((N + kBlock - 1) / kBlock);
  std::vector<Complex> bs(static_cast<std::size_t>(blocks));
  for (std::int64_t b = 0; b < blocks; ++b) {
    std::int64_t n0 = b * kBlock;
    bs[static_cast<std::size_t>(b)] = block_sum(spec, n0, std::min(n0 + kBlock, N));
  }
  return pairwise_sum(bs) / static_cast<double>(N);
}

std::vector<std::int64_t> doubling_checkpoints(std::int64_t start, std::int64_t n_max) {
  std::vector<std::int64_t> cps;
  for (std::int64_t c = start; c <= n_max; c *= 2) cps.push_back(c);
  return cps;
}

AverageTrace trace(const ExperimentSpec& spec, int workers) {
  AverageTrace tr;
  tr.checkpoints = spec.checkpoints.empty()
                       ? doubling_checkpoints(1000, spec.n_max)
                       : spec.checkpoints;
  if (tr.checkpoints.empty()) return tr;
  std::int64_t N = tr.checkpoints.back();
  std::vector<Complex> bs = all_block_sums(spec, N, workers);

  for (std::int64_t C : tr.checkpoints) {
    auto full = static_cast<std::size_t>(C / kBlock);
    std::vector<Complex> v(bs.begin(), bs.begin() + static_cast<std::ptrdiff_t>(full));
    if (C % kBlock)
      v.push_back(block_sum(spec, static_cast<std::int64_t>(full) * kBlock, C));
    tr.values.push_back(pairwise_sum(v) / static_cast<double>(C));
  }
  for (std::size_t i = 0; i + 1 < tr.values.size(); ++i)
    tr.cauchy_defects.push_back(std::abs(tr.values[i + 1] - tr.values[i]));
  return tr;
}

// -------------------------------------------------------------- occupancy

std::int64_t OccupancyTable::at(const BoxKey& k) const {
  auto it = counts.find(k);
  return it == counts.end() ? 0 : it->second;
}

OccupancyTable occupancy(std::span<const IterateSequence> iterates, std::int64_t N) {
  OccupancyTable table;
  table.N = N;
  BoxKey key;
  key.b.resize(iterates.size());
  for (std::int64_t n = 0; n < N; ++n) {
    for (std::size_t i = 0; i < iterates.size(); ++i) key.b[i] = iterates[i].floor_at(n);
    ++table.counts[key];
    ++table.total;
  }
  return table;
}

PredictedBox predicted_interval(const IterateSequence& a, std::int64_t b) {
  double x0, x1;
  if (const auto* s = std::get_if<SublinearIterate>(&a.v)) {
    x0 = expr::inverse_eval(s->f, static_cast<double>(b));
    x1 = expr::inverse_eval(s->f, static_cast<double>(b + 1));
  } else {
    const auto& l = std::get<LinearIterate>(a.v);
    double g = l.gamma.to_double(), e = l.ell.to_double();
    x0 = (static_cast<double>(b) - e) / g;
    x1 = (static_cast<double>(b + 1) - e) / g;
  }
  return {std::min(x0, x1), std::max(x0, x1)};
}

TermDecomposition term_decomposition(std::span<const IterateSequence> iterates,
                                     std::int64_t N) {
  OccupancyTable table = occupancy(iterates, N);
  TermDecomposition td;
  for (const auto& [key, count] : table.counts) {
    BoxKey prev = key;
    prev.b[0] -= 1;
    std::int64_t below = table.at(prev);
    if (below != 0)
      td.matched += static_cast<double>(std::llabs(count - below));
    else
      td.appearing += static_cast<double>(count);
    BoxKey next = key;
    next.b[0] += 1;
    if (table.at(next) == 0) td.disappearing += static_cast<double>(count);
  }
  double dn = static_cast<double>(N);
  td.matched /= dn;
  td.appearing /= dn;
  td.disappearing /= dn;
  return td;
}

// ---------------------------------------------------------- invariance

std::int64_t default_invariance_power(const ExperimentSpec& spec) {
  if (spec.tracks.empty()) return 1;
  const auto* l = std::get_if<LinearIterate>(&spec.tracks.front().iterate.v);
  if (l && l->is_rational) return l->k.p;
  return 1;
}

namespace {

struct DefectPair {
  Complex plain, shifted;
};

DefectPair defect_block(const ExperimentSpec& spec, const systems::Observable& g,
                        std::int64_t r, std::int64_t n0, std::int64_t n1) {
  const bool product = spec.tracks.size() > 1;
  double sr = 0, cr = 0, si = 0, ci = 0;
  double sr2 = 0, cr2 = 0, si2 = 0, ci2 = 0;
  auto add = [](double& s, double& c, double y) {
    double yy = y - c;
    double t = s + yy;
    c = (t - s) - yy;
    s = t;
  };
  for (std::int64_t n = n0; n < n1; ++n) {
    std::vector<systems::PointState> pts;
    pts.reserve(spec.tracks.size());
    for (const Track& t : spec.tracks)
      pts.push_back(systems::apply_power(t.system, t.iterate.floor_at(n), t.start));
    Complex v1, v2;
    if (product) {
      systems::PointState p = systems::PointState::product(pts);
      v1 = g.eval(p);
      p.parts[0] = systems::apply_power(spec.tracks[0].system, r, p.parts[0]);
      v2 = g.eval(p);
    } else {
      v1 = g.eval(pts[0]);
      v2 = g.eval(systems::apply_power(spec.tracks[0].system, r, pts[0]));
    }
    add(sr, cr, v1.real());
    add(si, ci, v1.imag());
    add(sr2, cr2, v2.real());
    add(si2, ci2, v2.imag());
  }
  return {{sr, si}, {sr2, si2}};
}

}  // namespace

double invariance_defect(const ExperimentSpec& spec, std::int64_t N,
                         const systems::Observable& g, int workers,
                         std::int64_t r_override) {
  std::int64_t r = r_override != 0 ? r_override : default_invariance_power(spec);
  auto blocks = static_cast<std::int64_t>((N + kBlock - 1) / kBlock);
  std::vector<Complex> plain(static_cast<std::size_t>(blocks));
  std::vector<Complex> shifted(static_cast<std::size_t>(blocks));
#ifdef _OPENMP
  int w = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(w)
#else
  (void)workers;
#endif
  for (std::int64_t b = 0; b < blocks; ++b) {
    std::int64_t n0 = b * kBlock;
    DefectPair dp = defect_block(spec, g, r, n0, std::min(n0 + kBlock, N));
    plain[static_cast<std::size_t>(b)] = dp.plain;
    shifted[static_cast<std::size_t>(b)] = dp.shifted;
  }
  Complex a1 = pairwise_sum(plain) / static_cast<double>(N);
  Complex a2 = pairwise_sum(shifted) / static_cast<double>(N);
  return std::abs(a1 - a2);
}

// -------------------------------------------------------------- diagnostics

bool hits_linear_floor(DD gamma, DD ell, std::int64_t m) {
  if (!(gamma.to_double() > 1.0))
    throw ConfigError("floor hit test needs gamma > 1");
  DD u = dd_div(dd_sub(DD(static_cast<double>(m)), ell), gamma);
  double fr = dd_frac(u);
  double lo = dd_sub(DD(1.0), dd_div(DD(1.0), gamma)).to_double();
  return fr > lo && fr < 1.0;
}

double star_discrepancy(std::vector<double> points) {
  if (points.empty()) return 1.0;
  std::sort(points.begin(), points.end());
  double N = static_cast<double>(points.size());
  double d = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double xi = points[i];
    double up = static_cast<double>(i + 1) / N - xi;
    double dn = xi - static_cast<double>(i) / N;
    d = std::max(d, std::max(up, dn));
  }
  return d;
}

}  // namespace eal::engine
