#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "eal/dd.hpp"
#include "eal/expr.hpp"
#include "eal/systems.hpp"

namespace eal::engine {

using Complex = systems::Complex;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SublinearIterate {
  expr::FunctionSpec f;
};

struct LinearIterate {
  bool is_rational = false;
  systems::Rational k{};  // slope p/q when rational
  DD gamma{};             // slope when irrational
  DD ell{};               // offset
};

// Floor sequence [a(n)]. Below the function's domain half-line the floor is
// emitted as 0; a finite prefix moves a Cesaro average by O(1/N) only.
struct IterateSequence {
  std::variant<SublinearIterate, LinearIterate> v;

  IterateSequence() : v(LinearIterate{true, {1, 1}, DD(1.0), DD(0.0)}) {}
  IterateSequence(SublinearIterate s) : v(std::move(s)) {}
  IterateSequence(LinearIterate l) : v(std::move(l)) {}

  static IterateSequence sublinear(expr::FunctionSpec f);
  static IterateSequence linear_rational(std::int64_t p, std::int64_t q, DD ell);
  static IterateSequence linear_irrational(DD gamma, DD ell);
  static IterateSequence power(double c);  // n^c sugar

  std::int64_t floor_at(std::int64_t n) const;
  // a(n) as a real (dd for linear), used by growth-order checks
  double value_at(double n) const;
  bool is_linear() const { return std::holds_alternative<LinearIterate>(v); }
};

std::vector<std::int64_t> floor_iterates(const IterateSequence& a, std::int64_t N);

struct Track {
  systems::SystemSpec system;
  systems::Observable observable;
  systems::PointState start;
  IterateSequence iterate;
};

struct ExperimentSpec {
  std::vector<Track> tracks;               // iterate order fastest-first
  std::vector<std::int64_t> checkpoints;   // ascending
  std::int64_t n_max = 10'000'000;

  // Checks a_{i+1} < a_i in growth (and derivatives when all sublinear)
  // on a grid; violations are configuration errors.
  void validate() const;
};

// Fixed-block compensated summation: blocks of 4096, Kahan inside a block,
// pairwise over block sums in index order. The reduction order never
// depends on the worker count, so results are bit-reproducible.
inline constexpr std::int64_t kBlock = 4096;

Complex pairwise_sum(std::span<Complex> block_sums);

// Average of the orbit products over n < N. `workers` <= 0 picks the
// OpenMP default; the result is identical for every worker count.
Complex multiple_average(const ExperimentSpec& spec, std::int64_t N, int workers = 0);

// Single-threaded reference implementation, kept for testing; must agree
// bit for bit with the parallel kernel.
Complex multiple_average_serial(const ExperimentSpec& spec, std::int64_t N);

struct AverageTrace {
  std::vector<std::int64_t> checkpoints;
  std::vector<Complex> values;
  std::vector<double> cauchy_defects;  // |A_{k+1} - A_k|
};

// Checkpointed averages in one pass over the orbit (each term evaluated
// once; only partial blocks at checkpoint boundaries are replayed).
AverageTrace trace(const ExperimentSpec& spec, int workers = 0);

std::vector<std::int64_t> doubling_checkpoints(std::int64_t start, std::int64_t n_max);

struct BoxKey {
  std::vector<std::int64_t> b;
  bool operator<(const BoxKey& o) const { return b < o.b; }
  bool operator==(const BoxKey& o) const { return b == o.b; }
};

struct OccupancyTable {
  std::map<BoxKey, std::int64_t> counts;
  std::int64_t total = 0;  // equals the number of n scanned
  std::int64_t N = 0;

  std::int64_t at(const BoxKey& k) const;
};

OccupancyTable occupancy(std::span<const IterateSequence> iterates, std::int64_t N);

// Predicted interval endpoints min/max of {a^{-1}(b), a^{-1}(b+1)}.
struct PredictedBox {
  double lo, hi;
};
PredictedBox predicted_interval(const IterateSequence& a, std::int64_t b);

// The three magnitudes of the occupancy-difference split between a box
// column and its shift by one in the first coordinate: matched boxes,
// appearing boxes, disappearing boxes, each divided by N.
struct TermDecomposition {
  double matched = 0;
  double appearing = 0;
  double disappearing = 0;
};

TermDecomposition term_decomposition(std::span<const IterateSequence> iterates,
                                     std::int64_t N);

// |avg g(orbit) - avg g(T_1^r x orbit shifted in the first coordinate)|.
// r defaults to 1, or to p when the first iterate is linear rational p/q.
double invariance_defect(const ExperimentSpec& spec, std::int64_t N,
                         const systems::Observable& g, int workers = 0,
                         std::int64_t r_override = 0);

std::int64_t default_invariance_power(const ExperimentSpec& spec);

// m = [n gamma + ell] for some integer n iff {(m-ell)/gamma} in (1-1/gamma, 1).
bool hits_linear_floor(DD gamma, DD ell, std::int64_t m);

// Star discrepancy of a finite point set on the circle (exact, via sort).
double star_discrepancy(std::vector<double> points);

}  // namespace eal::engine
