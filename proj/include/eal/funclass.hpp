#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eal/expr.hpp"

namespace eal::funclass {

// Geometric evaluation grid x0 * r^k. Default x0=10, r=10^(1/4), up to 1e12;
// past that, finite-difference cancellation in binary64 is untrusted.
std::vector<double> default_grid(double x0 = 10.0, double ratio_exponent = 0.25,
                                 double x_max = 1e12);

// Logarithmic-derivative ratios x a'/a, x a''/a', x a'''/a'' along a grid.
// Non-finite entries stay as NaN; they are flagged, not fatal.
struct RatioProfile {
  std::vector<double> grid;
  std::vector<double> r1, r2, r3;
};

RatioProfile ratio_profile(const expr::FunctionSpec& f,
                           std::span<const double> grid = {});

enum class Verdict { Holds, Fails, Inconclusive };

const char* to_string(Verdict v);

struct ClassVerdict {
  std::string class_name;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
  std::vector<std::pair<double, double>> witness;  // (x, value) samples
  std::optional<double> estimated_limit;
};

// Tail-limit detection: a limit L is accepted when extrapolation fits
// (harmonic and Aitken models over sliding windows of the last six finite
// values) agree to 1e-3, or the tail is flat to 1e-3 outright.
struct LimitEstimate {
  bool has_limit = false;
  double value = 0.0;
  double tail_spread = 0.0;
  bool oscillating = false;  // deltas change sign with spread >= 1e-2
};

LimitEstimate estimate_limit(std::span<const double> values);

ClassVerdict check_sublinear(const expr::FunctionSpec& f);
ClassVerdict check_fejer(const expr::FunctionSpec& f);
ClassVerdict check_T(const expr::FunctionSpec& f);
ClassVerdict check_Dk(const expr::FunctionSpec& g, int k);
ClassVerdict check_Mk(const expr::FunctionSpec& g, int k);
ClassVerdict check_S(const expr::FunctionSpec& f);

// FunctionSpec view of f^{-1}: eval falls back to root finding, derivatives
// come from the inverse-function rules applied to f's derivatives.
expr::FunctionSpec compose_inverse(const expr::FunctionSpec& f);

// The reciprocal-derivative spec 1/a', built symbolically.
expr::FunctionSpec reciprocal_derivative(const expr::FunctionSpec& f);

// sup_{|h|<=H} |a'(x+h)/a(x)| measured against x^(beta-alpha-1).
struct TranslatedDerivativeReport {
  bool precondition_ok = false;   // alpha <= x a'/a <= beta on the tail
  double empirical_constant = 0.0;
  bool stable = false;
  std::vector<std::pair<double, double>> samples;  // (x, normalized sup)
};

TranslatedDerivativeReport translated_derivative_bound(const expr::FunctionSpec& f,
                                                       double alpha, double beta,
                                                       double H);

// max over rho in [-H,H] and tail x of |a(x+rho)/a(x)|.
struct TranslateRatioReport {
  double ceiling = 0.0;
  bool bounded = false;
  std::vector<std::pair<double, double>> samples;  // (x, max ratio over rho)
};

TranslateRatioReport translate_ratio_bound(const expr::FunctionSpec& f, double H);

struct ClassifyResult {
  std::string function;
  std::vector<ClassVerdict> verdicts;
};

// Runs the requested checks ("SL","F","T","S","D0".."D2","M0".."M2").
ClassifyResult classify(const expr::FunctionSpec& f,
                        std::span<const std::string> classes);

}  // namespace eal::funclass
