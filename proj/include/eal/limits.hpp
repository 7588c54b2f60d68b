#pragma once

#include <complex>
#include <string>
#include <vector>

#include "eal/engine.hpp"
#include "eal/systems.hpp"

namespace eal::limits {

using Complex = systems::Complex;

struct OracleMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LimitPrediction {
  Complex value{0.0, 0.0};
  std::string provenance;
  int mode_range = 0;                              // trig-poly degree covered
  std::vector<std::pair<int, std::int64_t>> matches;  // mode k -> matched m
};

// Limit of the multiple average when every iterate is sublinear: the product
// of the per-factor invariant projections at the start points.
LimitPrediction predicted_limit_sublinear(const engine::ExperimentSpec& spec);

// exp(2 pi i m ell/gamma) * (exp(-2 pi i m/gamma) - 1) / (-2 pi i m/gamma);
// m = 0 gives 1, the continuous limit of the factor.
Complex fourier_coefficient(DD gamma, DD ell, std::int64_t m);

// Fastest iterate gamma n + ell with irrational gamma on a rotation:
// F(x1) times the trailing conditional-expectation product.
LimitPrediction predicted_limit_linear_irrational(const engine::ExperimentSpec& spec);

// Fastest iterate (p/q) n + ell: the averaged shifted conditional
// expectations over j = 0..q-1 times the trailing product.
LimitPrediction predicted_limit_linear_rational(const engine::ExperimentSpec& spec);

// The full series as a function of x, plus the matched-mode bookkeeping.
struct MeanErgodicLimit {
  systems::Observable observable;
  std::vector<std::pair<int, std::int64_t>> matches;
};

MeanErgodicLimit mean_ergodic_limit(const systems::SystemSpec& rotation, DD gamma,
                                    DD ell, const systems::TrigPoly& f);

enum class WindowNormalization { Printed, GammaScaled };

struct WindowOracleResult {
  Complex value{0.0, 0.0};
  WindowNormalization selected = WindowNormalization::GammaScaled;
  Complex printed{0.0, 0.0};
  Complex gamma_scaled{0.0, 0.0};
  double calibration_error = 0.0;  // |selected(1) - brute force(1)| on f == 1
  double cross_check_error = 0.0;  // |selected(f) - brute force(f)| at N = 1e5
};

// Window integral over [x + (ell-1)/gamma, x + ell/gamma] for the rotation
// T x = x + 1/gamma, in closed form for trig polynomials. Both printed and
// gamma-scaled normalizations are computed; a brute-force average on the
// constant observable selects the one that integrates to total mass 1, and
// the selected form is cross-checked against a brute-force average of f.
WindowOracleResult sliding_window_oracle(DD gamma, DD ell, const systems::TrigPoly& f,
                                         double x, std::int64_t calibration_N = 100000);

// Right-hand side of the suspension identity at ({ell}, T^[ell] x).
Complex suspension_limit(const systems::SystemSpec& base, DD gamma, DD ell,
                         const systems::TrigPoly& f, double x);

}  // namespace eal::limits
