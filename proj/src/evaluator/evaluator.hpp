#pragma once

#include "common/real.hpp"
#include "modforms/eigenform.hpp"

#include <cmath>
#include <complex>

namespace cuspzero::eval {

using modforms::Eigenform;

// z = alpha + i y with alpha reduced into (-1/2, 1/2].
struct EvalPoint {
  double alpha = 0.0;
  double y = 1.0;
};

double normalize_alpha(double alpha);
EvalPoint make_point(double alpha, double y);

// exp(log_mag + i phase), with an absolute error bound exp(log_tail) in the same scaling.
struct ScaledComplex {
  double log_mag = -INFINITY;
  double phase = 0.0;
  double log_tail = -INFINITY;

  double tail_bound() const { return std::exp(log_tail); }
  bool nonzero_certified() const { return log_tail < log_mag; }
  std::complex<double> value() const { return std::polar(std::exp(log_mag), phase); }
};

enum class Tier { Auto, Double, Multi };

struct EvalOptions {
  Tier tier = Tier::Auto;
  // Sum only the stored coefficients and report the honest tail instead of failing.
  bool allow_truncation = false;
  // Precision of the multi tier; 0 means the eigenform's own precision.
  int multi_bits = 0;
};

// Constants that the asymptotic statements leave unspecified.
struct RegimeConfig {
  double window_low = 1.0 / (4 * M_PI);   // y >= window_low * sqrt(s log s)
  double window_high = 1.0 / (4 * M_PI);  // y < window_high * s
  double tail_constant = 10.0;            // windowed tail bound C s^(-delta)
  double beta1 = 1.0;                     // beta1 <= l
  double beta2 = 0.5;                     // l < beta2 sqrt(k / log k)
};

// Zero-free region: f has no zeros with y > zero_free_constant() * k.
inline double zero_free_constant() { return std::log(4.0) / (4 * M_PI); }

double log_I(double s, double y);
Real log_I(const Real& s, const Real& y);

// y_l(s) = (s - 1) / (4 pi l)
inline double ladder_y(double s, int l) { return (s - 1) / (4 * M_PI * l); }
// Continuous ladder coordinate t = (k - 1) / (4 pi y).
inline double ladder_t(double k, double y) { return (k - 1) / (4 * M_PI * y); }

// Sum of lambda(n) e(n alpha) I_s(2 pi n y), normalised by I_s(s'), s' = (s - 1) / 2.
ScaledComplex phi_full(const Eigenform& f, double s, EvalPoint pt, double rel_tol, const EvalOptions& opt = {});

// Same sum restricted to |2 pi n y - s'| <= sqrt(delta s log s) with Gaussian weights.
ScaledComplex phi_windowed(const Eigenform& f, double s, EvalPoint pt, double delta, const RegimeConfig& cfg = {});
bool in_window_regime(double s, double y, const RegimeConfig& cfg = {});

// Number of terms phi_full sums for this (s, y, rel_tol), capped at the stored coefficients.
int truncation_terms(const Eigenform& f, double s, double y, double rel_tol);

// f(alpha + i y) up to a positive factor depending on y only.
ScaledComplex f_value(const Eigenform& f, EvalPoint pt, double rel_tol, const EvalOptions& opt = {});

// e^(i k theta / 2) f(e^(i theta)) up to a positive factor; real valued on the unit circle.
ScaledComplex arc_value(const Eigenform& f, double theta, double rel_tol, const EvalOptions& opt = {});

// Real part of the normalised value with a rigorous error bound, both relative to exp(log_scale).
struct RealSample {
  double value = 0.0;
  double error = 0.0;
  double log_scale = 0.0;
  int tier_bits = 53;

  int certified_sign() const { return std::fabs(value) > error ? (value > 0 ? 1 : -1) : 0; }
};

// Real restriction on alpha = 0 / alpha = 1/2 lines (pt) or on the arc (theta).
RealSample real_on_line(const Eigenform& f, EvalPoint pt, const EvalOptions& opt);
RealSample real_on_arc(const Eigenform& f, double theta, const EvalOptions& opt);

// (1 / 2 pi i) f'/f.
std::complex<double> log_derivative(const Eigenform& f, EvalPoint pt, double rel_tol);

bool theorem2_eligible(int k, int l, const RegimeConfig& cfg = {});
// |phi_full(f, k, (alpha, y_l)) - lambda(l) e(alpha l)|, computed at the eigenform's precision.
double theorem2_residual(const Eigenform& f, int l, double alpha, double delta, const RegimeConfig& cfg = {});
// Same quantity without the eligibility check, at an arbitrary height.
double ladder_residual(const Eigenform& f, int l, double alpha, double y);

// phi_full(f, k + 2m, pt) / phi_full(f, k, pt) in unnormalised units.
std::complex<double> phi_shift_ratio(const Eigenform& f, int m, EvalPoint pt, double rel_tol);

}  // namespace cuspzero::eval
