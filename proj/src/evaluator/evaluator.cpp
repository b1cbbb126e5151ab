#include "evaluator/evaluator.hpp"

#include "common/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace cuspzero::eval {

namespace {

constexpr double kTwoPi = 2 * M_PI;
constexpr double kUnit = 0x1p-53;

struct Plan {
  double sp = 0;         // s' = (s - 1) / 2
  double log_scale = 0;  // M, the largest log term
  int n_terms = 0;       // N*
  double tail = 0;       // truncation bound relative to exp(M)
};

double log_term(double sp, double u) {
  // log I_s(u) - log I_s(s') = s' (log(1 + h) - h), h = (u - s') / s'.
  const double h = (u - sp) / sp;
  return sp * (std::log1p(h) - h);
}

Plan plan_sum(const Eigenform& f, double s, double y, double rel_tol, bool allow_truncation) {
  require(s > 1, "evaluator: s must exceed 1");
  require(y > 0, "evaluator: y must be positive");
  require(rel_tol > 0 && rel_tol < 1, "evaluator: rel_tol must lie in (0, 1)");
  Plan p;
  p.sp = (s - 1) / 2;
  const double peak = p.sp / (kTwoPi * y);
  double m = log_term(p.sp, kTwoPi * y);
  for (double c : {std::floor(peak), std::ceil(peak)})
    if (c >= 1) m = std::max(m, log_term(p.sp, kTwoPi * c * y));
  p.log_scale = m;

  auto env = [&](long n) { return std::log(static_cast<double>(n)) + log_term(p.sp, kTwoPi * n * y) - m; };
  auto ratio = [&](long n) {
    return std::exp((p.sp + 1) * std::log1p(1.0 / static_cast<double>(n)) - kTwoPi * y);
  };
  const long hard_cap = 50'000'000;
  int below = 0;
  long n = 1;
  for (;; ++n) {
    if (n > f.nterms) break;
    const double lt = env(n);
    if (n >= peak && lt < std::log(rel_tol / static_cast<double>(n)))
      ++below;
    else
      below = 0;
    if (below >= 8 && ratio(n + 1) <= 0.5) break;
    if (n > hard_cap) fail(ErrorKind::NumericFailure, "evaluator: truncation search did not terminate");
  }
  if (n > f.nterms) {
    if (!allow_truncation)
      fail(ErrorKind::InsufficientCoefficients,
           "evaluator: need more than " + std::to_string(f.nterms) + " coefficients for s=" + std::to_string(s) +
               " y=" + std::to_string(y));
    n = f.nterms;
  }
  p.n_terms = static_cast<int>(n);
  const double r = ratio(n + 1);
  p.tail = (n + 1 >= peak && r < 1) ? std::exp(env(n + 1)) / (1 - r) : INFINITY;
  return p;
}

// Exact fractional part of n * alpha, in [0, 1).
double frac_mul(long n, double alpha) {
  const double hi = static_cast<double>(n) * alpha;
  const double lo = std::fma(static_cast<double>(n), alpha, -hi);
  double fr = (hi - std::floor(hi)) + lo;
  fr -= std::floor(fr);
  return fr;
}

void unit_phase(double fr, double& c, double& s) {
  if (fr == 0.0) {
    c = 1, s = 0;
  } else if (fr == 0.5) {
    c = -1, s = 0;
  } else if (fr == 0.25) {
    c = 0, s = 1;
  } else if (fr == 0.75) {
    c = 0, s = -1;
  } else {
    c = std::cos(kTwoPi * fr);
    s = std::sin(kTwoPi * fr);
  }
}

struct Sum {
  double re = 0, im = 0;  // relative to exp(log_scale)
  double err = 0;         // rounding plus truncation, same scaling
  double abs_sum = 0;
  double log_scale = 0;
  int bits = 53;
};

Sum sum_double(const Eigenform& f, double alpha, double y, const Plan& p) {
  Sum out;
  out.log_scale = p.log_scale;
  double rounding = 0;
  for (long n = 1; n <= p.n_terms; ++n) {
    const double u = kTwoPi * static_cast<double>(n) * y;
    const double h = (u - p.sp) / p.sp;
    const double lt = p.sp * (std::log1p(h) - h) - p.log_scale;
    const double w = std::exp(lt);
    if (w == 0.0) continue;
    const double lam = f.lambdas_d[n];
    double c, sn;
    unit_phase(frac_mul(n, alpha), c, sn);
    out.re += lam * w * c;
    out.im += lam * w * sn;
    const double a = std::fabs(lam) * w;
    out.abs_sum += a;
    rounding += a * (4 * (p.sp * std::fabs(std::log1p(h)) + std::fabs(u - p.sp) + std::fabs(lt)) + 64);
  }
  out.err = kUnit * rounding + out.abs_sum * (p.n_terms + 8) * kUnit + p.tail;
  return out;
}

// Multi-precision version; alpha and y are given at working precision.
struct MultiSum {
  Real re, im;
  double err = 0;
  double abs_sum = 0;
  double log_scale = 0;
  int bits = 0;
};

MultiSum sum_multi(const Eigenform& f, const Real& alpha, const Real& y, const Plan& p, mpfr_prec_t bits) {
  MultiSum out{Real(bits), Real(bits)};
  out.log_scale = p.log_scale;
  out.bits = static_cast<int>(bits);
  const Real sp(p.sp, bits), m(p.log_scale, bits);
  const Real two_pi_y = const_pi(bits) * 2L * y;
  Real u(bits), h(bits), lt(bits), w(bits), fr(bits), ang(bits), c(bits), sn(bits), tmp(bits);
  double rounding = 0;
  const double unit = std::ldexp(1.0, -static_cast<int>(bits));
  const double lam_unit = std::ldexp(1.0, -(f.precision_bits - 8));
  for (long n = 1; n <= p.n_terms; ++n) {
    mpfr_mul_si(u.get(), two_pi_y.get(), n, MPFR_RNDN);
    mpfr_sub(h.get(), u.get(), sp.get(), MPFR_RNDN);
    mpfr_div(h.get(), h.get(), sp.get(), MPFR_RNDN);
    mpfr_log1p(lt.get(), h.get(), MPFR_RNDN);
    mpfr_sub(lt.get(), lt.get(), h.get(), MPFR_RNDN);
    mpfr_mul(lt.get(), lt.get(), sp.get(), MPFR_RNDN);
    mpfr_sub(lt.get(), lt.get(), m.get(), MPFR_RNDN);
    mpfr_exp(w.get(), lt.get(), MPFR_RNDN);
    if (w.is_zero()) continue;
    const Real& lam = f.lambdas[n];
    mpfr_mul_si(fr.get(), alpha.get(), n, MPFR_RNDN);
    mpfr_frac(fr.get(), fr.get(), MPFR_RNDN);
    if (fr.sign() < 0) mpfr_add_ui(fr.get(), fr.get(), 1, MPFR_RNDN);
    const double frd = fr.to_double();
    if (fr.is_zero() || mpfr_cmp_d(fr.get(), 0.5) == 0 || mpfr_cmp_d(fr.get(), 0.25) == 0 ||
        mpfr_cmp_d(fr.get(), 0.75) == 0) {
      double cd, sd;
      unit_phase(frd, cd, sd);
      mpfr_set_d(c.get(), cd, MPFR_RNDN);
      mpfr_set_d(sn.get(), sd, MPFR_RNDN);
    } else {
      mpfr_const_pi(ang.get(), MPFR_RNDN);
      mpfr_mul_2ui(ang.get(), ang.get(), 1, MPFR_RNDN);
      mpfr_mul(ang.get(), ang.get(), fr.get(), MPFR_RNDN);
      mpfr_sin_cos(sn.get(), c.get(), ang.get(), MPFR_RNDN);
    }
    mpfr_mul(w.get(), w.get(), lam.get(), MPFR_RNDN);
    mpfr_mul(tmp.get(), w.get(), c.get(), MPFR_RNDN);
    mpfr_add(out.re.get(), out.re.get(), tmp.get(), MPFR_RNDN);
    mpfr_mul(tmp.get(), w.get(), sn.get(), MPFR_RNDN);
    mpfr_add(out.im.get(), out.im.get(), tmp.get(), MPFR_RNDN);
    const double a = std::fabs(w.to_double());
    out.abs_sum += a;
    const double ld = std::fabs(lt.to_double());
    const double hd = h.to_double();
    rounding += a * (unit * (4 * (p.sp * std::fabs(std::log1p(hd)) + std::fabs(hd * p.sp) + ld) + 64) + lam_unit);
  }
  out.err = rounding + out.abs_sum * (p.n_terms + 8) * unit + p.tail;
  return out;
}

int resolve_bits(const Eigenform& f, double rel_tol, const EvalOptions& opt, bool& multi) {
  const int bits = opt.multi_bits > 0 ? opt.multi_bits : f.precision_bits;
  if (rel_tol < std::ldexp(1.0, -(std::min(bits, f.precision_bits) - 16)))
    fail(ErrorKind::UnreachableTolerance, "evaluator: rel_tol below the precision floor");
  multi = opt.tier == Tier::Multi || (opt.tier == Tier::Auto && rel_tol < 1e-13);
  return bits;
}

double log_abs(const Real& x) {
  if (x.is_zero()) return -INFINITY;
  long e = 0;
  double m = mpfr_get_d_2exp(&e, x.get(), MPFR_RNDN);
  return std::log(std::fabs(m)) + static_cast<double>(e) * M_LN2;
}

ScaledComplex to_scaled(double log_scale, double log_re_im_mag, double phase, double err) {
  ScaledComplex z;
  z.log_mag = log_scale + log_re_im_mag;
  z.phase = phase;
  z.log_tail = log_scale + std::log(err);
  return z;
}

ScaledComplex scaled_from(const Sum& s) {
  const double mag = std::hypot(s.re, s.im);
  return to_scaled(s.log_scale, std::log(mag), mag == 0 ? 0.0 : std::atan2(s.im, s.re), s.err);
}

ScaledComplex scaled_from(const MultiSum& s) {
  const double lr = log_abs(s.re), li = log_abs(s.im);
  const double big = std::max(lr, li);
  double lm = -INFINITY;
  if (big > -INFINITY) lm = big + 0.5 * std::log1p(std::exp(2 * (std::min(lr, li) - big)));
  const double phase = big == -INFINITY ? 0.0 : atan2(s.im, s.re).to_double();
  return to_scaled(s.log_scale, lm, phase, s.err);
}

double wrap_phase(double ph) {
  ph = std::remainder(ph, 2 * M_PI);
  if (ph <= -M_PI) ph += 2 * M_PI;
  return ph;
}

}  // namespace

double normalize_alpha(double alpha) {
  double a = alpha - std::ceil(alpha - 0.5);
  if (a <= -0.5) a += 1.0;
  return a;
}

EvalPoint make_point(double alpha, double y) {
  require(y > 0, "EvalPoint: y must be positive");
  return {normalize_alpha(alpha), y};
}

double log_I(double s, double y) {
  require(s > 1 && y > 0, "log_I: need s > 1 and y > 0");
  return (s - 1) / 2 * std::log(y) - y;
}

Real log_I(const Real& s, const Real& y) {
  require(s > Real(1L, s.precision()) && y.sign() > 0, "log_I: need s > 1 and y > 0");
  return (s - Real(1L, s.precision())) / 2L * log(y) - y;
}

ScaledComplex phi_full(const Eigenform& f, double s, EvalPoint pt, double rel_tol, const EvalOptions& opt) {
  pt = make_point(pt.alpha, pt.y);
  bool multi = false;
  const int bits = resolve_bits(f, rel_tol, opt, multi);
  const Plan p = plan_sum(f, s, pt.y, rel_tol, opt.allow_truncation);
  if (!multi) return scaled_from(sum_double(f, pt.alpha, pt.y, p));
  return scaled_from(sum_multi(f, Real(pt.alpha, bits), Real(pt.y, bits), p, bits));
}

int truncation_terms(const Eigenform& f, double s, double y, double rel_tol) {
  return plan_sum(f, s, y, rel_tol, true).n_terms;
}

ScaledComplex f_value(const Eigenform& f, EvalPoint pt, double rel_tol, const EvalOptions& opt) {
  return phi_full(f, f.weight, pt, rel_tol, opt);
}

RealSample real_on_line(const Eigenform& f, EvalPoint pt, const EvalOptions& opt) {
  pt = make_point(pt.alpha, pt.y);
  EvalOptions o = opt;
  o.allow_truncation = true;
  bool multi = o.tier == Tier::Multi;
  const int bits = o.multi_bits > 0 ? o.multi_bits : f.precision_bits;
  const double rel_tol = multi ? std::ldexp(1.0, -(std::min(bits, f.precision_bits) - 16)) : 1e-20;
  const Plan p = plan_sum(f, f.weight, pt.y, rel_tol, true);
  RealSample r;
  if (!multi) {
    Sum s = sum_double(f, pt.alpha, pt.y, p);
    r.value = s.re;
    r.error = s.err;
    r.log_scale = s.log_scale;
  } else {
    MultiSum s = sum_multi(f, Real(pt.alpha, bits), Real(pt.y, bits), p, bits);
    r.value = s.re.to_double();
    r.error = s.err;
    r.log_scale = s.log_scale;
    r.tier_bits = bits;
  }
  return r;
}

namespace {

struct ArcEval {
  RealSample real;
  ScaledComplex z;
};

ArcEval arc_eval(const Eigenform& f, double theta, double rel_tol, bool multi, int bits, bool allow_truncation) {
  require(theta > 0 && theta < M_PI, "arc evaluation: theta must lie in (0, pi)");
  ArcEval out;
  const double k = f.weight;
  if (!multi) {
    const double alpha = std::cos(theta), y = std::sin(theta);
    const Plan p = plan_sum(f, k, y, rel_tol, allow_truncation);
    Sum s = sum_double(f, normalize_alpha(alpha), y, p);
    const double rot = std::fmod(k * theta / 2, 2 * M_PI);
    const double c = std::cos(rot), sn = std::sin(rot);
    const double re = s.re * c - s.im * sn, im = s.re * sn + s.im * c;
    const double err = s.err + s.abs_sum * kUnit * (4 * k * theta + 16);
    out.real.value = re;
    out.real.error = err;
    out.real.log_scale = s.log_scale;
    const double mag = std::hypot(re, im);
    out.z = to_scaled(s.log_scale, std::log(mag), mag == 0 ? 0.0 : std::atan2(im, re), err);
    return out;
  }
  const Real th(theta, bits);
  const Real alpha = cos(th), y = sin(th);
  const Plan p = plan_sum(f, k, y.to_double(), rel_tol, allow_truncation);
  MultiSum s = sum_multi(f, alpha, y, p, bits);
  Real rot = th * static_cast<long>(f.weight) / 2L;
  const Real c = cos(rot), sn = sin(rot);
  MultiSum r{s.re * c - s.im * sn, s.re * sn + s.im * c};
  r.log_scale = s.log_scale;
  r.abs_sum = s.abs_sum;
  r.err = s.err + s.abs_sum * std::ldexp(1.0, -bits) * (4 * k * theta + 16);
  out.real.value = r.re.to_double();
  out.real.error = r.err;
  out.real.log_scale = r.log_scale;
  out.real.tier_bits = bits;
  out.z = scaled_from(r);
  return out;
}

}  // namespace

ScaledComplex arc_value(const Eigenform& f, double theta, double rel_tol, const EvalOptions& opt) {
  bool multi = false;
  const int bits = resolve_bits(f, rel_tol, opt, multi);
  return arc_eval(f, theta, rel_tol, multi, bits, opt.allow_truncation).z;
}

RealSample real_on_arc(const Eigenform& f, double theta, const EvalOptions& opt) {
  const bool multi = opt.tier == Tier::Multi;
  const int bits = opt.multi_bits > 0 ? opt.multi_bits : f.precision_bits;
  const double rel_tol = multi ? std::ldexp(1.0, -(std::min(bits, f.precision_bits) - 16)) : 1e-20;
  return arc_eval(f, theta, rel_tol, multi, bits, true).real;
}

bool in_window_regime(double s, double y, const RegimeConfig& cfg) {
  return y >= cfg.window_low * std::sqrt(s * std::log(s)) && y < cfg.window_high * s;
}

ScaledComplex phi_windowed(const Eigenform& f, double s, EvalPoint pt, double delta, const RegimeConfig& cfg) {
  pt = make_point(pt.alpha, pt.y);
  require(delta > 0 && delta < 2.0 / 3.0, "phi_windowed: delta must lie in (0, 2/3)");
  require(s > 1, "phi_windowed: s must exceed 1");
  if (!in_window_regime(s, pt.y, cfg))
    fail(ErrorKind::OutsideRegime, "phi_windowed: y=" + std::to_string(pt.y) + " outside the window regime");
  const double sp = (s - 1) / 2;
  const double b = std::sqrt(delta * s * std::log(s));
  const long lo = std::max(1L, static_cast<long>(std::ceil((sp - b) / (kTwoPi * pt.y))));
  const long hi = static_cast<long>(std::floor((sp + b) / (kTwoPi * pt.y)));
  if (hi > f.nterms) fail(ErrorKind::InsufficientCoefficients, "phi_windowed: window exceeds stored coefficients");
  double re = 0, im = 0;
  for (long n = lo; n <= hi; ++n) {
    const double h = kTwoPi * n * pt.y - sp;
    if (std::fabs(h) > b) continue;
    const double w = std::exp(-h * h / (2 * sp)) * f.lambdas_d[n];
    double c, sn;
    unit_phase(frac_mul(n, pt.alpha), c, sn);
    re += w * c;
    im += w * sn;
  }
  ScaledComplex z;
  const double mag = std::hypot(re, im);
  z.log_mag = std::log(mag);
  z.phase = mag == 0 ? 0.0 : std::atan2(im, re);
  z.log_tail = std::log(cfg.tail_constant) - delta * std::log(s);
  return z;
}

std::complex<double> log_derivative(const Eigenform& f, EvalPoint pt, double rel_tol) {
  pt = make_point(pt.alpha, pt.y);
  const double k = f.weight;
  const ScaledComplex lo = phi_full(f, k, pt, rel_tol);
  if (!lo.nonzero_certified())
    fail(ErrorKind::Indeterminate, "log_derivative: value not provably nonzero at this point");
  const ScaledComplex hi = phi_full(f, k + 2, pt, rel_tol);
  const double sp = (k - 1) / 2;
  // Undo the I_s(s') normalisations before taking the ratio.
  const double log_ratio = hi.log_mag - lo.log_mag + log_I(k + 2, sp + 1) - log_I(k, sp);
  return std::polar(std::exp(log_ratio) / (kTwoPi * pt.y), wrap_phase(hi.phase - lo.phase));
}

std::complex<double> phi_shift_ratio(const Eigenform& f, int m, EvalPoint pt, double rel_tol) {
  pt = make_point(pt.alpha, pt.y);
  const double k = f.weight, sp = (k - 1) / 2;
  const ScaledComplex lo = phi_full(f, k, pt, rel_tol);
  const ScaledComplex hi = phi_full(f, k + 2 * m, pt, rel_tol);
  const double log_ratio = hi.log_mag - lo.log_mag + log_I(k + 2 * m, sp + m) - log_I(k, sp);
  return std::polar(std::exp(log_ratio), wrap_phase(hi.phase - lo.phase));
}

bool theorem2_eligible(int k, int l, const RegimeConfig& cfg) {
  return l >= cfg.beta1 && l < cfg.beta2 * std::sqrt(k / std::log(static_cast<double>(k)));
}

namespace {

// The height enters at full precision: near the dominant term a rounded y costs s' dy^2 / y^2.
double residual_at(const Eigenform& f, int l, double alpha, const Real& yr) {
  require(l >= 1, "ladder_residual: l must be positive");
  const int bits = f.precision_bits;
  const double y = yr.to_double();
  const double rel_tol = std::ldexp(1.0, -(bits - 16));
  const Plan p = plan_sum(f, f.weight, y, rel_tol, false);
  const double a = normalize_alpha(alpha);
  MultiSum s = sum_multi(f, Real(a, bits), yr, p, bits);
  // Bring the sum back to the I_k(k') scale and subtract lambda(l) e(alpha l).
  const Real scale = exp(Real(s.log_scale, bits));
  Real re = s.re * scale, im = s.im * scale;
  Real fr = Real(a, bits) * static_cast<long>(l);
  mpfr_frac(fr.get(), fr.get(), MPFR_RNDN);
  Real ang = const_pi(bits) * 2L * fr;
  re -= modforms::lambda(f, l) * cos(ang);
  im -= modforms::lambda(f, l) * sin(ang);
  return sqrt(re * re + im * im).to_double();
}

}  // namespace

double ladder_residual(const Eigenform& f, int l, double alpha, double y) {
  return residual_at(f, l, alpha, Real(y, f.precision_bits));
}

double theorem2_residual(const Eigenform& f, int l, double alpha, double delta, const RegimeConfig& cfg) {
  require(delta > 0 && delta < 2.0 / 3.0, "theorem2_residual: delta must lie in (0, 2/3)");
  if (!theorem2_eligible(f.weight, l, cfg))
    fail(ErrorKind::OutsideRegime, "theorem2_residual: l=" + std::to_string(l) + " outside the eligible range");
  const int bits = f.precision_bits;
  const Real y = Real(static_cast<long>(f.weight - 1), bits) / (const_pi(bits) * static_cast<long>(4 * l));
  return residual_at(f, l, alpha, y);
}

}  // namespace cuspzero::eval
