#include "model/model.hpp"

#include "common/errors.hpp"

#include <algorithm>
#include <functional>
#include <random>

namespace cuspzero::model {

namespace {

constexpr double kFourPi = 4 * M_PI;

// Weights w(n) = n^(k-1) e^(-4 pi n y) / e^log_scale for n = first, first + 1, ...
struct Terms {
  double log_scale = 0;
  long first = 1;
  long peak = 1;
  std::vector<long double> w;
};

double frac_mul(long n, double alpha) {
  const double hi = static_cast<double>(n) * alpha;
  const double lo = std::fma(static_cast<double>(n), alpha, -hi);
  double fr = (hi - std::floor(hi)) + lo;
  return fr - std::floor(fr);
}

double cos_4pi(long n, double alpha) {
  const double fr = frac_mul(2 * n, alpha);
  if (fr == 0.0) return 1.0;
  if (fr == 0.5) return -1.0;
  if (fr == 0.25 || fr == 0.75) return 0.0;
  return std::cos(2 * M_PI * fr);
}

Terms collect(double k, double y) {
  require(y > 0, "model: y must be positive");
  require(k >= 4, "model: k must be at least 4");
  Terms t;
  const double km1 = k - 1;
  const double peak = km1 / (kFourPi * y);
  auto logw = [&](long n) { return km1 * std::log(static_cast<double>(n)) - kFourPi * y * static_cast<double>(n); };
  long n0 = std::max(1L, std::lround(peak));
  if (n0 > 1 && logw(n0 - 1) > logw(n0)) --n0;
  if (logw(n0 + 1) > logw(n0)) ++n0;
  t.peak = n0;
  t.log_scale = logw(n0);
  // A narrow peak makes the variance hinge on far-down neighbours, so keep them.
  const double width = std::sqrt(km1) / (kFourPi * y);
  const double cut = width >= 3 ? -64.0 : -3000.0;
  // Offsets from the peak are formed directly; subtracting two large logs loses digits when k is big.
  auto rel = [&](long n) {
    const double d = static_cast<double>(n - n0);
    return km1 * std::log1p(d / static_cast<double>(n0)) - kFourPi * y * d;
  };
  std::vector<long double> up, down;
  for (long n = n0;; ++n) {
    const double lw = rel(n);
    up.push_back(std::exp(static_cast<long double>(lw)));
    const double ratio = (k + 1) * std::log1p(1.0 / n) - kFourPi * y;
    if (lw < cut && ratio < std::log(0.5)) break;
  }
  for (long n = n0 - 1; n >= 1; --n) {
    const double lw = rel(n);
    down.push_back(std::exp(static_cast<long double>(lw)));
    if (lw < cut) break;
  }
  t.first = n0 - static_cast<long>(down.size());
  t.w.assign(down.rbegin(), down.rend());
  t.w.insert(t.w.end(), up.begin(), up.end());
  return t;
}

LogReal to_logreal(long double v, double log_scale) {
  LogReal r;
  if (v == 0) return r;
  r.sign = v > 0 ? 1 : -1;
  r.log_abs = log_scale + static_cast<double>(std::log(std::fabs(v)));
  return r;
}

}  // namespace

LogReal s_sum(double k, double alpha, double y) {
  const Terms t = collect(k, y);
  long double s = 0;
  for (size_t i = 0; i < t.w.size(); ++i) s += t.w[i] * cos_4pi(t.first + static_cast<long>(i), alpha);
  return to_logreal(s, t.log_scale);
}

double ek_density(double k, double alpha, double y, Direction dir) {
  const double a = alpha - std::floor(alpha);
  const bool null_dir = a == 0.0 || a == 0.5;
  if (dir == Direction::W && null_dir)
    fail(ErrorKind::InvalidArgument, "ek_density: degenerate vector (w vanishes at alpha in {0, 1/2})");
  // With p(n) = w(n) (1 +- cos(4 pi n alpha)), the inner products are sums of p(n), n p(n) and
  // n^2 p(n), and (<u,u><u',u'> - <u,u'>^2) / <u,u>^2 = 4 pi^2 Var_p(n). The variance is taken in
  // centred form over integer offsets from the peak, which stays accurate when one term dominates.
  const Terms t = collect(k, y);
  const long double sg = dir == Direction::V ? 1 : -1;
  std::vector<long double> p(t.w.size());
  long double total = 0, first = 0;
  for (size_t i = 0; i < t.w.size(); ++i) {
    const long n = t.first + static_cast<long>(i);
    p[i] = null_dir ? 2 * t.w[i] : t.w[i] * (1 + sg * cos_4pi(n, alpha));
    total += p[i];
    first += p[i] * static_cast<long double>(n - t.peak);
  }
  if (total <= 0) fail(ErrorKind::InvalidArgument, "ek_density: degenerate vector");
  const long double mean = first / total;
  long double var = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    const long double d = static_cast<long double>(t.first + static_cast<long>(i) - t.peak) - mean;
    var += p[i] * d * d;
  }
  var /= total;
  return static_cast<double>(2 * std::sqrt(var));
}

double asymptotic_density(double k, double y) { return std::sqrt(k) / (2 * M_PI * y); }

double cusp_regime_density_at(double k, double y, int l) {
  require(l >= 1, "cusp_regime_density: l must be positive");
  const double km1 = k - 1;
  const double inv = 1.0 / l;
  const double la = l >= 2 ? km1 * std::log1p(-inv) + kFourPi * y : -INFINITY;
  const double lc = km1 * std::log1p(inv) - kFourPi * y;
  const double lb = l >= 2 ? km1 * std::log1p(-inv * inv) : -INFINITY;
  const double top = std::max({la, lc, 0.0});
  const double den = std::exp(la - top) + std::exp(-top) + std::exp(lc - top);
  const double num = std::exp(la - 2 * top) + 4 * std::exp(lb - 2 * top) + std::exp(lc - 2 * top);
  return 2 * std::sqrt(num / (den * den));
}

double cusp_regime_density(double k, double y, const ModelConfig& cfg) {
  if (y < std::pow(k, 0.5 + cfg.cusp_delta))
    fail(ErrorKind::OutsideRegime, "cusp_regime_density: y below k^(1/2 + delta)");
  const double t = (k - 1) / (kFourPi * y);
  const int l = std::max(1, static_cast<int>(std::lround(t)));
  return cusp_regime_density_at(k, y, l);
}

double stitched_density(double k, double y, const ModelConfig& cfg) {
  const double ystar = std::pow(k, cfg.stitch_exponent);
  if (y >= ystar && y >= std::pow(k, 0.5 + cfg.cusp_delta)) return cusp_regime_density(k, y, cfg);
  return ek_density(k, 0.0, y);
}

void segment_to_line(SegmentTag seg, double lo, double hi, double& alpha, double& ylo, double& yhi) {
  switch (seg) {
    case SegmentTag::Delta1:
      alpha = 0, ylo = lo, yhi = hi;
      return;
    case SegmentTag::Delta2:
      alpha = 0.5, ylo = lo, yhi = hi;
      return;
    case SegmentTag::Delta3:
      alpha = 0.5, ylo = std::tan(lo / 2) / 2, yhi = std::tan(hi / 2) / 2;
      return;
  }
}

void default_range(double k, SegmentTag seg, double& lo, double& hi) {
  const double top = std::log(4.0) / kFourPi * k;
  switch (seg) {
    case SegmentTag::Delta1: lo = 1.0, hi = top; return;
    case SegmentTag::Delta2: lo = kSqrt3Half, hi = top; return;
    case SegmentTag::Delta3: lo = kArcLo, hi = kArcHi; return;
  }
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
  const double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::fabs(diff) <= 15 * tol) return left + right + diff / 15;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate_panel(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  // Coarse pass fixes the absolute tolerance for the adaptive pass.
  const int n0 = 8;
  double coarse = 0;
  std::vector<double> xs(2 * n0 + 1), fs(2 * n0 + 1);
  for (int i = 0; i <= 2 * n0; ++i) {
    xs[i] = a + (b - a) * i / (2 * n0);
    fs[i] = f(xs[i]);
  }
  for (int i = 0; i < n0; ++i) coarse += (xs[2 * i + 2] - xs[2 * i]) / 6 * (fs[2 * i] + 4 * fs[2 * i + 1] + fs[2 * i + 2]);
  const double tol = rel_tol * std::max(std::fabs(coarse), 1e-300) / n0;
  double total = 0;
  for (int i = 0; i < n0; ++i) {
    const double whole = (xs[2 * i + 2] - xs[2 * i]) / 6 * (fs[2 * i] + 4 * fs[2 * i + 1] + fs[2 * i + 2]);
    total += simpson(f, xs[2 * i], xs[2 * i + 2], fs[2 * i], fs[2 * i + 1], fs[2 * i + 2], whole, tol, 40);
  }
  return total;
}

}  // namespace

double expected_count(double k, SegmentTag seg, double lo, double hi, const ModelConfig& cfg) {
  double alpha, ylo, yhi;
  segment_to_line(seg, lo, hi, alpha, ylo, yhi);
  if (!(yhi > ylo)) return 0.0;
  require(ylo > 0, "expected_count: range must lie in the upper half plane");
  // Split at the ladder transitions t = 1 / log(1 + 1/l), where the density spikes,
  // and at the stitch point.
  std::vector<double> cuts{ylo, yhi};
  const double ystar = std::pow(k, cfg.stitch_exponent);
  if (ystar > ylo && ystar < yhi) cuts.push_back(ystar);
  const int lmax = static_cast<int>(std::ceil(2 * std::sqrt(k)));
  for (int l = 1; l <= lmax; ++l) {
    const double t = 1.0 / std::log1p(1.0 / l);
    const double y = (k - 1) / (kFourPi * t);
    if (y > ylo && y < yhi) cuts.push_back(y);
  }
  std::sort(cuts.begin(), cuts.end());
  auto dens = [&](double y) { return stitched_density(k, y, cfg); };
  double total = 0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate_panel(dens, cuts[i], cuts[i + 1], cfg.quad_tol);
  return total;
}

DensityProfile density_profile(double k, SegmentTag seg, double lo, double hi, int points, const ModelConfig& cfg) {
  require(points >= 2, "density_profile: need at least two points");
  DensityProfile p;
  p.weight = k;
  double ylo, yhi;
  segment_to_line(seg, lo, hi, p.alpha, ylo, yhi);
  const double ystar = std::pow(k, cfg.stitch_exponent);
  p.method = yhi <= ystar ? "exact_EK" : (ylo >= ystar ? "cusp_regime" : "exact_EK+cusp_regime");
  // Log-spaced samples resolve both the bulk (density ~ 1/y) and the cusp tail.
  for (int i = 0; i < points; ++i) {
    const double y = ylo * std::pow(yhi / ylo, static_cast<double>(i) / (points - 1));
    p.samples.emplace_back(y, stitched_density(k, y, cfg));
  }
  p.integrated = expected_count(k, seg, lo, hi, cfg);
  return p;
}

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

McResult monte_carlo(double k, SegmentTag seg, double lo, double hi, int trials, uint64_t seed, const McOptions& opt) {
  require(trials >= 1, "monte_carlo: trials must be at least 1");
  double alpha, ylo, yhi;
  segment_to_line(seg, lo, hi, alpha, ylo, yhi);
  require(yhi > ylo && ylo > 0, "monte_carlo: empty or invalid range");
  McResult res;
  res.trials = trials;
  res.seed = seed;

  const double kh = (k - 1) / 2;
  auto logenv = [&](long n, double y) { return kh * std::log(static_cast<double>(n)) - 2 * M_PI * n * y; };
  const double npeak = std::max(1.0, kh / (2 * M_PI * ylo));
  const double top = logenv(std::max(1L, std::lround(npeak)), ylo);
  long ntr = std::max(1L, std::lround(npeak));
  while (logenv(ntr + 1, ylo) >= top + std::log(1e-8)) ++ntr;
  res.truncation = static_cast<int>(ntr);

  double rho_max = 0;
  for (int i = 0; i <= 64; ++i) rho_max = std::max(rho_max, ek_density(k, 0.0, ylo + (yhi - ylo) * i / 64.0));
  const int npts = static_cast<int>(std::ceil(std::max(64.0, (yhi - ylo) * 10 * rho_max) * opt.grid_factor)) + 1;
  res.grid_points = npts;

  const double sgn_alpha = alpha == 0.5 ? -1.0 : 1.0;
  auto weights_at = [&](double y, std::vector<double>& w, double& scale) {
    w.resize(static_cast<size_t>(ntr));
    scale = -INFINITY;
    for (long n = 1; n <= ntr; ++n) scale = std::max(scale, logenv(n, y));
    double sg = 1;
    for (long n = 1; n <= ntr; ++n) {
      sg *= sgn_alpha;
      w[n - 1] = sg * std::exp(logenv(n, y) - scale);
    }
  };
  std::vector<double> ys(static_cast<size_t>(npts)), scales(static_cast<size_t>(npts));
  std::vector<std::vector<double>> wgrid(static_cast<size_t>(npts));
  for (int j = 0; j < npts; ++j) {
    ys[j] = ylo + (yhi - ylo) * j / (npts - 1);
    weights_at(ys[j], wgrid[j], scales[j]);
  }
  auto eval = [&](const std::vector<double>& g, const std::vector<double>& w) {
    double s = 0;
    for (size_t n = 0; n < g.size(); ++n) s += g[n] * w[n];
    return s;
  };

  std::vector<double> g(static_cast<size_t>(ntr)), vals(static_cast<size_t>(npts)), wtmp;
  double sum = 0, sumsq = 0;
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<uint64_t>(trial) + 0x5851f42d4c957f2dULL)));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& x : g) x = normal(rng) * opt.coeff_scale;
    for (int j = 0; j < npts; ++j) vals[j] = eval(g, wgrid[j]);
    int count = 0;
    for (int j = 0; j + 1 < npts; ++j)
      if ((vals[j] < 0) != (vals[j + 1] < 0)) ++count;
    // A dip toward zero without a sign change may hide a close pair of zeros.
    for (int j = 1; j + 1 < npts; ++j) {
      const bool same = (vals[j - 1] < 0) == (vals[j] < 0) && (vals[j] < 0) == (vals[j + 1] < 0);
      if (!same) continue;
      const double l0 = std::log(std::fabs(vals[j - 1])) + scales[j - 1];
      const double l1 = std::log(std::fabs(vals[j])) + scales[j];
      const double l2 = std::log(std::fabs(vals[j + 1])) + scales[j + 1];
      if (!(l1 < l0 && l1 < l2)) continue;
      const int sub = 32;
      double prev = vals[j - 1];
      for (int i = 1; i <= 2 * sub; ++i) {
        double cur;
        if (i == sub) {
          cur = vals[j];
        } else if (i == 2 * sub) {
          cur = vals[j + 1];
        } else {
          double sc;
          weights_at(ys[j - 1] + (ys[j + 1] - ys[j - 1]) * i / (2 * sub), wtmp, sc);
          cur = eval(g, wtmp);
        }
        if ((prev < 0) != (cur < 0)) ++count;
        prev = cur;
      }
    }
    res.counts.push_back(count);
    sum += count;
    sumsq += static_cast<double>(count) * count;
  }
  res.mean = sum / trials;
  const double var = trials > 1 ? (sumsq - sum * sum / trials) / (trials - 1) : 0.0;
  res.stderr_ = std::sqrt(std::max(var, 0.0) / trials);
  return res;
}

}  // namespace cuspzero::model
