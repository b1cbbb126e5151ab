#include "census/census.hpp"

#include "common/errors.hpp"

#include <algorithm>
#include <functional>

namespace cuspzero::census {

namespace {

double top_height(int k) { return eval::zero_free_constant() * k; }

void check_param(SegmentTag seg, double param) {
  if (seg == SegmentTag::Delta3)
    require(param >= kArcLo - 1e-6 && param <= kArcHi + 1e-6, "Delta3 parameter outside [pi/2, 2pi/3]");
  else
    require(param >= 0.4, "Delta1/Delta2 height must be at least 0.4");
}

eval::RealSample sample(const Eigenform& f, SegmentTag seg, double param, int tier) {
  eval::EvalOptions opt;
  opt.allow_truncation = true;
  if (tier > 0) {
    opt.tier = eval::Tier::Multi;
    opt.multi_bits = f.precision_bits << (tier - 1);
  } else {
    opt.tier = eval::Tier::Double;
  }
  if (seg == SegmentTag::Delta3) return eval::real_on_arc(f, param, opt);
  return eval::real_on_line(f, {seg == SegmentTag::Delta1 ? 0.0 : 0.5, param}, opt);
}

}  // namespace

std::string ZeroRecord::flags() const {
  std::string s = multiplicity_note;
  if (corner) s += ";corner";
  if (forced) s += ";forced";
  if (jittered) s += ";jittered";
  return s;
}

int forced_order_i(int k) { return k % 4 == 2 ? 1 : 0; }
int forced_order_rho(int k) { return k % 3; }

CertifiedValue restrict_real(const Eigenform& f, SegmentTag seg, double param, int max_escalations, ScanLog* log) {
  check_param(seg, param);
  CertifiedValue cv;
  cv.param = param;
  for (int tier = 0; tier <= max_escalations; ++tier) {
    const eval::RealSample s = sample(f, seg, param, tier);
    cv.value = s.value;
    cv.error = s.error;
    cv.log_scale = s.log_scale;
    cv.tier_bits = s.tier_bits;
    cv.sign = s.certified_sign();
    if (tier > 0 && log) ++log->escalated;
    if (cv.sign != 0) break;
  }
  return cv;
}

namespace {

CertifiedValue certify_with_jitter(const Eigenform& f, SegmentTag seg, double param, double step, double lo, double hi,
                                   const ScanPolicy& policy, ScanLog* log) {
  CertifiedValue cv = restrict_real(f, seg, param, policy.max_escalations, log);
  if (cv.sign != 0) return cv;
  for (double dir : {1.0, -1.0}) {
    const double p = std::clamp(param + dir * policy.jitter * step, lo, hi);
    if (p == param) continue;
    CertifiedValue j = restrict_real(f, seg, p, policy.max_escalations, log);
    if (j.sign != 0) {
      j.jittered = true;
      if (log) ++log->jittered;
      return j;
    }
  }
  if (log) {
    ++log->undetermined;
    log->notes.push_back(segment_name(seg) + ": undetermined sign at " + std::to_string(param));
  }
  return cv;
}

std::vector<double> initial_grid(const Eigenform& f, SegmentTag seg, double lo, double hi, const ScanPolicy& policy) {
  std::vector<double> g;
  if (seg == SegmentTag::Delta3) {
    const int n = std::max(16, policy.arc_points > 0 ? policy.arc_points : (f.weight + 3) / 4);
    for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
    return g;
  }
  // Uniform in t = (k - 1) / (4 pi y): integer and half-integer t are the ladder heights and midpoints.
  const double k = f.weight;
  const double t_lo = eval::ladder_t(k, hi), t_hi = eval::ladder_t(k, lo);
  g.push_back(lo);
  for (long j = static_cast<long>(std::ceil(t_lo / policy.t_step)); j * policy.t_step <= t_hi; ++j) {
    const double t = j * policy.t_step;
    if (t <= 0) continue;
    const double y = (k - 1) / (4 * M_PI * t);
    if (y > lo && y < hi) g.push_back(y);
  }
  g.push_back(hi);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

}  // namespace

std::vector<SignChangeBracket> scan_segment(const Eigenform& f, SegmentTag seg, double lo, double hi,
                                            const ScanPolicy& policy, ScanLog* log) {
  std::vector<SignChangeBracket> out;
  if (!(hi > lo)) return out;
  check_param(seg, lo);
  check_param(seg, hi);
  const auto grid = initial_grid(f, seg, lo, hi, policy);
  std::vector<CertifiedValue> pts;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double step = i + 1 < grid.size() ? grid[i + 1] - grid[i] : grid[i] - grid[i - 1];
    CertifiedValue cv = certify_with_jitter(f, seg, grid[i], step, lo, hi, policy, log);
    if (cv.sign != 0) pts.push_back(cv);
  }

  // Subdivide around dips of |f| that do not change sign; they can hide a close pair of zeros.
  std::vector<std::pair<double, double>> suspicious;
  for (size_t i = 1; i + 1 < pts.size(); ++i)
    if (pts[i - 1].sign == pts[i].sign && pts[i].sign == pts[i + 1].sign &&
        pts[i].log_abs() < pts[i - 1].log_abs() && pts[i].log_abs() < pts[i + 1].log_abs())
      suspicious.emplace_back(pts[i - 1].param, pts[i + 1].param);
  for (int level = 0; level < policy.refine_levels && !suspicious.empty(); ++level) {
    std::vector<CertifiedValue> added;
    for (auto [a, b] : suspicious) {
      const int n = 2 * policy.refine_factor;
      for (int j = 1; j < n; ++j) {
        if (j == policy.refine_factor) continue;
        const double p = a + (b - a) * j / n;
        CertifiedValue cv = certify_with_jitter(f, seg, p, (b - a) / n, lo, hi, policy, log);
        if (cv.sign != 0) added.push_back(cv);
      }
    }
    pts.insert(pts.end(), added.begin(), added.end());
    std::sort(pts.begin(), pts.end(), [](const CertifiedValue& x, const CertifiedValue& y) { return x.param < y.param; });
    std::vector<std::pair<double, double>> next;
    for (auto [a, b] : suspicious) {
      for (size_t i = 1; i + 1 < pts.size(); ++i) {
        if (pts[i].param <= a || pts[i].param >= b) continue;
        if (pts[i - 1].sign == pts[i].sign && pts[i].sign == pts[i + 1].sign &&
            pts[i].log_abs() < pts[i - 1].log_abs() && pts[i].log_abs() < pts[i + 1].log_abs())
          next.emplace_back(pts[i - 1].param, pts[i + 1].param);
      }
    }
    suspicious.swap(next);
  }

  for (size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i].sign != pts[i + 1].sign)
      out.push_back({seg, pts[i].param, pts[i + 1].param, pts[i].value, pts[i + 1].value});
  return out;
}

ZeroRecord refine_zero(const Eigenform& f, const SignChangeBracket& bracket, double tol, const ScanPolicy& policy,
                       ScanLog* log) {
  require(tol > 0, "refine_zero: tol must be positive");
  require(bracket.hi > bracket.lo, "refine_zero: empty bracket");
  const int s_lo = bracket.value_lo > 0 ? 1 : -1;
  const int s_hi = bracket.value_hi > 0 ? 1 : -1;
  require(s_lo != s_hi, "refine_zero: bracket endpoints have equal signs");
  double lo = bracket.lo, hi = bracket.hi;
  for (int it = 0; hi - lo > tol; ++it) {
    if (it > 400) fail(ErrorKind::NumericFailure, "refine_zero: bisection did not converge");
    const double mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    const CertifiedValue cv = restrict_real(f, bracket.segment, mid, policy.max_escalations, log);
    if (cv.sign == s_lo) {
      lo = mid;
      continue;
    }
    if (cv.sign == s_hi) {
      hi = mid;
      continue;
    }
    // The midpoint sits on the zero to within arithmetic noise; bracket it tightly instead.
    const double a = std::max(lo, mid - tol / 4), b = std::min(hi, mid + tol / 4);
    const CertifiedValue ca = restrict_real(f, bracket.segment, a, policy.max_escalations, log);
    const CertifiedValue cb = restrict_real(f, bracket.segment, b, policy.max_escalations, log);
    if ((a == lo || ca.sign == s_lo) && (b == hi || cb.sign == s_hi)) {
      lo = a;
      hi = b;
      break;
    }
    fail(ErrorKind::Indeterminate, "refine_zero: budget exhausted near " + std::to_string(mid));
  }
  ZeroRecord z;
  z.segment = bracket.segment;
  z.param_lo = lo;
  z.param_hi = hi;
  z.location = lo + (hi - lo) / 2;
  z.width = hi - lo;
  return z;
}

int winding_count(const Eigenform& f, double y, const WindingPolicy& policy) {
  require(y > 0, "winding_count: y must be positive");
  const double rel_tol = 1e-20;
  const int nterms = eval::truncation_terms(f, f.weight, y, rel_tol);
  const int m0 = std::max(policy.min_points, policy.points_per_term * nterms);

  auto phase_at = [&](double alpha) {
    eval::EvalOptions opt;
    opt.allow_truncation = true;
    opt.tier = eval::Tier::Double;
    eval::ScaledComplex z = eval::f_value(f, {alpha, y}, rel_tol, opt);
    if (!z.nonzero_certified()) {
      opt.tier = eval::Tier::Multi;
      z = eval::f_value(f, {alpha, y}, std::ldexp(1.0, -(f.precision_bits - 16)), opt);
    }
    if (!z.nonzero_certified())
      fail(ErrorKind::ZeroOnContour, "winding_count: zero on contour at alpha=" + std::to_string(alpha));
    return z.phase;
  };
  auto wrap = [](double d) { return std::remainder(d, 2 * M_PI); };

  // Phi(-alpha) is the conjugate of Phi(alpha), so [0, 1/2] carries half the winding.
  std::function<double(double, double, double, double, int)> walk = [&](double a, double b, double pa, double pb,
                                                                       int depth) -> double {
    const double d = wrap(pb - pa);
    if (std::fabs(d) < M_PI / 2) return d;
    if (depth >= policy.max_depth) fail(ErrorKind::ZeroOnContour, "winding_count: phase does not resolve");
    const double m = (a + b) / 2;
    const double pm = phase_at(m);
    return walk(a, m, pa, pm, depth + 1) + walk(m, b, pm, pb, depth + 1);
  };
  double total = 0;
  double prev_a = 0, prev_p = phase_at(0.0);
  for (int i = 1; i <= m0; ++i) {
    const double a = 0.5 * i / m0;
    const double p = phase_at(a);
    total += walk(prev_a, a, prev_p, p, 0);
    prev_a = a;
    prev_p = p;
  }
  const double w = total / M_PI;
  const double r = std::round(w);
  if (std::fabs(w - r) > 0.1 || r < 0) fail(ErrorKind::NumericFailure, "winding_count: non-integral phase change");
  return static_cast<int>(r);
}

std::vector<SiegelEntry> siegel_census(const Eigenform& f, const std::vector<double>& Ys,
                                       const std::vector<ZeroRecord>* known, const ScanPolicy& policy) {
  std::vector<SiegelEntry> out;
  const double top = top_height(f.weight);
  std::vector<ZeroRecord> scanned;
  for (double Y : Ys) {
    SiegelEntry e;
    e.Y = e.Y_used = Y;
    if (!(Y >= 1.0)) {
      e.status = "error: Y below 1";
      out.push_back(e);
      continue;
    }
    bool ok = false;
    for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
      e.Y_used = Y * (1 + 1e-7 * attempt);
      try {
        e.total = winding_count(f, e.Y_used);
        ok = true;
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::ZeroOnContour) {
          e.status = std::string("error: ") + err.what();
          break;
        }
      }
    }
    if (!ok) {
      if (e.status == "ok") e.status = "error: zero on contour";
      out.push_back(e);
      continue;
    }
    if (e.Y_used < top) {
      if (known) {
        for (const auto& z : *known) {
          if (z.location <= e.Y_used) continue;
          if (z.segment == SegmentTag::Delta1) ++e.real_delta1;
          if (z.segment == SegmentTag::Delta2) ++e.real_delta2;
        }
      } else {
        for (SegmentTag s : {SegmentTag::Delta1, SegmentTag::Delta2}) {
          const auto br = scan_segment(f, s, e.Y_used, top, policy);
          (s == SegmentTag::Delta1 ? e.real_delta1 : e.real_delta2) += static_cast<int>(br.size());
        }
      }
    }
    if (e.total > 1) {
      e.ratio = static_cast<double>(e.real_delta1 + e.real_delta2) / (e.total - 1);
      if (*e.ratio > 1) e.status = "error: more real zeros than the winding count";
    }
    out.push_back(e);
  }
  return out;
}

int CensusReport::count(SegmentTag s, bool include_corners) const {
  int c = 0;
  for (const auto& z : zeros)
    if (z.segment == s && (include_corners || !z.corner)) ++c;
  return c;
}

CensusReport census_report(const Eigenform& f, const CensusConfig& cfg) {
  CensusReport rep;
  rep.weight = f.weight;
  rep.dim_index = f.dim_index;
  rep.predictions = cfg.predictions;
  const int k = f.weight;
  const double top = top_height(k);
  const double eps = 1e-7;

  // Corners: i lies on Delta1 and Delta3, rho on Delta2 and Delta3; zeros there are
  // attributed to the first tag.
  double d1_lo = 1.0, d2_lo = kSqrt3Half, d3_lo = kArcLo, d3_hi = kArcHi;
  auto corner = [&](SegmentTag seg, double param, int forced, double& d_lo, double* arc_end, double arc_shift) {
    const CertifiedValue cv = restrict_real(f, seg, param, cfg.scan.max_escalations, &rep.log);
    if (forced == 0 && cv.sign != 0) return;
    ZeroRecord z;
    z.segment = seg;
    z.param_lo = z.param_hi = z.location = param;
    z.corner = true;
    z.forced = forced > 0;
    rep.zeros.push_back(z);
    d_lo = param + eps;
    *arc_end += arc_shift;
  };
  try {
    corner(SegmentTag::Delta1, 1.0, forced_order_i(k), d1_lo, &d3_lo, eps);
    corner(SegmentTag::Delta2, kSqrt3Half, forced_order_rho(k), d2_lo, &d3_hi, -eps);
  } catch (const Error& e) {
    rep.errors.push_back(std::string("corner: ") + e.what());
  }

  const struct {
    SegmentTag seg;
    double lo, hi;
  } ranges[] = {{SegmentTag::Delta1, d1_lo, top}, {SegmentTag::Delta2, d2_lo, top}, {SegmentTag::Delta3, d3_lo, d3_hi}};
  for (const auto& r : ranges) {
    std::vector<SignChangeBracket> brackets;
    try {
      brackets = scan_segment(f, r.seg, r.lo, r.hi, cfg.scan, &rep.log);
    } catch (const Error& e) {
      rep.errors.push_back(segment_name(r.seg) + " scan: " + e.what());
      continue;
    }
    for (const auto& b : brackets) {
      try {
        rep.zeros.push_back(refine_zero(f, b, cfg.tol, cfg.scan, &rep.log));
      } catch (const Error& e) {
        ZeroRecord z;
        z.segment = b.segment;
        z.param_lo = b.lo;
        z.param_hi = b.hi;
        z.location = (b.lo + b.hi) / 2;
        z.width = b.hi - b.lo;
        z.multiplicity_note = "bracketed only (refinement failed)";
        rep.zeros.push_back(z);
        rep.errors.push_back(segment_name(b.segment) + " refine: " + e.what());
      }
    }
  }

  // Ladder strips: when the winding difference across (y_(l+1), y_l) equals the number of real
  // zeros found there, every zero in the strip is simple.
  const int lmax = cfg.ladder_max < 0 ? 0 : (cfg.ladder_max > 0 ? cfg.ladder_max : static_cast<int>(std::ceil(2 * std::sqrt(k))));
  for (int l = 1; l <= lmax; ++l) {
    const double y = eval::ladder_y(k, l);
    if (y < 1.0) break;
    try {
      rep.ladder_winding[l] = winding_count(f, y);
    } catch (const Error& e) {
      rep.log.notes.push_back("winding at y_" + std::to_string(l) + ": " + e.what());
    }
  }
  auto certify_strip = [&](double ylo, double yhi, int dw) {
    std::vector<ZeroRecord*> inside;
    for (auto& z : rep.zeros)
      if (!z.corner && z.segment != SegmentTag::Delta3 && z.location > ylo && z.location < yhi) inside.push_back(&z);
    if (!inside.empty() && static_cast<int>(inside.size()) == dw)
      for (auto* z : inside) z->multiplicity_note = "simple (certified)";
  };
  if (rep.ladder_winding.count(1)) certify_strip(eval::ladder_y(k, 1), INFINITY, rep.ladder_winding[1] - 1);
  for (const auto& [l, w] : rep.ladder_winding) {
    auto it = rep.ladder_winding.find(l + 1);
    if (it == rep.ladder_winding.end()) continue;
    certify_strip(eval::ladder_y(k, l + 1), eval::ladder_y(k, l), it->second - w);
  }

  std::sort(rep.zeros.begin(), rep.zeros.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    if (a.segment != b.segment) return a.segment < b.segment;
    return a.location < b.location;
  });
  rep.n_delta1 = rep.count(SegmentTag::Delta1);
  rep.n_delta2 = rep.count(SegmentTag::Delta2);
  rep.n_delta3 = rep.count(SegmentTag::Delta3);

  try {
    rep.siegel = siegel_census(f, cfg.Ys, &rep.zeros, cfg.scan);
  } catch (const Error& e) {
    rep.errors.push_back(std::string("siegel: ") + e.what());
  }
  for (const auto& s : rep.siegel)
    if (s.status != "ok") rep.errors.push_back("Y=" + std::to_string(s.Y) + ": " + s.status);
  return rep;
}

}  // namespace cuspzero::census
