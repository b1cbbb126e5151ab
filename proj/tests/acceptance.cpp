// Acceptance suite: one PASS/FAIL line per criterion, followed by indented diagnostics.
// Exit status is the number of failed gating criteria (the conjectural report is not gating).

#include "census/census.hpp"
#include "common/errors.hpp"
#include "evaluator/evaluator.hpp"
#include "model/model.hpp"
#include "modforms/eigenform.hpp"
#include "modforms/qexp.hpp"
#include "oracles.hpp"
#include "signs/signs.hpp"

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace cuspzero;
using modforms::Eigenform;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> info;

  void note(const std::string& s) { info.push_back(s); }
  void fail(const std::string& s) {
    pass = false;
    info.push_back("violation: " + s);
  }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

const std::vector<Eigenform>& forms(int k) {
  static std::map<int, std::vector<Eigenform>> cache;
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, modforms::eigenforms(k)).first;
  return it->second;
}

int winding_retry(const Eigenform& f, double y) {
  for (int attempt = 0;; ++attempt) {
    try {
      return census::winding_count(f, y * (1 + 1e-7 * attempt));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ZeroOnContour || attempt >= 4) throw;
    }
  }
}

// 1. Extracted eigenvalues against exact integer coefficients; Hecke relations for k <= 300.
Outcome exactness() {
  Outcome o;
  for (int k : {12, 16, 18, 20, 22, 26}) {
    const Eigenform f = modforms::eigenforms(k, 192, 200)[0];
    const auto a = oracle::rational_eigenform(k, 200);
    double worst = 0;
    for (int n = 1; n <= 200; ++n) {
      const Real exact = Real(a[n], 192) / pow(Real(static_cast<long>(n), 192), Real((k - 1) / 2.0, 192));
      worst = std::max(worst, abs(f.lambdas[n] - exact).to_double());
    }
    o.note(fmt("k=%d max |lambda - exact| over n<=200: %.3e", k, worst));
    if (!(worst < 1e-40)) o.fail(fmt("k=%d error %.3e", k, worst));
  }
  double worst = 0;
  int count = 0;
  for (int k = 12; k <= 300; k += 2) {
    if (modforms::dim_cusp(k) == 0) continue;
    for (const auto& f : forms(k)) {
      const auto r = modforms::verify_hecke(f, 1e-25);
      worst = std::max(worst, r.max_residual);
      ++count;
      if (!(r.max_residual < 1e-25) || !r.deligne_ok)
        o.fail(fmt("k=%d idx=%d residual %.3e (%s)", k, f.dim_index, r.max_residual, r.worst_relation.c_str()));
    }
  }
  o.note(fmt("verify_hecke over %d eigenforms with k<=300: max residual %.3e", count, worst));
  return o;
}

// 2. Winding count at y_l equals l.
Outcome exact_ladder_counts() {
  Outcome o;
  int tested = 0, bad = 0, elig_tested = 0, elig_bad = 0;
  std::map<int, int> bad_by_l;
  for (int k : {200, 500, 1000}) {
    int kbad = 0;
    for (const auto& f : forms(k)) {
      for (int l = 1; l <= 10; ++l) {
        if (std::fabs(f.lambdas_d[l]) < 0.1) continue;
        const int w = winding_retry(f, eval::ladder_y(k, l));
        ++tested;
        const bool elig = eval::theorem2_eligible(k, l);
        elig_tested += elig;
        if (w != l) {
          ++bad;
          ++kbad;
          ++bad_by_l[l];
          elig_bad += elig;
          if (kbad <= 3) o.fail(fmt("k=%d idx=%d l=%d: winding %d", k, f.dim_index, l, w));
        }
      }
    }
    o.note(fmt("k=%d: %d mismatches", k, kbad));
  }
  std::string by_l;
  for (auto [l, c] : bad_by_l) by_l += fmt(" l=%d:%d", l, c);
  o.note(fmt("%d of %d (k, idx, l) cases mismatch; by l:%s", bad, tested, by_l.c_str()));
  o.note(fmt("restricted to l < 0.5 sqrt(k / log k): %d of %d mismatch", elig_bad, elig_tested));
  return o;
}

// 3. One zero per ladder strip, on the segment selected by the sign of lambda(l) lambda(l+1).
Outcome ladder_strips() {
  Outcome o;
  int strips = 0, bad = 0, ext = 0, ext_bad = 0;
  for (int k : {400, 600}) {
    for (const auto& f : forms(k)) {
      census::CensusConfig cfg;
      cfg.ladder_max = -1;
      const auto rep = census::census_report(f, cfg);
      for (int l = 1; l <= 12; ++l) {
        if (std::fabs(f.lambdas_d[l]) < 0.1 || std::fabs(f.lambdas_d[l + 1]) < 0.1) continue;
        const bool eligible = eval::theorem2_eligible(k, l) && eval::theorem2_eligible(k, l + 1);
        const double lo = eval::ladder_y(k, l + 1), hi = eval::ladder_y(k, l);
        const int dw = winding_retry(f, lo) - winding_retry(f, hi);
        std::vector<const census::ZeroRecord*> inside;
        for (const auto& z : rep.zeros)
          if (!z.corner && z.segment != SegmentTag::Delta3 && z.location > lo && z.location < hi) inside.push_back(&z);
        const SegmentTag want = f.lambdas_d[l] * f.lambdas_d[l + 1] > 0 ? SegmentTag::Delta2 : SegmentTag::Delta1;
        bool ok = dw == 1 && inside.size() == 1 && inside[0]->segment == want && inside[0]->width <= 1e-10;
        if (eligible) {
          ++strips;
          if (!ok) {
            ++bad;
            o.fail(fmt("k=%d idx=%d strip l=%d: winding diff %d, real zeros %zu", k, f.dim_index, l, dw, inside.size()));
          }
        } else {
          ++ext;
          ext_bad += !ok;
        }
      }
    }
  }
  o.note(fmt("eligible strips (l+1 < 0.5 sqrt(k / log k)): %d checked, %d failed", strips, bad));
  o.note(fmt("beyond the eligible range, l <= 12: %d strips, %d failed (not gating)", ext, ext_bad));
  if (strips == 0) o.fail("no eligible strips");
  return o;
}

// 4. N Y / k over a Y range at desk-scale weights.
Outcome siegel_band() {
  Outcome o;
  double lo_seen = INFINITY, hi_seen = 0;
  for (int k = 300; k <= 900; k += 100) {
    // The admissible range sqrt(k log k) <= Y < k / 100 is empty here; keep Y < k / 100 and go
    // down to the height where the ladder reaches l = sqrt(k).
    const double y_hi = 0.999 * k / 100;
    const double y_lo = std::max(1.0, eval::ladder_y(k, static_cast<int>(std::ceil(std::sqrt(k)))));
    std::vector<double> Ys;
    for (int i = 0; i < 6; ++i) Ys.push_back(y_lo * std::pow(y_hi / y_lo, i / 5.0));
    double klo = INFINITY, khi = 0;
    for (const auto& f : forms(k)) {
      for (double Y : Ys) {
        const int N = winding_retry(f, Y);
        const double v = N * Y / k;
        klo = std::min(klo, v);
        khi = std::max(khi, v);
        if (v < 0.05 || v > 1.0) o.fail(fmt("k=%d idx=%d Y=%.3f: N=%d, N Y / k = %.4f", k, f.dim_index, Y, N, v));
      }
    }
    o.note(fmt("k=%d Y in [%.3f, %.3f]: N Y / k in [%.4f, %.4f]", k, y_lo, y_hi, klo, khi));
    lo_seen = std::min(lo_seen, klo);
    hi_seen = std::max(hi_seen, khi);
  }
  o.note(fmt("band observed [%.4f, %.4f] against [0.05, 1.0]", lo_seen, hi_seen));
  return o;
}

// 5. Residuals on the ladder and the windowed-vs-full oracle.
Outcome residuals() {
  Outcome o;
  const double delta = 0.2;
  std::map<int, std::map<std::pair<int, int>, double>> worst;  // k -> (l, alpha index) -> max residual
  int gap_points = 0, gap_bad = 0;
  for (int k : {500, 1000, 2000}) {
    double kmax = 0;
    int n = 0;
    for (size_t i = 0; i < forms(k).size(); ++i) {
      const auto& f = forms(k)[i];
      for (int l = 1; eval::theorem2_eligible(k, l); ++l) {
        if (std::fabs(f.lambdas_d[l]) < 0.5) continue;
        for (int ai = 0; ai <= 5; ++ai) {
          const double alpha = ai / 10.0;
          const double r = eval::theorem2_residual(f, l, alpha, delta);
          double& w = worst[k][{l, ai}];
          w = std::max(w, r);
          kmax = std::max(kmax, r);
          ++n;
          if (!(r < 0.05)) o.fail(fmt("k=%d idx=%d l=%d alpha=%.1f residual %.4f", k, f.dim_index, l, alpha, r));
          const double y = eval::ladder_y(k, l);
          if (i % 5 == 0 && eval::in_window_regime(k, y)) {
            const auto wv = eval::phi_windowed(f, k, {alpha, y}, delta);
            const auto fv = eval::phi_full(f, k, {alpha, y}, 1e-20);
            ++gap_points;
            if (!(std::abs(wv.value() - fv.value()) <= wv.tail_bound() + fv.tail_bound())) ++gap_bad;
          }
        }
      }
    }
    o.note(fmt("k=%d: %d eligible (idx, l, alpha) points, max residual %.4e", k, n, kmax));
  }
  int matched = 0;
  for (const auto& [key, r500] : worst[500]) {
    auto it = worst[2000].find(key);
    if (it == worst[2000].end()) continue;
    ++matched;
    o.note(fmt("l=%d alpha=%.1f: max residual %.4e (k=500) -> %.4e (k=2000)", key.first, key.second / 10.0, r500,
               it->second));
    if (!(it->second < r500)) o.fail(fmt("l=%d alpha=%.1f does not decrease", key.first, key.second / 10.0));
  }
  if (matched == 0) o.fail("no matched (l, alpha) between k=500 and k=2000");
  o.note(fmt("windowed vs full: %d of %d sampled points within the summed tail bounds", gap_points - gap_bad, gap_points));
  if (gap_bad) o.fail(fmt("%d sampled points exceed the tail bounds", gap_bad));
  return o;
}

// 6. Zeros on both vertical segments for 100 <= k <= 400, growing with k.
Outcome both_segments() {
  Outcome o;
  struct Band {
    int forms = 0;
    double d1 = 0, d2 = 0;
  };
  std::map<int, Band> bands;
  int missing = 0, total = 0;
  for (int k = 100; k <= 400; k += 2) {
    if (modforms::dim_cusp(k) == 0) continue;
    for (const auto& f : forms(k)) {
      census::CensusConfig cfg;
      cfg.ladder_max = -1;
      const auto rep = census::census_report(f, cfg);
      ++total;
      const int band = k < 200 ? 100 : 200;
      bands[band].forms++;
      bands[band].d1 += rep.n_delta1;
      bands[band].d2 += rep.n_delta2;
      if (rep.n_delta1 < 1 || rep.n_delta2 < 1) {
        ++missing;
        o.fail(fmt("k=%d idx=%d: delta1=%d delta2=%d", k, f.dim_index, rep.n_delta1, rep.n_delta2));
      }
      if (!rep.errors.empty()) o.note(fmt("k=%d idx=%d census errors: %s", k, f.dim_index, rep.errors[0].c_str()));
    }
  }
  o.note(fmt("%d of %d eigenforms lack a zero on delta1 or delta2", missing, total));
  double p1 = 0, p2 = 0;
  for (const auto& [b, s] : bands) {
    const double m1 = s.d1 / s.forms, m2 = s.d2 / s.forms;
    o.note(fmt("band [%d, %d): mean delta1 %.3f, mean delta2 %.3f over %d forms", b, 2 * b, m1, m2, s.forms));
    if (m1 < p1 || m2 < p2) o.fail(fmt("mean count decreases in band starting at %d", b));
    p1 = m1;
    p2 = m2;
  }
  return o;
}

// 7. First negative eigenvalue below k^0.4963.
Outcome first_negative() {
  Outcome o;
  int total = 0, missing = 0;
  for (int k = 12; k <= 300; k += 2) {
    if (modforms::dim_cusp(k) == 0) continue;
    for (const auto& f : forms(k)) {
      ++total;
      const auto r = signs::first_negative(f, 0.01);
      if (!r.found) {
        ++missing;
        o.fail(fmt("k=%d idx=%d: no prime power n < %.2f with lambda(n) <= -0.01", k, f.dim_index, r.bound));
      }
    }
  }
  o.note(fmt("%d of %d eigenforms have no qualifying n below the bound", missing, total));
  return o;
}

// 8. Closed forms of the random model.
Outcome model_closed_forms() {
  Outcome o;
  const double k = 1e4;
  double rlo = INFINITY, rhi = 0;
  for (double y = 2; y <= 5 + 1e-12; y += 0.25) {
    const double r = model::ek_density(k, 0, y) / model::asymptotic_density(k, y);
    rlo = std::min(rlo, r);
    rhi = std::max(rhi, r);
  }
  o.note(fmt("(a) density / asymptotic over y in [2, 5]: [%.4f, %.4f]", rlo, rhi));
  if (rlo < 0.9 || rhi > 1.1) o.fail("(a) density ratio outside [0.9, 1.1]");

  const double d3 = model::expected_count(k, SegmentTag::Delta3, kArcLo, kArcHi);
  const double d3_pred = std::sqrt(k) / (4 * M_PI) * std::log(3.0);
  o.note(fmt("(b) delta3 expected count %.4f vs %.4f (ratio %.4f)", d3, d3_pred, d3 / d3_pred));
  if (std::fabs(d3 / d3_pred - 1) > 0.05) o.fail("(b) delta3 count off by more than 5%");

  const double Y = std::pow(k, 0.58), top = eval::zero_free_constant() * k;
  const double cusp = model::expected_count(k, SegmentTag::Delta1, Y, top);
  const double cusp_pred = 0.5 * k / (4 * M_PI * Y);
  o.note(fmt("(c) count above Y=%.2f: %.4f vs %.4f (ratio %.4f)", Y, cusp, cusp_pred, cusp / cusp_pred));
  if (std::fabs(cusp / cusp_pred - 1) > 0.10) o.fail("(c) cusp-regime count off by more than 10%");
  return o;
}

// 9. Monte Carlo against the Kac-Rice count.
Outcome monte_carlo() {
  Outcome o;
  const auto mc = model::monte_carlo(200, SegmentTag::Delta1, 2, 4, 2000, 20240601);
  const double ref = model::expected_count(200, SegmentTag::Delta1, 2, 4);
  o.note(fmt("mean %.4f +- %.4f vs expected %.4f (%d grid points, %d terms)", mc.mean, mc.stderr_, ref, mc.grid_points,
             mc.truncation));
  if (!(std::fabs(mc.mean - ref) <= 3 * mc.stderr_)) o.fail("Monte Carlo mean more than 3 stderr from the expected count");
  model::McOptions scaled;
  scaled.coeff_scale = 7;
  const auto s = model::monte_carlo(200, SegmentTag::Delta1, 2, 4, 2000, 20240601, scaled);
  int changed = 0;
  for (size_t i = 0; i < mc.counts.size(); ++i) changed += s.counts[i] != mc.counts[i];
  o.note(fmt("scaling coefficients by 7 changes %d of %zu trial counts", changed, mc.counts.size()));
  if (changed) o.fail("scale invariance broken");
  return o;
}

// 10. Conjectural ratio tables and the real-zero ratio at Y = 3 sqrt(k).
Outcome conjectural() {
  Outcome o;
  auto table = [] {
    std::ostringstream t;
    t << "k,forms,mean_real,pred_real,ratio_real,ratio_delta1,ratio_delta2,ratio_delta3\n";
    for (int k : {200, 400, 600, 800, 1000}) {
      double lo, hi, pred[3];
      for (int s = 0; s < 3; ++s) {
        model::default_range(k, static_cast<SegmentTag>(s), lo, hi);
        pred[s] = model::expected_count(k, static_cast<SegmentTag>(s), lo, hi);
      }
      double sum[3] = {0, 0, 0};
      int n = 0;
      const auto& fs = forms(k);
      for (size_t i = 0; i < fs.size(); i += 4) {
        census::CensusConfig cfg;
        cfg.ladder_max = -1;
        const auto rep = census::census_report(fs[i], cfg);
        sum[0] += rep.n_delta1;
        sum[1] += rep.n_delta2;
        sum[2] += rep.n_delta3;
        ++n;
      }
      const double real = (sum[0] + sum[1] + sum[2]) / n;
      const double pred_real = std::sqrt(k) / (2 * M_PI) * std::log(k);
      char line[256];
      std::snprintf(line, sizeof line, "%d,%d,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f\n", k, n, real, pred_real, real / pred_real,
                    sum[0] / n / pred[0], sum[1] / n / pred[1], sum[2] / n / pred[2]);
      t << line;
    }
    return t.str();
  };
  const std::string t1 = table(), t2 = table();
  std::istringstream lines(t1);
  for (std::string l; std::getline(lines, l);) o.note("table: " + l);
  if (t1 != t2) o.fail("ratio tables differ between runs");

  for (int k : {400, 600, 800}) {
    const double Y = 3 * std::sqrt(k);
    int undefined = 0, low = 0, n = 0;
    for (const auto& f : forms(k)) {
      const auto e = census::siegel_census(f, {Y})[0];
      ++n;
      if (!e.ratio) ++undefined;
      else if (*e.ratio <= 0.9) ++low;
    }
    o.note(fmt("k=%d Y=%.2f (y_1=%.2f, zero-free above %.2f): %d forms, %d undefined ratios (only the cusp in F_Y), %d below 0.9",
               k, Y, eval::ladder_y(k, 1), eval::zero_free_constant() * k, n, undefined, low));
    if (undefined || low) o.fail(fmt("k=%d: real ratio not above 0.9 for %d forms", k, undefined + low));
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    bool gating;
  };
  const std::vector<Criterion> all = {
      {1, "exactness of extracted eigenvalues", exactness, true},
      {2, "winding count l at y_l for l <= 10", exact_ladder_counts, true},
      {3, "one zero per ladder strip", ladder_strips, true},
      {4, "Siegel count band", siegel_band, true},
      {5, "ladder approximation residuals", residuals, true},
      {6, "zeros on delta1 and delta2 for 100 <= k <= 400", both_segments, true},
      {7, "first negative eigenvalue below k^0.4963", first_negative, true},
      {8, "random model closed forms", model_closed_forms, true},
      {9, "Monte Carlo vs Kac-Rice", monte_carlo, true},
      {10, "conjectural ratio reports", conjectural, false},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d %s: %s%s (%.1fs)\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                c.gating ? "" : " [reported, not gating]", secs);
    for (const auto& s : o.info) std::printf("    %s\n", s.c_str());
    std::fflush(stdout);
    if (!o.pass && c.gating) ++failed;
  }
  std::printf("%d gating criteria failed\n", failed);
  return failed;
}
