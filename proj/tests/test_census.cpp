#include <doctest.h>

#include "census/census.hpp"
#include "census/report.hpp"
#include "common/errors.hpp"
#include "evaluator/evaluator.hpp"
#include "modforms/eigenform.hpp"

#include <sstream>

using namespace cuspzero;
using namespace cuspzero::census;
using modforms::Eigenform;

namespace {

CensusConfig config(int k) {
  CensusConfig c;
  c.Ys = {1.0, 2.0};
  (void)k;
  return c;
}

int corner_count(const CensusReport& r, SegmentTag s) {
  int n = 0;
  for (const auto& z : r.zeros)
    if (z.corner && z.segment == s) ++n;
  return n;
}

// Zeros in the closure of F other than the cusp, each counted once, with i and rho weighted as in
// the valence formula: their sum is k/12 - 1.
double valence_bound(int k) { return k / 12.0 - 1 - forced_order_i(k) / 2.0 - forced_order_rho(k) / 3.0; }

int interior_real(const CensusReport& r) {
  int n = 0;
  for (const auto& z : r.zeros)
    if (!z.corner) ++n;
  return n;
}

// Sign of f restricted to the segment at a parameter, by the high-precision tier.
int sign_at(const Eigenform& f, SegmentTag seg, double p) {
  eval::EvalOptions opt;
  opt.tier = eval::Tier::Multi;
  opt.multi_bits = 2 * f.precision_bits;
  opt.allow_truncation = true;
  const auto s = seg == SegmentTag::Delta3 ? eval::real_on_arc(f, p, opt)
                                           : eval::real_on_line(f, {seg == SegmentTag::Delta1 ? 0.0 : 0.5, p}, opt);
  return s.certified_sign();
}

}  // namespace

TEST_CASE("Delta has no zeros in the fundamental domain") {
  const auto d = modforms::eigenforms(12)[0];
  const auto r = census_report(d, config(12));
  CHECK(r.zeros.empty());
  CHECK(r.errors.empty());
  CHECK(winding_count(d, 1.0) == 1);
  CHECK(winding_count(d, 0.9) == 1);
  REQUIRE(r.siegel.size() == 2);
  CHECK(r.siegel[0].total == 1);
  CHECK_FALSE(r.siegel[0].ratio.has_value());
}

TEST_CASE("forced corner zeros") {
  const auto f16 = modforms::eigenforms(16)[0];
  const auto f18 = modforms::eigenforms(18)[0];
  const auto f20 = modforms::eigenforms(20)[0];
  const auto f26 = modforms::eigenforms(26)[0];
  CHECK(forced_order_i(18) == 1);
  CHECK(forced_order_rho(16) == 1);
  CHECK(forced_order_rho(20) == 2);
  CHECK(forced_order_i(26) == 1);
  CHECK(forced_order_rho(26) == 2);

  const auto r16 = census_report(f16, config(16));
  CHECK(corner_count(r16, SegmentTag::Delta2) == 1);
  CHECK(corner_count(r16, SegmentTag::Delta1) == 0);
  CHECK(interior_real(r16) == 0);
  const auto r18 = census_report(f18, config(18));
  CHECK(corner_count(r18, SegmentTag::Delta1) == 1);
  CHECK(corner_count(r18, SegmentTag::Delta2) == 0);
  CHECK(interior_real(r18) == 0);
  const auto r20 = census_report(f20, config(20));
  CHECK(corner_count(r20, SegmentTag::Delta2) == 1);
  CHECK(interior_real(r20) == 0);
  const auto r26 = census_report(f26, config(26));
  CHECK(corner_count(r26, SegmentTag::Delta1) == 1);
  CHECK(corner_count(r26, SegmentTag::Delta2) == 1);
  for (const auto& z : r26.zeros) {
    CHECK(z.forced);
    CHECK(z.flags().find("forced") != std::string::npos);
  }
}

TEST_CASE("weight 24 forms have one interior zero each") {
  const auto forms = modforms::eigenforms(24);
  REQUIRE(forms.size() == 2);
  for (const auto& f : forms) {
    const auto r = census_report(f, config(24));
    CHECK(interior_real(r) == 1);
    CHECK(interior_real(r) == doctest::Approx(valence_bound(24)));
    for (const auto& z : r.zeros) {
      CHECK(z.width <= 1e-9);
      CHECK(z.param_lo <= z.location);
      CHECK(z.location <= z.param_hi);
      CHECK(sign_at(f, z.segment, z.param_lo) * sign_at(f, z.segment, z.param_hi) < 0);
    }
  }
}

TEST_CASE("real zeros never exceed the valence bound") {
  for (int k : {36, 48, 60, 72}) {
    for (const auto& f : modforms::eigenforms(k)) {
      const auto r = census_report(f, config(k));
      CHECK(r.errors.empty());
      CHECK(interior_real(r) <= valence_bound(k) + 1e-9);
      // Everything above height 1 is seen by the winding count.
      int above = 0;
      for (const auto& z : r.zeros)
        if (!z.corner && z.segment != SegmentTag::Delta3 && z.location > 1.0) ++above;
      CHECK(above <= winding_count(f, 1.0) - 1);
    }
  }
}

TEST_CASE("brackets from the scan contain sign changes") {
  const auto forms = modforms::eigenforms(120);
  for (size_t i = 0; i < forms.size(); i += 3) {
    const auto r = census_report(forms[i], config(120));
    for (const auto& z : r.zeros) {
      if (z.corner) continue;
      CHECK(sign_at(forms[i], z.segment, z.param_lo) * sign_at(forms[i], z.segment, z.param_hi) < 0);
    }
  }
}

TEST_CASE("winding counts are monotone in the height") {
  const auto forms = modforms::eigenforms(200);
  for (size_t i = 0; i < forms.size(); i += 4) {
    int prev = 1;
    for (double y : {20.0, 10.0, 6.0, 4.0, 3.0, 2.0, 1.5, 1.0}) {
      const int w = winding_count(forms[i], y);
      CHECK(w >= prev);
      prev = w;
    }
    CHECK(prev <= 200 / 12 + 1);
  }
}

TEST_CASE("ladder strips: winding differences match the real zeros") {
  const auto forms = modforms::eigenforms(200);
  int certified = 0;
  for (const auto& f : forms) {
    CensusConfig c = config(200);
    c.ladder_max = 3;
    const auto r = census_report(f, c);
    REQUIRE(r.ladder_winding.count(3));
    CHECK(r.ladder_winding.at(1) == 1);
    for (int l = 1; l < 3; ++l) {
      const double lo = eval::ladder_y(200, l + 1), hi = eval::ladder_y(200, l);
      const int dw = r.ladder_winding.at(l + 1) - r.ladder_winding.at(l);
      int real = 0;
      for (const auto& z : r.zeros)
        if (!z.corner && z.segment != SegmentTag::Delta3 && z.location > lo && z.location < hi) ++real;
      CHECK(real <= dw);
      // A strip with |lambda(l+1)| well away from zero holds exactly one zero on the matching segment.
      if (std::fabs(f.lambdas_d[l + 1]) > 0.3 && f.lambdas_d[l] * f.lambdas_d[l + 1] != 0) {
        CHECK(dw == 1);
        CHECK(real == 1);
      }
      if (real > 0 && real == dw) {
        for (const auto& z : r.zeros)
          if (!z.corner && z.location > lo && z.location < hi) CHECK(z.multiplicity_note == "simple (certified)");
        ++certified;
      }
    }
  }
  CHECK(certified > 0);
}

TEST_CASE("a Delta2 zero between the first two ladder heights") {
  // On Delta2 the dominant terms at y_1 and y_2 are -1 and lambda(2), so lambda(2) > 0 forces a zero.
  const auto forms = modforms::eigenforms(500);
  int seen = 0;
  for (const auto& f : forms) {
    if (f.lambdas_d[2] < 0.3) continue;
    CensusConfig c = config(500);
    c.ladder_max = -1;
    c.Ys.clear();
    const auto r = census_report(f, c);
    bool found = false;
    for (const auto& z : r.zeros)
      if (z.segment == SegmentTag::Delta2 && z.location > eval::ladder_y(500, 2) && z.location < eval::ladder_y(500, 1))
        found = true;
    CHECK(found);
    ++seen;
    if (seen == 3) break;
  }
  CHECK(seen > 0);
}

TEST_CASE("census output is deterministic") {
  const auto f = modforms::eigenforms(60)[1];
  std::ostringstream a, b;
  write_zero_csv(a, census_report(f, config(60)));
  write_zero_csv(b, census_report(f, config(60)));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("segment,param_lo,param_hi,location,width,flags\n", 0) == 0);
  std::ostringstream s;
  write_summary_header(s);
  write_summary_rows(s, census_report(f, config(60)));
  int lines = 0;
  for (char ch : s.str()) lines += ch == '\n';
  CHECK(lines == 3);
  CHECK(census_file_name(60, 2) == "census_k60_i2.csv");
}

TEST_CASE("Siegel census") {
  const auto f = modforms::eigenforms(200)[3];
  const auto entries = siegel_census(f, {1.0, 3.0, 50.0});
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].total >= entries[1].total);
  CHECK(entries[1].total >= entries[2].total);
  CHECK(entries[2].total == 1);
  CHECK_FALSE(entries[2].ratio.has_value());
  for (const auto& e : entries) {
    CHECK(e.real_delta1 + e.real_delta2 <= e.total - 1);
    if (e.ratio) CHECK(*e.ratio <= 1.0);
  }
  const auto bad = siegel_census(f, {0.5});
  CHECK(bad[0].status != "ok");
}

TEST_CASE("scan arguments are validated") {
  const auto f = modforms::eigenforms(24)[0];
  CHECK_THROWS_AS(restrict_real(f, SegmentTag::Delta1, 0.1), Error);
  CHECK_THROWS_AS(restrict_real(f, SegmentTag::Delta3, 3.0), Error);
  CHECK(restrict_real(f, SegmentTag::Delta1, 2.0).sign != 0);
}
