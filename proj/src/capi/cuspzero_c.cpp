#include "cuspzero/cuspzero.h"

#include "census/census.hpp"
#include "census/report.hpp"
#include "common/errors.hpp"
#include "evaluator/evaluator.hpp"
#include "model/model.hpp"
#include "modforms/eigenform.hpp"
#include "modforms/qexp.hpp"
#include "signs/signs.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>

struct cz_eigenform {
  cuspzero::modforms::Eigenform f;
};

struct cz_census {
  cuspzero::census::CensusReport report;
  std::vector<cuspzero::census::WitnessRow> witnesses;
};

namespace {

using namespace cuspzero;
namespace fs = std::filesystem;

thread_local std::string g_last_error;

cz_status map_kind(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return CZ_ERR_INVALID_ARGUMENT;
    case ErrorKind::InsufficientCoefficients: return CZ_ERR_INSUFFICIENT_COEFFICIENTS;
    case ErrorKind::UnreachableTolerance: return CZ_ERR_UNREACHABLE_TOLERANCE;
    case ErrorKind::OutsideRegime: return CZ_ERR_OUTSIDE_REGIME;
    case ErrorKind::Indeterminate: return CZ_ERR_INDETERMINATE;
    case ErrorKind::NumericFailure: return CZ_ERR_NUMERIC;
    case ErrorKind::ZeroOnContour: return CZ_ERR_ZERO_ON_CONTOUR;
    case ErrorKind::Io: return CZ_ERR_IO;
    case ErrorKind::Format: return CZ_ERR_FORMAT;
  }
  return CZ_ERR_INTERNAL;
}

template <class F>
cz_status guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_kind(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CZ_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CZ_ERR_INTERNAL;
  }
}

cz_status invalid(const char* what) {
  g_last_error = what;
  return CZ_ERR_INVALID_ARGUMENT;
}

bool to_tag(cz_segment s, SegmentTag& out) {
  switch (s) {
    case CZ_DELTA1: out = SegmentTag::Delta1; return true;
    case CZ_DELTA2: out = SegmentTag::Delta2; return true;
    case CZ_DELTA3: out = SegmentTag::Delta3; return true;
  }
  return false;
}

cz_segment from_tag(SegmentTag s) {
  switch (s) {
    case SegmentTag::Delta1: return CZ_DELTA1;
    case SegmentTag::Delta2: return CZ_DELTA2;
    case SegmentTag::Delta3: return CZ_DELTA3;
  }
  return CZ_DELTA1;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<census::WitnessRow> witness_rows(const modforms::Eigenform& f) {
  std::vector<census::WitnessRow> rows;
  const double k = f.weight;
  const auto fn = signs::first_negative(f, 0.01);
  rows.push_back({"first_negative", fn.found ? std::to_string(fn.n) : "", num(fn.lambda), num(fn.bound), "",
                  fn.found ? "found" : "not found below bound"});
  const double top = std::sqrt((k - 1) / (4 * M_PI));
  try {
    const auto d2 = signs::delta2_witnesses(f, std::max(2.0, top));
    for (const auto& w : d2.witnesses)
      rows.push_back({"delta2_witness", std::to_string(w.n1), std::to_string(w.n2), num(w.y1), num(w.y2),
                      w.good ? "good" : "bad"});
  } catch (const Error& e) {
    rows.push_back({"delta2_witness", "", "", "", "", std::string("skipped: ") + e.what()});
  }
  try {
    const auto pp = signs::build_parity_pairs(f, std::max(2.0, top / 2));
    for (const auto& p : pp.pairs)
      rows.push_back({"parity_pair", std::to_string(p.u), std::to_string(p.v), num(p.lower_bound),
                      "H=" + std::to_string(pp.H), "case" + std::to_string(p.case_no)});
  } catch (const Error& e) {
    rows.push_back({"parity_pair", "", "", "", "", std::string("skipped: ") + e.what()});
  }
  return rows;
}

}  // namespace

extern "C" {

const char* cz_version(void) { return "0.1.0"; }
const char* cz_last_error(void) { return g_last_error.c_str(); }

const char* cz_status_name(cz_status s) {
  switch (s) {
    case CZ_OK: return "ok";
    case CZ_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CZ_ERR_INSUFFICIENT_COEFFICIENTS: return "insufficient coefficients";
    case CZ_ERR_UNREACHABLE_TOLERANCE: return "unreachable tolerance";
    case CZ_ERR_OUTSIDE_REGIME: return "outside regime";
    case CZ_ERR_INDETERMINATE: return "indeterminate";
    case CZ_ERR_NUMERIC: return "numeric failure";
    case CZ_ERR_ZERO_ON_CONTOUR: return "zero on contour";
    case CZ_ERR_IO: return "i/o error";
    case CZ_ERR_FORMAT: return "format error";
    case CZ_ERR_NOT_FOUND: return "not found";
    case CZ_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

int cz_dim_cusp(int k) { return k < 0 ? 0 : modforms::dim_cusp(k); }

cz_status cz_eigenform_get(int k, int idx, int precision_bits, int nterms, const char* cache_dir, int force,
                           cz_eigenform** out, int* from_cache) {
  if (!out) return invalid("out is NULL");
  return guarded([&] {
    *out = nullptr;
    if (from_cache) *from_cache = 0;
    require(k >= 12 && k % 2 == 0, "weight must be even and at least 12");
    require(precision_bits >= 64, "precision must be at least 64 bits");
    const int d = modforms::dim_cusp(k);
    require(idx >= 1 && idx <= d, "index outside 1..dim S_k");
    const int want_terms = nterms > 0 ? nterms : modforms::default_nterms(k);
    if (cache_dir && !force) {
      const fs::path p = fs::path(cache_dir) / modforms::cache_file_name(k, idx);
      if (fs::exists(p)) {
        try {
          auto f = modforms::load_eigenform(p.string());
          if (f.weight == k && f.dim_index == idx && f.precision_bits >= precision_bits && f.nterms >= want_terms) {
            *out = new cz_eigenform{std::move(f)};
            if (from_cache) *from_cache = 1;
            return CZ_OK;
          }
        } catch (const Error&) {
          // unreadable or corrupted: rebuild below
        }
      }
    }
    auto forms = modforms::eigenforms(k, precision_bits, want_terms);
    if (cache_dir) {
      fs::create_directories(cache_dir);
      for (const auto& f : forms)
        modforms::save_eigenform(f, (fs::path(cache_dir) / modforms::cache_file_name(k, f.dim_index)).string());
    }
    *out = new cz_eigenform{std::move(forms[idx - 1])};
    return CZ_OK;
  });
}

cz_status cz_eigenform_load(const char* path, cz_eigenform** out) {
  if (!path || !out) return invalid("NULL argument");
  return guarded([&] {
    *out = new cz_eigenform{modforms::load_eigenform(path)};
    return CZ_OK;
  });
}

cz_status cz_eigenform_save(const cz_eigenform* f, const char* path) {
  if (!f || !path) return invalid("NULL argument");
  return guarded([&] {
    modforms::save_eigenform(f->f, path);
    return CZ_OK;
  });
}

void cz_eigenform_free(cz_eigenform* f) { delete f; }

cz_status cz_eigenform_info(const cz_eigenform* f, int* weight, int* idx, int* precision_bits, int* nterms) {
  if (!f) return invalid("NULL handle");
  if (weight) *weight = f->f.weight;
  if (idx) *idx = f->f.dim_index;
  if (precision_bits) *precision_bits = f->f.precision_bits;
  if (nterms) *nterms = f->f.nterms;
  g_last_error.clear();
  return CZ_OK;
}

cz_status cz_lambda(const cz_eigenform* f, long n, double* out) {
  if (!f || !out) return invalid("NULL argument");
  return guarded([&] {
    *out = modforms::lambda_double(f->f, n);
    return CZ_OK;
  });
}

cz_status cz_lambda_string(const cz_eigenform* f, long n, int digits, char* buf, size_t len) {
  if (!f || !buf || len == 0) return invalid("NULL argument");
  return guarded([&] {
    require(digits >= 2, "digits must be at least 2");
    const std::string s = modforms::lambda(f->f, n).to_string(digits);
    if (s.size() + 1 > len) return invalid("buffer too small");
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return CZ_OK;
  });
}

cz_status cz_verify_hecke(const cz_eigenform* f, double tol, double* max_residual, int* pass) {
  if (!f) return invalid("NULL handle");
  return guarded([&] {
    const auto r = modforms::verify_hecke(f->f, tol);
    if (max_residual) *max_residual = r.max_residual;
    if (pass) *pass = r.pass ? 1 : 0;
    return CZ_OK;
  });
}

cz_status cz_f_value(const cz_eigenform* f, double alpha, double y, double rel_tol, double* log_mag, double* phase,
                     double* log_tail) {
  if (!f) return invalid("NULL handle");
  return guarded([&] {
    const auto z = eval::f_value(f->f, eval::make_point(alpha, y), rel_tol);
    if (log_mag) *log_mag = z.log_mag;
    if (phase) *phase = z.phase;
    if (log_tail) *log_tail = z.log_tail;
    return CZ_OK;
  });
}

cz_status cz_real_value(const cz_eigenform* f, cz_segment seg, double param, double* value, double* error,
                        double* log_scale, int* sign) {
  SegmentTag tag;
  if (!f) return invalid("NULL handle");
  if (!to_tag(seg, tag)) return invalid("unknown segment");
  return guarded([&] {
    const auto cv = census::restrict_real(f->f, tag, param);
    if (value) *value = cv.value;
    if (error) *error = cv.error;
    if (log_scale) *log_scale = cv.log_scale;
    if (sign) *sign = cv.sign;
    return CZ_OK;
  });
}

cz_status cz_winding_count(const cz_eigenform* f, double y, int* count) {
  if (!f || !count) return invalid("NULL argument");
  return guarded([&] {
    *count = census::winding_count(f->f, y);
    return CZ_OK;
  });
}

cz_status cz_ladder_residual(const cz_eigenform* f, int l, double alpha, double y, double* out) {
  if (!f || !out) return invalid("NULL argument");
  return guarded([&] {
    *out = eval::ladder_residual(f->f, l, alpha, y);
    return CZ_OK;
  });
}

cz_status cz_theorem2_residual(const cz_eigenform* f, int l, double alpha, double delta, double* out) {
  if (!f || !out) return invalid("NULL argument");
  return guarded([&] {
    *out = eval::theorem2_residual(f->f, l, alpha, delta);
    return CZ_OK;
  });
}

void cz_census_options_default(cz_census_options* opt) {
  if (!opt) return;
  const census::CensusConfig c;
  opt->Ys = nullptr;
  opt->nY = 0;
  opt->tol = c.tol;
  opt->t_step = c.scan.t_step;
  opt->arc_points = c.scan.arc_points;
  opt->ladder_max = c.ladder_max;
  opt->with_predictions = 1;
  opt->with_witnesses = 0;
}

cz_status cz_census_run(const cz_eigenform* f, const cz_census_options* opt, cz_census** out) {
  if (!f || !out) return invalid("NULL argument");
  cz_census_options o;
  cz_census_options_default(&o);
  if (opt) o = *opt;
  if (o.nY < 0 || (o.nY > 0 && !o.Ys)) return invalid("bad Y list");
  return guarded([&] {
    *out = nullptr;
    require(o.tol > 0 && o.t_step > 0, "tolerance and step must be positive");
    census::CensusConfig cfg;
    cfg.Ys.assign(o.Ys, o.Ys + o.nY);
    cfg.tol = o.tol;
    cfg.scan.t_step = o.t_step;
    cfg.scan.arc_points = o.arc_points;
    cfg.ladder_max = o.ladder_max;
    if (o.with_predictions) {
      census::Predictions p;
      double lo, hi;
      const double k = f->f.weight;
      model::default_range(k, SegmentTag::Delta1, lo, hi);
      p.delta1 = model::expected_count(k, SegmentTag::Delta1, lo, hi);
      model::default_range(k, SegmentTag::Delta2, lo, hi);
      p.delta2 = model::expected_count(k, SegmentTag::Delta2, lo, hi);
      model::default_range(k, SegmentTag::Delta3, lo, hi);
      p.delta3 = model::expected_count(k, SegmentTag::Delta3, lo, hi);
      cfg.predictions = p;
    }
    auto c = std::make_unique<cz_census>();
    c->report = census::census_report(f->f, cfg);
    if (o.with_witnesses) c->witnesses = witness_rows(f->f);
    *out = c.release();
    return CZ_OK;
  });
}

void cz_census_free(cz_census* c) { delete c; }

cz_status cz_census_counts(const cz_census* c, int* n1, int* n2, int* n3) {
  if (!c) return invalid("NULL handle");
  if (n1) *n1 = c->report.n_delta1;
  if (n2) *n2 = c->report.n_delta2;
  if (n3) *n3 = c->report.n_delta3;
  g_last_error.clear();
  return CZ_OK;
}

int cz_census_zero_count(const cz_census* c) { return c ? static_cast<int>(c->report.zeros.size()) : 0; }

cz_status cz_census_zero(const cz_census* c, int i, cz_segment* seg, double* lo, double* hi, double* location,
                         int* corner) {
  if (!c) return invalid("NULL handle");
  if (i < 0 || i >= cz_census_zero_count(c)) return invalid("zero index out of range");
  const auto& z = c->report.zeros[i];
  if (seg) *seg = from_tag(z.segment);
  if (lo) *lo = z.param_lo;
  if (hi) *hi = z.param_hi;
  if (location) *location = z.location;
  if (corner) *corner = z.corner ? 1 : 0;
  g_last_error.clear();
  return CZ_OK;
}

int cz_census_siegel_count(const cz_census* c) { return c ? static_cast<int>(c->report.siegel.size()) : 0; }

cz_status cz_census_siegel(const cz_census* c, int i, double* Y, int* total, int* real_zeros, double* ratio, int* ok) {
  if (!c) return invalid("NULL handle");
  if (i < 0 || i >= cz_census_siegel_count(c)) return invalid("Siegel index out of range");
  const auto& s = c->report.siegel[i];
  if (Y) *Y = s.Y_used;
  if (total) *total = s.total;
  if (real_zeros) *real_zeros = s.real_delta1 + s.real_delta2;
  if (ratio) *ratio = s.ratio ? *s.ratio : NAN;
  if (ok) *ok = s.status == "ok" ? 1 : 0;
  g_last_error.clear();
  return CZ_OK;
}

int cz_census_error_count(const cz_census* c) { return c ? static_cast<int>(c->report.errors.size()) : 0; }

cz_status cz_census_write_zeros(const cz_census* c, const char* path) {
  if (!c || !path) return invalid("NULL argument");
  return guarded([&] {
    const std::string tmp = std::string(path) + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) fail(ErrorKind::Io, std::string("cannot write ") + tmp);
      census::write_zero_csv(out, c->report, c->witnesses);
      if (!out) fail(ErrorKind::Io, std::string("write failed: ") + tmp);
    }
    fs::rename(tmp, path);
    return CZ_OK;
  });
}

cz_status cz_census_append_summary(const cz_census* c, const char* path) {
  if (!c || !path) return invalid("NULL argument");
  return guarded([&] {
    const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) fail(ErrorKind::Io, std::string("cannot write ") + path);
    if (fresh) census::write_summary_header(out);
    census::write_summary_rows(out, c->report);
    if (!out) fail(ErrorKind::Io, std::string("write failed: ") + path);
    return CZ_OK;
  });
}

cz_status cz_omega(const cz_eigenform* f, int* omega) {
  if (!f || !omega) return invalid("NULL argument");
  return guarded([&] {
    *omega = signs::omega(f->f);
    return CZ_OK;
  });
}

cz_status cz_first_negative(const cz_eigenform* f, double eps0, long* n, double* lambda_n, int* found) {
  if (!f) return invalid("NULL handle");
  return guarded([&] {
    const auto r = signs::first_negative(f->f, eps0);
    if (n) *n = r.n;
    if (lambda_n) *lambda_n = r.lambda;
    if (found) *found = r.found ? 1 : 0;
    return CZ_OK;
  });
}

cz_status cz_lemma_a_exponent(const cz_eigenform* f, long p, int J, int B_cap, int* b) {
  if (!f || !b) return invalid("NULL argument");
  return guarded([&] {
    const auto r = signs::lemma_a_exponent(f->f, p, J, B_cap);
    if (!r) {
      g_last_error = "no exponent within the search budget";
      return CZ_ERR_NOT_FOUND;
    }
    *b = *r;
    return CZ_OK;
  });
}

cz_status cz_coprime_pair(const cz_eigenform* f, double xi, long* m1, long* m2) {
  if (!f || !m1 || !m2) return invalid("NULL argument");
  return guarded([&] {
    const auto r = signs::coprime_pair(f->f, xi);
    if (!r) {
      g_last_error = "no coprime pair in the interval";
      return CZ_ERR_NOT_FOUND;
    }
    *m1 = r->m1;
    *m2 = r->m2;
    return CZ_OK;
  });
}

cz_status cz_delta2_witness_count(const cz_eigenform* f, double X, int* count) {
  if (!f || !count) return invalid("NULL argument");
  return guarded([&] {
    *count = static_cast<int>(signs::delta2_witnesses(f->f, X).witnesses.size());
    return CZ_OK;
  });
}

cz_status cz_parity_pair_count(const cz_eigenform* f, double X, long H, int* count) {
  if (!f || !count) return invalid("NULL argument");
  return guarded([&] {
    *count = static_cast<int>(signs::build_parity_pairs(f->f, X, H).pairs.size());
    return CZ_OK;
  });
}

cz_status cz_ek_density(double k, double alpha, double y, double* out) {
  if (!out) return invalid("NULL argument");
  return guarded([&] {
    *out = model::ek_density(k, alpha, y);
    return CZ_OK;
  });
}

cz_status cz_stitched_density(double k, double y, double* out) {
  if (!out) return invalid("NULL argument");
  return guarded([&] {
    *out = model::stitched_density(k, y);
    return CZ_OK;
  });
}

cz_status cz_expected_count(double k, cz_segment seg, double lo, double hi, double* out) {
  SegmentTag tag;
  if (!out) return invalid("NULL argument");
  if (!to_tag(seg, tag)) return invalid("unknown segment");
  return guarded([&] {
    if (lo > hi) model::default_range(k, tag, lo, hi);
    *out = model::expected_count(k, tag, lo, hi);
    return CZ_OK;
  });
}

cz_status cz_density_profile_csv(double k, cz_segment seg, double lo, double hi, int points, const char* path,
                                 double* integrated) {
  SegmentTag tag;
  if (!path) return invalid("NULL argument");
  if (!to_tag(seg, tag)) return invalid("unknown segment");
  return guarded([&] {
    if (lo > hi) model::default_range(k, tag, lo, hi);
    const auto prof = model::density_profile(k, tag, lo, hi, points);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, std::string("cannot write ") + path);
    out << "y,density\n";
    for (const auto& [y, d] : prof.samples) out << num(y) << ',' << num(d) << '\n';
    if (!out) fail(ErrorKind::Io, std::string("write failed: ") + path);
    if (integrated) *integrated = prof.integrated;
    return CZ_OK;
  });
}

cz_status cz_monte_carlo(double k, cz_segment seg, double lo, double hi, int trials, uint64_t seed, double coeff_scale,
                         double* mean, double* stderr_out, int* counts) {
  SegmentTag tag;
  if (!to_tag(seg, tag)) return invalid("unknown segment");
  return guarded([&] {
    model::McOptions opt;
    opt.coeff_scale = coeff_scale;
    const auto r = model::monte_carlo(k, tag, lo, hi, trials, seed, opt);
    if (mean) *mean = r.mean;
    if (stderr_out) *stderr_out = r.stderr_;
    if (counts) std::copy(r.counts.begin(), r.counts.end(), counts);
    return CZ_OK;
  });
}

}  // extern "C"
