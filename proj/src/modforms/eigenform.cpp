#include "modforms/eigenform.hpp"

#include "common/errors.hpp"
#include "common/numtheory.hpp"
#include "modforms/charpoly.hpp"
#include "modforms/qexp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace cuspzero::modforms {

int default_nterms(int k) {
  const double kd = k;
  return static_cast<int>(std::ceil(kd / (2 * M_PI)) + std::ceil(4 * std::sqrt(kd * std::log(kd)) / (2 * M_PI))) + 16;
}

namespace {

const std::string kChecksumTag = "CHECKSUM ";

// FNV-1a, 64 bit.
std::string checksum_hex(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

using RealMatrix = std::vector<std::vector<Real>>;

// Polynomial in t with MPFR coefficients, evaluated together with its derivative.
struct TPoly {
  std::vector<Real> c;  // c[j] multiplies t^j
  mpfr_prec_t prec;
  void eval(const Real& t, Real& p, Real& dp) const {
    const size_t d = c.size() - 1;
    p = Real(prec);
    dp = Real(prec);
    mpfr_set(p.get(), c[d].get(), MPFR_RNDN);
    for (size_t j = d; j-- > 0;) {
      mpfr_mul(dp.get(), dp.get(), t.get(), MPFR_RNDN);
      mpfr_add(dp.get(), dp.get(), p.get(), MPFR_RNDN);
      mpfr_mul(p.get(), p.get(), t.get(), MPFR_RNDN);
      mpfr_add(p.get(), p.get(), c[j].get(), MPFR_RNDN);
    }
  }
  int sign_at(const Real& t) const {
    Real p(prec), dp(prec);
    eval(t, p, dp);
    return p.sign();
  }
};

int exact_sign(const std::vector<mpz_class>& c, const mpz_class& x) {
  mpz_class acc = c.back();
  for (size_t j = c.size() - 1; j-- > 0;) acc = acc * x + c[j];
  return sgn(acc);
}

struct Bracket {
  Real lo, hi;
};

// Isolate all d real roots of the normalised polynomial in (-2, 2) and certify them
// with exact integer sign evaluations of the original polynomial at x = t * scale.
std::vector<Real> isolate_roots(const std::vector<mpz_class>& cp, const Real& scale, mpfr_prec_t prec) {
  const size_t d = cp.size() - 1;
  TPoly poly;
  poly.prec = prec;
  poly.c.resize(d + 1);
  Real inv_scale = Real(1L, prec) / scale;
  Real sp(1L, prec);
  for (size_t j = d + 1; j-- > 0;) {
    poly.c[j] = Real(cp[j], prec) * sp;
    sp *= inv_scale;
  }

  const Real lo_end(-2.0, prec), hi_end(2.0, prec);
  std::vector<Real> grid;
  std::vector<int> signs;
  size_t npts = 16 * d + 1;
  const size_t max_pts = size_t(1) << 22;
  std::vector<Bracket> brackets;
  while (true) {
    std::vector<Real> g(npts);
    std::vector<int> s(npts);
    for (size_t i = 0; i < npts; ++i) {
      if (!grid.empty() && i % 2 == 0) {
        g[i] = grid[i / 2];
        s[i] = signs[i / 2];
        continue;
      }
      g[i] = lo_end + (hi_end - lo_end) * Real(static_cast<long>(i), prec) / Real(static_cast<long>(npts - 1), prec);
      s[i] = poly.sign_at(g[i]);
    }
    grid.swap(g);
    signs.swap(s);
    brackets.clear();
    for (size_t i = 0; i + 1 < npts; ++i) {
      if (signs[i] == 0) fail(ErrorKind::NumericFailure, "root isolation: grid point hits a root");
      if (signs[i] != signs[i + 1]) brackets.push_back({grid[i], grid[i + 1]});
    }
    if (brackets.size() == d) break;
    if (npts * 2 > max_pts)
      fail(ErrorKind::NumericFailure, "Hecke eigenvalues coincide within the isolation resolution");
    npts = 2 * npts - 1;
  }

  std::vector<Real> roots;
  std::vector<std::pair<mpz_class, mpz_class>> certs;
  const Real width_target(std::ldexp(1.0, -40), prec);
  for (auto& br : brackets) {
    int s_lo = poly.sign_at(br.lo);
    while (br.hi - br.lo > width_target) {
      Real mid = (br.lo + br.hi) / 2L;
      int sm = poly.sign_at(mid);
      if (sm == 0) {
        br.lo = mid;
        br.hi = mid;
        break;
      }
      if (sm == s_lo)
        br.lo = mid;
      else
        br.hi = mid;
    }
    // Newton polish, kept inside the bracket.
    Real t = (br.lo + br.hi) / 2L, p(prec), dp(prec);
    const Real pad(std::ldexp(1.0, -36), prec);
    const Real lo_guard = br.lo - pad, hi_guard = br.hi + pad;
    for (int it = 0; it < 64; ++it) {
      poly.eval(t, p, dp);
      if (p.is_zero() || dp.is_zero()) break;
      Real step = p / dp;
      t -= step;
      if (t < lo_guard || t > hi_guard) fail(ErrorKind::NumericFailure, "root isolation: Newton left its bracket");
      if (step.is_zero() || abs(step).exponent() < -(static_cast<long>(prec) - 8)) break;
    }
    roots.push_back(t);
    certs.emplace_back(floor_to_mpz(lo_guard * scale), ceil_to_mpz(hi_guard * scale));
  }
  for (size_t i = 0; i < d; ++i) {
    const auto& [xl, xh] = certs[i];
    if (i + 1 < d && !(xh < certs[i + 1].first))
      fail(ErrorKind::NumericFailure, "root isolation: certified brackets overlap");
    if (exact_sign(cp, xl) * exact_sign(cp, xh) >= 0)
      fail(ErrorKind::NumericFailure, "root isolation: exact sign check failed");
  }
  return roots;
}

// Gaussian similarity reduction to upper Hessenberg form; z accumulates the transform
// so that n * z = z * h.
void hessenberg(RealMatrix& h, RealMatrix& z) {
  const size_t d = h.size();
  for (size_t c = 0; c + 2 < d; ++c) {
    size_t piv = c + 1;
    for (size_t i = c + 2; i < d; ++i)
      if (mpfr_cmpabs(h[i][c].get(), h[piv][c].get()) > 0) piv = i;
    if (h[piv][c].is_zero()) continue;
    if (piv != c + 1) {
      std::swap(h[piv], h[c + 1]);
      for (size_t i = 0; i < d; ++i) {
        std::swap(h[i][piv], h[i][c + 1]);
        std::swap(z[i][piv], z[i][c + 1]);
      }
    }
    const mpfr_prec_t prec = h[c + 1][c].precision();
    Real f(prec), tmp(prec);
    for (size_t i = c + 2; i < d; ++i) {
      if (h[i][c].is_zero()) continue;
      mpfr_div(f.get(), h[i][c].get(), h[c + 1][c].get(), MPFR_RNDN);
      for (size_t j = c; j < d; ++j) {
        mpfr_mul(tmp.get(), f.get(), h[c + 1][j].get(), MPFR_RNDN);
        mpfr_sub(h[i][j].get(), h[i][j].get(), tmp.get(), MPFR_RNDN);
      }
      for (size_t r = 0; r < d; ++r) {
        mpfr_mul(tmp.get(), f.get(), h[r][i].get(), MPFR_RNDN);
        mpfr_add(h[r][c + 1].get(), h[r][c + 1].get(), tmp.get(), MPFR_RNDN);
        mpfr_mul(tmp.get(), f.get(), z[r][i].get(), MPFR_RNDN);
        mpfr_add(z[r][c + 1].get(), z[r][c + 1].get(), tmp.get(), MPFR_RNDN);
      }
    }
  }
}

// Inverse iteration for the eigenvector of Hessenberg h at eigenvalue t.
std::vector<Real> hessenberg_eigenvector(const RealMatrix& h, const Real& t, mpfr_prec_t prec) {
  const size_t d = h.size();
  RealMatrix a = h;
  for (size_t i = 0; i < d; ++i) a[i][i] -= t;
  std::vector<Real> mult(d, Real(prec));
  std::vector<char> swapped(d, 0);
  Real tmp(prec);
  for (size_t j = 0; j + 1 < d; ++j) {
    if (mpfr_cmpabs(a[j + 1][j].get(), a[j][j].get()) > 0) {
      std::swap(a[j], a[j + 1]);
      swapped[j] = 1;
    }
    if (a[j][j].is_zero()) continue;
    mpfr_div(mult[j].get(), a[j + 1][j].get(), a[j][j].get(), MPFR_RNDN);
    for (size_t c = j + 1; c < d; ++c) {
      mpfr_mul(tmp.get(), mult[j].get(), a[j][c].get(), MPFR_RNDN);
      mpfr_sub(a[j + 1][c].get(), a[j + 1][c].get(), tmp.get(), MPFR_RNDN);
    }
  }
  Real tiny(prec);
  mpfr_set_ui_2exp(tiny.get(), 1, -static_cast<long>(prec), MPFR_RNDN);
  for (size_t i = 0; i < d; ++i)
    if (a[i][i].is_zero()) a[i][i] = tiny;

  std::vector<Real> w(d, Real(1L, prec));
  for (int iter = 0; iter < 3; ++iter) {
    for (size_t j = 0; j + 1 < d; ++j) {
      if (swapped[j]) std::swap(w[j], w[j + 1]);
      mpfr_mul(tmp.get(), mult[j].get(), w[j].get(), MPFR_RNDN);
      mpfr_sub(w[j + 1].get(), w[j + 1].get(), tmp.get(), MPFR_RNDN);
    }
    for (size_t i = d; i-- > 0;) {
      for (size_t c = i + 1; c < d; ++c) {
        mpfr_mul(tmp.get(), a[i][c].get(), w[c].get(), MPFR_RNDN);
        mpfr_sub(w[i].get(), w[i].get(), tmp.get(), MPFR_RNDN);
      }
      mpfr_div(w[i].get(), w[i].get(), a[i][i].get(), MPFR_RNDN);
    }
    Real mx(prec);
    for (auto& v : w)
      if (mpfr_cmpabs(v.get(), mx.get()) > 0) mpfr_abs(mx.get(), v.get(), MPFR_RNDN);
    for (auto& v : w) v /= mx;
  }
  return w;
}

void fill_doubles(Eigenform& f) {
  f.lambdas_d.resize(f.lambdas.size());
  for (size_t n = 0; n < f.lambdas.size(); ++n) f.lambdas_d[n] = f.lambdas[n].to_double();
}

}  // namespace

std::vector<Eigenform> eigenforms_once(int k, int precision_bits, int nterms) {
  require(k % 2 == 0 && k >= 12, "eigenforms: weight must be even and at least 12");
  require(precision_bits >= 64, "eigenforms: precision_bits must be at least 64");
  if (nterms <= 0) nterms = default_nterms(k);
  const int d = dim_cusp(k);
  if (d == 0) return {};
  const int nb = std::max(nterms, 2 * d + 2);
  const auto basis = miller_basis(k, nb);
  const double kh = (k - 1) / 2.0;

  // Working precision: target plus headroom for polynomial evaluation and basis cancellation.
  mpfr_prec_t work = precision_bits + 64 + static_cast<mpfr_prec_t>(std::ceil(1.6 * d));
  const Real kh_r = Real(static_cast<long>(k - 1), work) / 2L;

  std::vector<std::vector<Real>> lam;  // per eigenform, indices 0..nterms
  if (d == 1) {
    std::vector<Real> v(static_cast<size_t>(nterms) + 1, Real(work));
    for (int n = 1; n <= nterms; ++n)
      v[n] = Real(basis[0].coeffs[n], work) / pow(Real(static_cast<long>(n), work), kh_r);
    lam.push_back(std::move(v));
  } else {
    const IntMatrix m = hecke_matrix(k, 2, basis);
    double bound_bits = 0;
    for (int j = 0; j <= d; ++j) {
      double lc = (std::lgamma(d + 1.0) - std::lgamma(j + 1.0) - std::lgamma(d - j + 1.0)) / std::log(2.0);
      bound_bits = std::max(bound_bits, lc + j * (kh + 1.0));
    }
    const auto cp = charpoly_multimodular(m, bound_bits);

    for (int attempt = 0;; ++attempt) {
      const Real scale = pow(Real(2L, work), kh_r);
      const auto roots = isolate_roots(cp, scale, work);

      // Hecke matrix in lambda coordinates: n_ij = m_ij (j/i)^kh / 2^kh.
      std::vector<Real> jp(static_cast<size_t>(nb) + 1, Real(work));
      for (int j = 1; j <= nb; ++j) jp[j] = pow(Real(static_cast<long>(j), work), kh_r);
      RealMatrix nmat(d, std::vector<Real>(d, Real(work)));
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) nmat[i][j] = Real(m[i][j], work) * jp[j + 1] / (jp[i + 1] * scale);
      RealMatrix z(d, std::vector<Real>(d, Real(work)));
      for (int i = 0; i < d; ++i) z[i][i] = Real(1L, work);
      RealMatrix h = nmat;
      hessenberg(h, z);

      // b_jn = g_j(n) j^kh, so lambda(n) = n^-kh sum_j v_j b_jn.
      RealMatrix b(d, std::vector<Real>(static_cast<size_t>(nterms) + 1, Real(work)));
      double worst_mag = 0;
      for (int j = 0; j < d; ++j)
        for (int n = d + 1; n <= nterms; ++n) b[j][n] = Real(basis[j].coeffs[n], work) * jp[j + 1];

      lam.clear();
      Real tmp(work), acc(work), mag(work);
      for (int e = 0; e < d; ++e) {
        auto w = hessenberg_eigenvector(h, roots[e], work);
        std::vector<Real> v(d, Real(work));
        for (int i = 0; i < d; ++i)
          for (int c = 0; c < d; ++c) {
            mpfr_mul(tmp.get(), z[i][c].get(), w[c].get(), MPFR_RNDN);
            mpfr_add(v[i].get(), v[i].get(), tmp.get(), MPFR_RNDN);
          }
        if (v[0].is_zero()) fail(ErrorKind::NumericFailure, "eigenvector has zero first coordinate");
        const Real v0 = v[0];
        for (auto& x : v) x /= v0;
        std::vector<Real> out(static_cast<size_t>(nterms) + 1, Real(work));
        for (int n = 1; n <= std::min(d, nterms); ++n) out[n] = v[n - 1];
        for (int n = d + 1; n <= nterms; ++n) {
          mpfr_set_zero(acc.get(), 1);
          mpfr_set_zero(mag.get(), 1);
          for (int j = 0; j < d; ++j) {
            mpfr_mul(tmp.get(), v[j].get(), b[j][n].get(), MPFR_RNDN);
            mpfr_add(acc.get(), acc.get(), tmp.get(), MPFR_RNDN);
            mpfr_abs(tmp.get(), tmp.get(), MPFR_RNDN);
            mpfr_add(mag.get(), mag.get(), tmp.get(), MPFR_RNDN);
          }
          out[n] = acc / jp[n];
          worst_mag = std::max(worst_mag, (mag / jp[n]).to_double());
        }
        lam.push_back(std::move(out));
      }
      // Re-run with more bits if cancellation ate into the target precision.
      const double cancel_bits = worst_mag > 1 ? std::log2(worst_mag) : 0.0;
      if (work >= precision_bits + 32 + cancel_bits || attempt >= 2) break;
      work = static_cast<mpfr_prec_t>(precision_bits + 64 + 1.6 * d + cancel_bits);
    }
  }

  std::vector<Eigenform> out;
  for (auto& v : lam) {
    Eigenform f;
    f.weight = k;
    f.precision_bits = precision_bits;
    f.nterms = nterms;
    f.lambdas.resize(static_cast<size_t>(nterms) + 1, Real(precision_bits));
    for (int n = 1; n <= nterms; ++n) {
      f.lambdas[n] = v[n];
      f.lambdas[n].round_to(precision_bits);
    }
    if (d == 1) f.exact.assign(basis[0].coeffs.begin(), basis[0].coeffs.begin() + nterms + 1);
    fill_doubles(f);
    out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end(), [](const Eigenform& a, const Eigenform& b) {
    if (a.lambdas[2] == b.lambdas[2]) return a.lambdas[3] < b.lambdas[3];
    return a.lambdas[2] < b.lambdas[2];
  });
  for (size_t i = 0; i < out.size(); ++i) out[i].dim_index = static_cast<int>(i) + 1;
  return out;
}

std::vector<Eigenform> eigenforms(int k, int precision_bits, int nterms) {
  auto forms = eigenforms_once(k, precision_bits, nterms);
  const double tol = std::ldexp(1.0, -precision_bits / 2);
  for (const auto& f : forms)
    if (!verify_hecke(f, tol).pass) {
      const int escalated = 2 * precision_bits;
      forms = eigenforms_once(k, escalated, nterms);
      for (const auto& g : forms) {
        auto rep = verify_hecke(g, std::ldexp(1.0, -escalated / 2));
        if (!rep.pass)
          fail(ErrorKind::NumericFailure, "eigenform failed Hecke verification after escalation: " + rep.worst_relation);
      }
      return forms;
    }
  return forms;
}

Real lambda(const Eigenform& f, long n) {
  require(n >= 1, "lambda: n must be positive");
  if (n <= f.nterms) return f.lambdas[n];
  Real r(1L, f.precision_bits);
  for (auto [p, e] : factorize(n)) {
    long pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    if (pe <= f.nterms) {
      r *= f.lambdas[pe];
      continue;
    }
    if (p > f.nterms)
      fail(ErrorKind::InsufficientCoefficients, "lambda: cannot assemble lambda(" + std::to_string(n) + ")");
    // Climb from the largest stored power using lambda(p^(j+1)) = lambda(p) lambda(p^j) - lambda(p^(j-1)).
    Real prev(1L, f.precision_bits), cur = f.lambdas[p];
    for (int j = 1; j < e; ++j) {
      Real next = f.lambdas[p] * cur - prev;
      prev = std::move(cur);
      cur = std::move(next);
    }
    r *= cur;
  }
  return r;
}

double lambda_double(const Eigenform& f, long n) {
  if (n >= 1 && n <= f.nterms) return f.lambdas_d[n];
  return lambda(f, n).to_double();
}

HeckeReport verify_hecke(const Eigenform& f, double tol) {
  HeckeReport rep;
  const mpfr_prec_t prec = f.precision_bits;
  auto note = [&](const Real& resid, const std::string& what) {
    double r = abs(resid).to_double();
    if (!(r <= rep.max_residual)) {
      rep.max_residual = std::isnan(r) ? INFINITY : r;
      rep.worst_relation = what;
    }
  };
  const long N = f.nterms;
  if (N < 1) return rep;
  note(f.lambdas[1] - Real(1L, prec), "lambda(1) = 1");
  for (long n = 2; n <= N; ++n) {
    auto fac = factorize(n);
    if (fac.size() == 1) {
      auto [p, e] = fac[0];
      if (e == 1) {
        if (abs(f.lambdas[p]).to_double() > 2 + tol) {
          rep.deligne_ok = false;
          rep.worst_relation = "Deligne bound at p=" + std::to_string(p);
        }
        continue;
      }
      long pe1 = n / p, pe2 = pe1 / p;
      Real lhs = f.lambdas[p] * f.lambdas[pe1];
      Real rhs = f.lambdas[n] + f.lambdas[pe2];
      note(lhs - rhs, "prime power recursion at n=" + std::to_string(n));
      continue;
    }
    Real prod(1L, prec);
    for (auto [p, e] : fac) {
      long pe = 1;
      for (int i = 0; i < e; ++i) pe *= p;
      prod *= f.lambdas[pe];
    }
    note(prod - f.lambdas[n], "multiplicativity at n=" + std::to_string(n));
  }
  rep.pass = rep.deligne_ok && rep.max_residual <= tol;
  return rep;
}

std::string cache_file_name(int k, int idx) {
  return "eigen_k" + std::to_string(k) + "_i" + std::to_string(idx) + ".txt";
}

namespace {
int digits_for(int prec) { return static_cast<int>(std::ceil(prec * std::log10(2.0))) + 1; }

int mantissa_digits(const std::string& s) {
  int count = 0;
  for (char c : s) {
    if (c == 'e' || c == 'E') break;
    if (c >= '0' && c <= '9') ++count;
  }
  return count;
}
}  // namespace

void save_eigenform(const Eigenform& f, const std::string& path) {
  std::ostringstream body;
  body << "CUSPZERO-EIGEN v2 k=" << f.weight << " idx=" << f.dim_index << " prec=" << f.precision_bits
       << " nterms=" << f.nterms << "\n";
  const int digits = digits_for(f.precision_bits);
  for (int n = 1; n <= f.nterms; ++n) body << n << ' ' << f.lambdas[n].to_string(digits) << '\n';
  if (!f.exact.empty()) {
    body << "EXACT\n";
    for (int n = 1; n <= f.nterms; ++n) body << n << ' ' << f.exact[n].get_str() << '\n';
  }
  const std::string text = body.str();
  // Unique per writer so concurrent saves of the same file cannot interleave.
  const std::string tmp =
      path + ".tmp" + std::to_string(::getpid()) + "_" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  std::ofstream out(tmp);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << text << kChecksumTag << checksum_hex(text) << '\n';
  out.close();
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
  if (std::rename(tmp.c_str(), path.c_str()) != 0) fail(ErrorKind::Io, "cannot rename into " + path);
}

Eigenform load_eigenform(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) fail(ErrorKind::Io, "cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  // The last line carries a checksum of everything before it.
  const size_t tag = text.rfind(kChecksumTag);
  if (tag == std::string::npos || (tag > 0 && text[tag - 1] != '\n'))
    fail(ErrorKind::Format, path + ": missing checksum");
  const std::string body = text.substr(0, tag);
  if (text.substr(tag) != kChecksumTag + checksum_hex(body) + "\n") fail(ErrorKind::Format, path + ": checksum mismatch");
  std::istringstream in(body);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Format, path + ": empty file");
  std::istringstream hs(line);
  std::string magic, version;
  hs >> magic >> version;
  if (magic != "CUSPZERO-EIGEN") fail(ErrorKind::Format, path + ": not an eigenform cache file");
  if (version != "v2") fail(ErrorKind::Format, path + ": unsupported version " + version);
  std::map<std::string, long> fields;
  std::string tok;
  while (hs >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Format, path + ": malformed header field " + tok);
    try {
      fields[tok.substr(0, eq)] = std::stol(tok.substr(eq + 1));
    } catch (const std::exception&) {
      fail(ErrorKind::Format, path + ": malformed header field " + tok);
    }
  }
  for (const char* key : {"k", "idx", "prec", "nterms"})
    if (!fields.count(key)) fail(ErrorKind::Format, path + ": header missing " + key);
  Eigenform f;
  f.weight = static_cast<int>(fields["k"]);
  f.dim_index = static_cast<int>(fields["idx"]);
  f.precision_bits = static_cast<int>(fields["prec"]);
  f.nterms = static_cast<int>(fields["nterms"]);
  if (f.weight < 12 || f.precision_bits < 2 || f.nterms < 1 || f.nterms > 100000000)
    fail(ErrorKind::Format, path + ": header values out of range");
  const int digits = digits_for(f.precision_bits);
  f.lambdas.assign(static_cast<size_t>(f.nterms) + 1, Real(f.precision_bits));
  for (int n = 1; n <= f.nterms; ++n) {
    if (!std::getline(in, line)) fail(ErrorKind::Format, path + ": truncated at n=" + std::to_string(n));
    std::istringstream ls(line);
    long idx = 0;
    std::string val, extra;
    if (!(ls >> idx >> val) || (ls >> extra) || idx != n)
      fail(ErrorKind::Format, path + ": malformed line for n=" + std::to_string(n));
    if (mantissa_digits(val) != digits)
      fail(ErrorKind::Format, path + ": digit count mismatch at n=" + std::to_string(n));
    try {
      f.lambdas[n] = Real::parse(val, f.precision_bits);
    } catch (const std::exception& e) {
      fail(ErrorKind::Format, path + ": " + e.what());
    }
  }
  if (std::getline(in, line)) {
    if (line != "EXACT") fail(ErrorKind::Format, path + ": unexpected trailing content");
    f.exact.assign(static_cast<size_t>(f.nterms) + 1, 0);
    for (int n = 1; n <= f.nterms; ++n) {
      if (!std::getline(in, line)) fail(ErrorKind::Format, path + ": truncated EXACT section");
      std::istringstream ls(line);
      long idx = 0;
      std::string val;
      if (!(ls >> idx >> val) || idx != n || f.exact[n].set_str(val, 10) != 0)
        fail(ErrorKind::Format, path + ": malformed EXACT line for n=" + std::to_string(n));
    }
    if (std::getline(in, line) && !line.empty()) fail(ErrorKind::Format, path + ": unexpected trailing content");
  }
  fill_doubles(f);
  return f;
}

}  // namespace cuspzero::modforms
