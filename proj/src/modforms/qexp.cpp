#include "modforms/qexp.hpp"

#include "common/errors.hpp"
#include "common/numtheory.hpp"

#include <string>

namespace cuspzero::modforms {

QExpansion eisenstein_qexp(int k, int nterms) {
  require(k == 4 || k == 6, "eisenstein_qexp supports weights 4 and 6, got " + std::to_string(k));
  require(nterms >= 0, "nterms must be non-negative");
  QExpansion e;
  e.weight = k;
  e.coeffs.resize(static_cast<size_t>(nterms) + 1);
  e.coeffs[0] = 1;
  const long scale = k == 4 ? 240 : -504;
  for (int n = 1; n <= nterms; ++n) e.coeffs[n] = scale * divisor_sigma(n, static_cast<unsigned>(k - 1));
  return e;
}

QExpansion multiply(const QExpansion& a, const QExpansion& b, int nterms) {
  require(a.nterms() >= nterms && b.nterms() >= nterms, "multiply: operands shorter than requested");
  QExpansion c;
  c.weight = a.weight + b.weight;
  c.coeffs.assign(static_cast<size_t>(nterms) + 1, 0);
  for (int i = 0; i <= nterms; ++i) {
    if (a.coeffs[i] == 0) continue;
    for (int j = 0; i + j <= nterms; ++j) c.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  }
  return c;
}

QExpansion power(const QExpansion& a, int e, int nterms) {
  require(e >= 0, "power: negative exponent");
  QExpansion r;
  r.weight = 0;
  r.coeffs.assign(static_cast<size_t>(nterms) + 1, 0);
  r.coeffs[0] = 1;
  QExpansion base = a;
  base.coeffs.resize(static_cast<size_t>(nterms) + 1);
  while (e > 0) {
    if (e & 1) r = multiply(r, base, nterms);
    e >>= 1;
    if (e) base = multiply(base, base, nterms);
  }
  return r;
}

QExpansion inverse(const QExpansion& a, int nterms) {
  require(a.nterms() >= nterms, "inverse: operand shorter than requested");
  require(abs(a.coeffs[0]) == 1, "inverse: constant term must be a unit");
  QExpansion r;
  r.weight = -a.weight;
  r.coeffs.assign(static_cast<size_t>(nterms) + 1, 0);
  const mpz_class& c0 = a.coeffs[0];
  r.coeffs[0] = c0;
  for (int n = 1; n <= nterms; ++n) {
    mpz_class s = 0;
    for (int i = 1; i <= n; ++i) s += a.coeffs[i] * r.coeffs[n - i];
    r.coeffs[n] = -s * c0;
  }
  return r;
}

QExpansion delta_qexp(int nterms) {
  require(nterms >= 1, "delta_qexp needs nterms >= 1");
  QExpansion e4 = eisenstein_qexp(4, nterms), e6 = eisenstein_qexp(6, nterms);
  QExpansion e4c = multiply(multiply(e4, e4, nterms), e4, nterms);
  QExpansion e6s = multiply(e6, e6, nterms);
  QExpansion d;
  d.weight = 12;
  d.coeffs.resize(static_cast<size_t>(nterms) + 1);
  for (int n = 0; n <= nterms; ++n) {
    mpz_class t = e4c.coeffs[n] - e6s.coeffs[n];
    if (!mpz_divisible_ui_p(t.get_mpz_t(), 1728)) fail(ErrorKind::NumericFailure, "inexact division in delta_qexp");
    mpz_divexact_ui(d.coeffs[n].get_mpz_t(), t.get_mpz_t(), 1728);
  }
  return d;
}

int dim_modular(int k) {
  if (k < 0 || k % 2) return 0;
  if (k % 12 == 2) return k / 12;
  return k / 12 + 1;
}

int dim_cusp(int k) {
  if (k < 12 || k % 2) return 0;
  return dim_modular(k) - 1;
}

std::vector<QExpansion> miller_basis(int k, int nterms) {
  require(k % 2 == 0, "miller_basis: weight must be even");
  require(k >= 12, "miller_basis: weight must be at least 12");
  const int n = dim_modular(k), d = dim_cusp(k);
  if (d == 0) return {};
  require(nterms >= 2 * d + 2, "miller_basis: nterms too small to echelonise");

  int kk = k % 12;
  if (kk == 2) kk = 14;
  int a = 0, b = 0;
  switch (kk) {
    case 0: break;
    case 4: a = 1; break;
    case 6: b = 1; break;
    case 8: a = 2; break;
    case 10: a = 1; b = 1; break;
    case 14: a = 2; b = 1; break;
    default: fail(ErrorKind::InvalidArgument, "miller_basis: unexpected residue");
  }
  QExpansion e4 = eisenstein_qexp(4, nterms), e6 = eisenstein_qexp(6, nterms);
  QExpansion delta = delta_qexp(nterms);
  QExpansion e6sq = multiply(e6, e6, nterms);
  QExpansion anchor = multiply(power(e4, a, nterms), power(e6, b, nterms), nterms);

  // ls_i = Delta^i E6^(2(n-1-i)) A, stepped by F = Delta / E6^2.
  QExpansion f = multiply(delta, inverse(e6sq, nterms), nterms);
  QExpansion cur = multiply(power(e6sq, n - 1, nterms), anchor, nterms);
  std::vector<QExpansion> basis;
  basis.reserve(static_cast<size_t>(d));
  for (int i = 1; i <= d; ++i) {
    cur = multiply(cur, f, nterms);
    cur.weight = k;
    basis.push_back(cur);
  }
  for (int i = 0; i < d; ++i) {
    const mpz_class& lead = basis[i].coeffs[i + 1];
    if (lead != 1) fail(ErrorKind::NumericFailure, "miller_basis: leading coefficient is not 1");
    for (int j = 1; j <= i; ++j)
      if (basis[i].coeffs[j] != 0) fail(ErrorKind::NumericFailure, "miller_basis: basis is not triangular");
  }
  // Back substitution clears entries above the diagonal.
  for (int i = d - 1; i >= 0; --i) {
    for (int j = i + 1; j < d; ++j) {
      mpz_class c = basis[i].coeffs[j + 1];
      if (c == 0) continue;
      for (int m = j + 1; m <= nterms; ++m) basis[i].coeffs[m] -= c * basis[j].coeffs[m];
    }
  }
  return basis;
}

QExpansion hecke_apply(const QExpansion& g, int p) {
  require(p >= 2 && is_prime(p), "hecke_apply: p must be prime");
  const int n_out = g.nterms() / p;
  QExpansion r;
  r.weight = g.weight;
  r.coeffs.resize(static_cast<size_t>(n_out) + 1);
  mpz_class pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(g.weight - 1));
  for (int n = 0; n <= n_out; ++n) {
    r.coeffs[n] = g.coeffs[static_cast<size_t>(p) * n];
    if (n % p == 0) r.coeffs[n] += pk * g.coeffs[n / p];
  }
  return r;
}

IntMatrix hecke_matrix(int k, int p, const std::vector<QExpansion>& basis) {
  const int d = static_cast<int>(basis.size());
  require(d == dim_cusp(k), "hecke_matrix: basis size does not match dim S_k");
  IntMatrix m(static_cast<size_t>(d), std::vector<mpz_class>(static_cast<size_t>(d)));
  for (int j = 0; j < d; ++j) {
    require(basis[j].weight == k, "hecke_matrix: basis weight mismatch");
    if (basis[j].nterms() < p * d)
      fail(ErrorKind::InsufficientCoefficients, "hecke_matrix: need at least " + std::to_string(p * d) + " terms");
    QExpansion img = hecke_apply(basis[j], p);
    for (int i = 0; i < d; ++i) m[i][j] = img.coeffs[i + 1];
  }
  return m;
}

}  // namespace cuspzero::modforms
