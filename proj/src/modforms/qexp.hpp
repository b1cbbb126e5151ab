#pragma once

#include <gmpxx.h>

#include <vector>

namespace cuspzero::modforms {

// Truncated q-expansion: coeffs[n] is the coefficient of q^n for 0 <= n <= nterms.
struct QExpansion {
  int weight = 0;
  std::vector<mpz_class> coeffs;

  int nterms() const { return static_cast<int>(coeffs.size()) - 1; }
};

QExpansion eisenstein_qexp(int k, int nterms);
QExpansion delta_qexp(int nterms);

QExpansion multiply(const QExpansion& a, const QExpansion& b, int nterms);
QExpansion power(const QExpansion& a, int e, int nterms);
// Series inverse; requires constant term +-1.
QExpansion inverse(const QExpansion& a, int nterms);

int dim_modular(int k);
int dim_cusp(int k);

// Echelonised integral basis g_1..g_d of cusp forms with g_i(j) = delta_ij for 1 <= i,j <= d.
std::vector<QExpansion> miller_basis(int k, int nterms);

using IntMatrix = std::vector<std::vector<mpz_class>>;

// Matrix of T_p in the Miller basis: entry (i, j) is the q^(i+1) coefficient of T_p g_(j+1).
IntMatrix hecke_matrix(int k, int p, const std::vector<QExpansion>& basis);

// Image of a q-expansion under T_p, truncated at floor(nterms / p).
QExpansion hecke_apply(const QExpansion& g, int p);

}  // namespace cuspzero::modforms
