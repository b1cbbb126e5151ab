#pragma once

#include "common/real.hpp"
#include "modforms/eigenform.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace cuspzero::signs {

using modforms::Eigenform;

// Golden-ratio threshold: for real |x| <= 2, |x| < beta forces |x^2 - 1| > beta.
inline double golden_beta() { return (std::sqrt(5.0) - 1) / 2; }

// Tolerance on every threshold comparison: 2^(-precision_bits / 2).
double threshold_tol(const Eigenform& f);

enum class PrimeKind { Good, Bad };

struct PrimeClass {
  long p = 0;
  PrimeKind kind = PrimeKind::Bad;
  double lambda_p = 0;
  double lambda_p2 = 0;
};

// Good when |lambda(p)| >= beta + tol; everything else is Bad.
bool is_good(const Eigenform& f, long p);
std::vector<PrimeClass> classify_primes(const Eigenform& f, long X);

// 2 if lambda(2) is Good, else 4.
int omega(const Eigenform& f);

// lambda(p^(b j)) >= 1/10 for 1 <= j <= J, computed from lambda(p) alone.
bool lemma_a_holds(const Real& lambda_p, int b, int J);
std::optional<int> lemma_a_exponent(const Real& lambda_p, int J, int B_cap);
std::optional<int> lemma_a_exponent(const Eigenform& f, long p, int J, int B_cap = 64);

struct FirstNegative {
  bool found = false;
  long n = 0;
  double lambda = 0;
  double bound = 0;  // k^0.4963, exclusive
};

FirstNegative first_negative(const Eigenform& f, double eps0 = 0.01);

struct CoprimePair {
  long m1 = 0, m2 = 0;
  double lambda1 = 0, lambda2 = 0;
  std::string method;  // "six-integer" or "exhaustive"
};

// Six pairwise coprime integers in (xi, 50 xi) with |lambda| >= 1/10, or nothing.
std::optional<std::vector<long>> six_coprime(const Eigenform& f, double xi);
std::optional<CoprimePair> coprime_pair(const Eigenform& f, double xi);

struct ParityPair {
  long u = 0, v = 0;      // u odd, v even
  double lo = 0, hi = 0;  // containing interval ((X + jH)^2, (X + (j + 1)H)^2)
  double lambda_u = 0, lambda_v = 0;
  double lower_bound = 0;
  int case_no = 0;        // 1..4
};

struct ParityReport {
  int omega = 0;
  long H = 0;
  int interval_pairs = 0;
  int skipped = 0;
  std::vector<ParityPair> pairs;
};

// H <= 0 selects the smallest power of two giving at least half usable interval pairs.
ParityReport build_parity_pairs(const Eigenform& f, double X, long H = 0);

struct Delta2Witness {
  double lo = 0, hi = 0;  // dyadic interval [m, 2am]
  long n1 = 0, n2 = 0;
  double signed1 = 0, signed2 = 0;  // (-1)^n lambda(n)
  double y1 = 0, y2 = 0;            // (k - 1) / (4 pi n)
  bool good = false;
};

struct Delta2Report {
  long a = 0;
  std::vector<Delta2Witness> witnesses;
  std::vector<std::string> skipped;
};

// Requires lemma_a_exponent(f, 2, 2) to succeed; throws Indeterminate otherwise.
Delta2Report delta2_witnesses(const Eigenform& f, double X);

}  // namespace cuspzero::signs
