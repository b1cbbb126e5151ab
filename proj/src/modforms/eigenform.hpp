#pragma once

#include "common/real.hpp"

#include <gmpxx.h>

#include <string>
#include <vector>

namespace cuspzero::modforms {

// Normalised Hecke eigenform of level one: lambda(n) = a(n) / n^((k-1)/2), lambda(1) = 1.
struct Eigenform {
  int weight = 0;
  int dim_index = 0;  // 1-based, ascending lambda(2)
  int precision_bits = 0;
  int nterms = 0;
  std::vector<Real> lambdas;        // lambdas[n] for 0 <= n <= nterms; lambdas[0] = 0
  std::vector<double> lambdas_d;    // double copy of the above
  std::vector<mpz_class> exact;     // integer a(n) when the form is rational, else empty

  double half_weight() const { return (weight - 1) / 2.0; }
};

int default_nterms(int k);

// All normalised eigenforms of weight k, ascending in lambda(2) (ties by lambda(3)).
// Escalates once to twice the precision when verification fails at 2^(-bits/2).
std::vector<Eigenform> eigenforms(int k, int precision_bits = 192, int nterms = 0);

// Single construction pass without escalation (exposed for testing).
std::vector<Eigenform> eigenforms_once(int k, int precision_bits, int nterms);

// Stored value, or assembled from multiplicativity and the prime power recursion.
Real lambda(const Eigenform& f, long n);
double lambda_double(const Eigenform& f, long n);

struct HeckeReport {
  double max_residual = 0.0;
  std::string worst_relation;
  bool deligne_ok = true;
  bool pass = true;
};

HeckeReport verify_hecke(const Eigenform& f, double tol);

// Cache files: versioned text, one per (weight, dim_index).
std::string cache_file_name(int k, int idx);
void save_eigenform(const Eigenform& f, const std::string& path);
Eigenform load_eigenform(const std::string& path);

}  // namespace cuspzero::modforms
