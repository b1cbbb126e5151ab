#pragma once

#include "modforms/qexp.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace cuspzero::modforms {

// Characteristic polynomial det(xI - M) of a square integer matrix, as coefficients
// c[0..d] of x^0..x^d (c[d] == 1). `coeff_bits` must bound log2|c_j| for every j;
// enough primes are used for the CRT modulus to exceed twice that bound.
std::vector<mpz_class> charpoly_multimodular(const IntMatrix& m, double coeff_bits);

// Same, over Z/pZ for a prime p < 2^62 (exposed for testing).
std::vector<uint64_t> charpoly_mod(const IntMatrix& m, uint64_t p);

// Primes just below 2^62, in decreasing order.
std::vector<uint64_t> crt_primes(size_t count);

}  // namespace cuspzero::modforms
