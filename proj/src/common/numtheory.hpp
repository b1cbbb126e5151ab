#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <utility>
#include <vector>

namespace cuspzero {

std::vector<int> primes_up_to(int n);
bool is_prime(long n);

// Prime factorisation as (p, e) pairs in increasing p.
std::vector<std::pair<long, int>> factorize(long n);

long divisor_count(long n);
mpz_class divisor_sigma(long n, unsigned power);

// If n = p^e with p prime and e >= 1, return (p, e); otherwise (0, 0).
std::pair<long, int> prime_power(long n);

}  // namespace cuspzero
