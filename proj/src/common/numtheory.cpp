#include "common/numtheory.hpp"

namespace cuspzero {

std::vector<int> primes_up_to(int n) {
  std::vector<int> out;
  if (n < 2) return out;
  std::vector<char> sieve(static_cast<size_t>(n) + 1, 1);
  sieve[0] = sieve[1] = 0;
  for (long i = 2; i * i <= n; ++i)
    if (sieve[i])
      for (long j = i * i; j <= n; j += i) sieve[j] = 0;
  for (int i = 2; i <= n; ++i)
    if (sieve[i]) out.push_back(i);
  return out;
}

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::pair<long, int>> factorize(long n) {
  std::vector<std::pair<long, int>> out;
  for (long p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

long divisor_count(long n) {
  long d = 1;
  for (auto [p, e] : factorize(n)) d *= e + 1;
  return d;
}

mpz_class divisor_sigma(long n, unsigned power) {
  mpz_class s = 0, t;
  for (long d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(d), power);
    s += t;
    long e = n / d;
    if (e != d) {
      mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(e), power);
      s += t;
    }
  }
  return s;
}

std::pair<long, int> prime_power(long n) {
  auto f = factorize(n);
  if (f.size() != 1) return {0, 0};
  return f[0];
}

}  // namespace cuspzero
