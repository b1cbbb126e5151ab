#include <doctest.h>

#include "modforms/charpoly.hpp"
#include "modforms/qexp.hpp"

#include <random>

using namespace cuspzero::modforms;

namespace {

// Fraction-free Bareiss determinant.
mpz_class bareiss(IntMatrix a) {
  const size_t n = a.size();
  mpz_class prev = 1;
  int sign = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      size_t r = k + 1;
      while (r < n && a[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(a[k], a[r]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i)
      for (size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

// det(xI - M) at x = 0..d, then Lagrange interpolation over Q.
std::vector<mpz_class> charpoly_by_interpolation(const IntMatrix& m) {
  const int d = static_cast<int>(m.size());
  std::vector<mpq_class> poly(d + 1, 0);
  for (int x = 0; x <= d; ++x) {
    IntMatrix a = m;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a[i][j] = (i == j ? x : 0) - m[i][j];
    const mpq_class v = d == 0 ? mpq_class(1) : mpq_class(bareiss(a));
    // basis polynomial prod_(j != x) (t - j) / (x - j)
    std::vector<mpq_class> b{1};
    mpq_class denom = 1;
    for (int j = 0; j <= d; ++j) {
      if (j == x) continue;
      std::vector<mpq_class> nb(b.size() + 1, 0);
      for (size_t t = 0; t < b.size(); ++t) {
        nb[t + 1] += b[t];
        nb[t] -= b[t] * j;
      }
      b = nb;
      denom *= x - j;
    }
    for (int t = 0; t <= d; ++t) poly[t] += v * b[t] / denom;
  }
  std::vector<mpz_class> out(d + 1);
  for (int t = 0; t <= d; ++t) {
    poly[t].canonicalize();
    REQUIRE(poly[t].get_den() == 1);
    out[t] = poly[t].get_num();
  }
  return out;
}

}  // namespace

TEST_CASE("T2 on weight 24") {
  const auto basis = miller_basis(24, 10);
  const auto c = charpoly_multimodular(hecke_matrix(24, 2, basis), 80);
  REQUIRE(c.size() == 3);
  CHECK(c[2] == 1);
  CHECK(c[1] == -1080);
  CHECK(c[0] == -20468736);
}

TEST_CASE("multimodular matches Bareiss interpolation on random matrices") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    const int d = 1 + static_cast<int>(rng() % 7);
    IntMatrix m(d, std::vector<mpz_class>(d));
    for (auto& row : m)
      for (auto& x : row) {
        x = static_cast<long>(rng() % 2001) - 1000;
        x *= static_cast<long>(rng() % 100000);
      }
    const auto ref = charpoly_by_interpolation(m);
    const auto got = charpoly_multimodular(m, 40.0 * d + 20);
    REQUIRE(got.size() == ref.size());
    for (size_t i = 0; i < ref.size(); ++i) CHECK(got[i] == ref[i]);
  }
}

TEST_CASE("multimodular matches interpolation on a Hecke matrix") {
  const int k = 72, d = dim_cusp(k);
  const auto m = hecke_matrix(k, 2, miller_basis(k, 2 * d + 4));
  const auto ref = charpoly_by_interpolation(m);
  const auto got = charpoly_multimodular(m, d * (1 + (k - 1) / 2.0 + 2));
  for (int i = 0; i <= d; ++i) CHECK(got[i] == ref[i]);
}

TEST_CASE("modular charpoly agrees with reduction of the integer one") {
  const auto m = hecke_matrix(48, 2, miller_basis(48, 12));
  const auto c = charpoly_multimodular(m, 200);
  for (uint64_t p : crt_primes(3)) {
    const auto cp = charpoly_mod(m, p);
    for (size_t i = 0; i < c.size(); ++i) {
      mpz_class r = c[i] % mpz_class(static_cast<unsigned long>(p));
      if (r < 0) r += static_cast<unsigned long>(p);
      CHECK(r.get_ui() == cp[i]);
    }
  }
}

TEST_CASE("CRT primes are distinct primes below 2^62") {
  const auto ps = crt_primes(20);
  for (size_t i = 0; i < ps.size(); ++i) {
    CHECK(ps[i] < (uint64_t{1} << 62));
    CHECK(mpz_probab_prime_p(mpz_class(static_cast<unsigned long>(ps[i])).get_mpz_t(), 30) > 0);
    if (i) CHECK(ps[i] < ps[i - 1]);
  }
}
