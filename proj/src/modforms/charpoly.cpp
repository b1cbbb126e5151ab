#include "modforms/charpoly.hpp"

#include "common/errors.hpp"

#include <cmath>

namespace cuspzero::modforms {

namespace {

using u64 = uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>(static_cast<u128>(a) * b % p); }

u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

bool miller_rabin(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull})
    if (n % q == 0) return n == q;
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Montgomery arithmetic modulo an odd p < 2^62 with R = 2^64.
struct Montgomery {
  u64 p, pinv, r2;
  explicit Montgomery(u64 mod) : p(mod) {
    pinv = 1;
    for (int i = 0; i < 6; ++i) pinv *= 2 - p * pinv;
    u128 r = (static_cast<u128>(1) << 64) % p;
    r2 = static_cast<u64>(r * r % p);
  }
  u64 reduce(u128 t) const {
    u64 m = static_cast<u64>(t) * (0 - pinv);
    u64 r = static_cast<u64>((t + static_cast<u128>(m) * p) >> 64);
    return r >= p ? r - p : r;
  }
  u64 mul(u64 a, u64 b) const { return reduce(static_cast<u128>(a) * b); }
  u64 to(u64 a) const { return mul(a, r2); }
  u64 from(u64 a) const { return reduce(a); }
  u64 add(u64 a, u64 b) const {
    u64 s = a + b;
    return s >= p ? s - p : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p - b; }
  u64 inv(u64 a) const { return to(powmod(from(a), p - 2, p)); }
};

}  // namespace

std::vector<u64> crt_primes(size_t count) {
  std::vector<u64> out;
  u64 c = (1ull << 62) - 1;
  while (out.size() < count) {
    if (miller_rabin(c)) out.push_back(c);
    c -= 2;
  }
  return out;
}

std::vector<u64> charpoly_mod(const IntMatrix& m, u64 p) {
  const size_t d = m.size();
  Montgomery mo(p);
  std::vector<std::vector<u64>> h(d, std::vector<u64>(d));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) h[i][j] = mo.to(mpz_fdiv_ui(m[i][j].get_mpz_t(), p));

  // Similarity reduction to upper Hessenberg form.
  for (size_t c = 0; c + 2 < d; ++c) {
    size_t piv = c + 1;
    while (piv < d && h[piv][c] == 0) ++piv;
    if (piv == d) continue;
    if (piv != c + 1) {
      std::swap(h[piv], h[c + 1]);
      for (size_t i = 0; i < d; ++i) std::swap(h[i][piv], h[i][c + 1]);
    }
    const u64 inv = mo.inv(h[c + 1][c]);
    for (size_t i = c + 2; i < d; ++i) {
      if (h[i][c] == 0) continue;
      const u64 f = mo.mul(h[i][c], inv);
      // row_i -= f * row_(c+1); col_(c+1) += f * col_i
      for (size_t j = c; j < d; ++j) h[i][j] = mo.sub(h[i][j], mo.mul(f, h[c + 1][j]));
      for (size_t r = 0; r < d; ++r) h[r][c + 1] = mo.add(h[r][c + 1], mo.mul(f, h[r][i]));
    }
  }

  // Characteristic polynomial of a Hessenberg matrix by the standard recurrence.
  std::vector<std::vector<u64>> pol(d + 1);
  pol[0] = {mo.to(1)};
  for (size_t mm = 1; mm <= d; ++mm) {
    const size_t r = mm - 1;
    std::vector<u64> cur(mm + 1, 0);
    // (x - h_rr) p_(mm-1)
    for (size_t t = 0; t < mm; ++t) {
      cur[t + 1] = mo.add(cur[t + 1], pol[mm - 1][t]);
      cur[t] = mo.sub(cur[t], mo.mul(h[r][r], pol[mm - 1][t]));
    }
    u64 prod = mo.to(1);
    for (size_t i = r; i-- > 0;) {
      prod = mo.mul(prod, h[i + 1][i]);
      if (prod == 0) break;
      const u64 f = mo.mul(h[i][r], prod);
      for (size_t t = 0; t < pol[i].size(); ++t) cur[t] = mo.sub(cur[t], mo.mul(f, pol[i][t]));
    }
    pol[mm] = std::move(cur);
  }
  std::vector<u64> out(d + 1);
  for (size_t t = 0; t <= d; ++t) out[t] = mo.from(pol[d][t]);
  return out;
}

std::vector<mpz_class> charpoly_multimodular(const IntMatrix& m, double coeff_bits) {
  const size_t d = m.size();
  for (const auto& row : m) require(row.size() == d, "charpoly: matrix must be square");
  const size_t nprimes = static_cast<size_t>(std::ceil((coeff_bits + 2.0) / 61.0)) + 1;
  const auto primes = crt_primes(nprimes);

  std::vector<mpz_class> acc(d + 1, 0);
  mpz_class modulus = 1;
  for (u64 p : primes) {
    const auto r = charpoly_mod(m, p);
    const u64 mmod = mpz_fdiv_ui(modulus.get_mpz_t(), p);
    const u64 minv = powmod(mmod, p - 2, p);
    for (size_t t = 0; t <= d; ++t) {
      const u64 cur = mpz_fdiv_ui(acc[t].get_mpz_t(), p);
      const u64 diff = r[t] >= cur ? r[t] - cur : r[t] + p - cur;
      const u64 coef = mulmod(diff, minv, p);
      acc[t] += modulus * static_cast<unsigned long>(coef);
    }
    modulus *= static_cast<unsigned long>(p);
  }
  // Symmetric residues.
  const mpz_class half = modulus / 2;
  for (auto& c : acc)
    if (c > half) c -= modulus;
  if (acc[d] != 1) fail(ErrorKind::NumericFailure, "charpoly: reconstructed polynomial is not monic");
  return acc;
}

}  // namespace cuspzero::modforms
