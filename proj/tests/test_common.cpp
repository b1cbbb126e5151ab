#include <doctest.h>

#include "common/errors.hpp"
#include "common/numtheory.hpp"
#include "common/real.hpp"
#include "common/segment.hpp"

#include <random>

using namespace cuspzero;

TEST_CASE("Real string round trip keeps every requested digit") {
  const Real x = const_pi(256) / Real(7L, 256);
  const std::string s = x.to_string(70);
  const Real y = Real::parse(s, 256);
  CHECK(abs(x - y).to_double() < 1e-68);
  CHECK(s.rfind("4.48798950512827605494", 0) == 0);
}

TEST_CASE("Real parse rejects malformed text") {
  CHECK_THROWS_AS(Real::parse("", 64), std::invalid_argument);
  CHECK_THROWS_AS(Real::parse("1.5x", 64), std::invalid_argument);
  CHECK_THROWS_AS(Real::parse("abc", 64), std::invalid_argument);
  CHECK_THROWS_AS(Real::parse("inf", 64), std::invalid_argument);
  CHECK(Real::parse("-2.5e-3", 64).to_double() == doctest::Approx(-2.5e-3));
}

TEST_CASE("Real arithmetic widens to the larger precision") {
  const Real a(1L, 64), b = const_pi(300);
  CHECK((a + b).precision() == 300);
  Real c(1L, 64);
  c += b;
  CHECK(c.precision() == 300);
  CHECK(floor_to_mpz(b * 1000L) == 3141);
  CHECK(ceil_to_mpz(b * 1000L) == 3142);
}

TEST_CASE("factorize reassembles n and uses primes") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 500; ++t) {
    const long n = 1 + static_cast<long>(rng() % 2000000);
    long prod = 1;
    long last = 1;
    for (auto [p, e] : factorize(n)) {
      CHECK(is_prime(p));
      CHECK(p > last);
      last = p;
      for (int i = 0; i < e; ++i) prod *= p;
    }
    CHECK(prod == n);
  }
}

TEST_CASE("divisor functions match brute force") {
  for (long n = 1; n <= 300; ++n) {
    long cnt = 0;
    mpz_class s3 = 0;
    for (long d = 1; d <= n; ++d)
      if (n % d == 0) {
        ++cnt;
        s3 += mpz_class(d) * d * d;
      }
    CHECK(divisor_count(n) == cnt);
    CHECK(divisor_sigma(n, 3) == s3);
  }
}

TEST_CASE("primes and prime powers") {
  const auto ps = primes_up_to(100);
  CHECK(ps.size() == 25);
  CHECK(ps.back() == 97);
  CHECK(prime_power(64) == std::pair<long, int>{2, 6});
  CHECK(prime_power(81) == std::pair<long, int>{3, 4});
  CHECK(prime_power(12) == std::pair<long, int>{0, 0});
  CHECK(prime_power(1) == std::pair<long, int>{0, 0});
  CHECK(is_prime(1000000007));
  CHECK_FALSE(is_prime(1000000007L * 3));
}

TEST_CASE("segment names parse back") {
  for (SegmentTag s : {SegmentTag::Delta1, SegmentTag::Delta2, SegmentTag::Delta3}) {
    SegmentTag t;
    REQUIRE(parse_segment(segment_name(s), t));
    CHECK(t == s);
  }
  SegmentTag t;
  CHECK_FALSE(parse_segment("delta4", t));
}

TEST_CASE("require raises InvalidArgument") {
  try {
    require(false, "boom");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}
