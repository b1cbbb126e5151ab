#include "signs/signs.hpp"

#include "common/errors.hpp"
#include "common/numtheory.hpp"

#include <numeric>

namespace cuspzero::signs {

namespace {

constexpr double kLemmaA = 0.1;
constexpr double kPairFloor = 0.01;

std::vector<long> odd_primes_in(double lo, double hi) {
  std::vector<long> out;
  for (long n = std::max(3L, static_cast<long>(std::floor(lo)) + 1); n < hi; ++n)
    if (is_prime(n)) out.push_back(n);
  return out;
}

// lambda(n) can be assembled when every prime factor has a stored coefficient.
bool assemblable(const Eigenform& f, long n) {
  const auto fac = factorize(n);
  return fac.empty() || fac.back().first <= f.nterms;
}

}  // namespace

double threshold_tol(const Eigenform& f) { return std::ldexp(1.0, -f.precision_bits / 2); }

bool is_good(const Eigenform& f, long p) {
  return std::fabs(lambda_double(f, p)) >= golden_beta() + threshold_tol(f);
}

std::vector<PrimeClass> classify_primes(const Eigenform& f, long X) {
  require(X >= 2, "classify_primes: X must be at least 2");
  std::vector<PrimeClass> out;
  for (int p : primes_up_to(static_cast<int>(X))) {
    PrimeClass c;
    c.p = p;
    c.lambda_p = lambda_double(f, p);
    c.lambda_p2 = lambda_double(f, static_cast<long>(p) * p);
    c.kind = is_good(f, p) ? PrimeKind::Good : PrimeKind::Bad;
    if (c.kind == PrimeKind::Bad && std::fabs(c.lambda_p2) < golden_beta() - threshold_tol(f))
      fail(ErrorKind::NumericFailure, "classify_primes: both |lambda(p)| and |lambda(p^2)| below beta at p=" +
                                          std::to_string(p));
    out.push_back(c);
  }
  return out;
}

int omega(const Eigenform& f) {
  const int w = is_good(f, 2) ? 2 : 4;
  if (std::fabs(lambda_double(f, w)) < golden_beta() - threshold_tol(f))
    fail(ErrorKind::NumericFailure, "omega: |lambda(omega)| below beta");
  return w;
}

bool lemma_a_holds(const Real& lambda_p, int b, int J) {
  require(b >= 1 && J >= 1, "lemma_a_holds: b and J must be positive");
  // lambda(p^m) = U_m(lambda(p) / 2) by the three-term recursion.
  const mpfr_prec_t prec = lambda_p.precision();
  Real prev(1L, prec), cur(lambda_p);
  const Real floor_(kLemmaA, prec);
  int m = 1;
  for (int j = 1; j <= J; ++j) {
    while (m < b * j) {
      Real next = lambda_p * cur - prev;
      prev = std::move(cur);
      cur = std::move(next);
      ++m;
    }
    if (cur < floor_) return false;
  }
  return true;
}

std::optional<int> lemma_a_exponent(const Real& lambda_p, int J, int B_cap) {
  for (int b = 1; b <= B_cap; ++b)
    if (lemma_a_holds(lambda_p, b, J)) return b;
  return std::nullopt;
}

std::optional<int> lemma_a_exponent(const Eigenform& f, long p, int J, int B_cap) {
  require(is_prime(p), "lemma_a_exponent: p must be prime");
  return lemma_a_exponent(lambda(f, p), J, B_cap);
}

FirstNegative first_negative(const Eigenform& f, double eps0) {
  FirstNegative r;
  r.bound = std::pow(static_cast<double>(f.weight), 0.4963);
  for (long n = 2; n < r.bound; ++n) {
    if (prime_power(n).first == 0) continue;
    const double l = lambda_double(f, n);
    if (l <= -eps0) {
      r.found = true;
      r.n = n;
      r.lambda = l;
      break;
    }
  }
  return r;
}

std::optional<std::vector<long>> six_coprime(const Eigenform& f, double xi) {
  const double beta = golden_beta(), tol = threshold_tol(f);
  const auto primes = odd_primes_in(std::sqrt(xi), std::sqrt(50 * xi));
  std::vector<long> squares, goods;
  for (long p : primes) {
    if (p > f.nterms) break;
    if (std::fabs(lambda_double(f, p * p)) >= beta + tol && p * p > xi && p * p < 50 * xi)
      squares.push_back(p);
    else if (std::fabs(lambda_double(f, p)) >= beta + tol)
      goods.push_back(p);
  }
  std::vector<long> out;
  for (size_t i = 0; i < squares.size() && out.size() < 6; ++i) out.push_back(squares[i] * squares[i]);
  for (size_t i = 0; i + 1 < goods.size() && out.size() < 6; i += 2) {
    const long m = goods[i] * goods[i + 1];
    if (m > xi && m < 50 * xi) out.push_back(m);
  }
  if (out.size() < 6) return std::nullopt;
  for (long m : out)
    if (std::fabs(lambda_double(f, m)) < kLemmaA) return std::nullopt;
  return out;
}

std::optional<CoprimePair> coprime_pair(const Eigenform& f, double xi) {
  require(xi >= 1000, "coprime_pair: xi must be at least 1000");
  const double hi = 2500 * xi;
  if (auto six = six_coprime(f, std::sqrt(xi))) {
    // Among three values two share a sign, so their product is at least 1/100.
    auto pick = [&](size_t off) -> std::optional<long> {
      for (size_t i = off; i < off + 3; ++i)
        for (size_t j = i + 1; j < off + 3; ++j) {
          const long m = (*six)[i] * (*six)[j];
          if (m > xi && m < hi && lambda_double(f, m) >= kPairFloor) return m;
        }
      return std::nullopt;
    };
    const auto m1 = pick(0), m2 = pick(3);
    if (m1 && m2) return CoprimePair{*m1, *m2, lambda_double(f, *m1), lambda_double(f, *m2), "six-integer"};
  }
  long m1 = 0;
  for (long m = static_cast<long>(std::floor(xi)) + 1; m < hi; ++m) {
    if (!assemblable(f, m) || lambda_double(f, m) < kPairFloor) continue;
    if (m1 == 0) {
      m1 = m;
      continue;
    }
    if (std::gcd(m, m1) == 1) return CoprimePair{m1, m, lambda_double(f, m1), lambda_double(f, m), "exhaustive"};
  }
  return std::nullopt;
}

namespace {

std::optional<ParityPair> pair_for(const Eigenform& f, int w, const std::vector<long>& low,
                                   const std::vector<long>& high) {
  if (low.size() < 2 || high.size() < 2) return std::nullopt;
  auto bad_in = [&](const std::vector<long>& ps) -> long {
    for (long p : ps)
      if (!is_good(f, p)) return p;
    return 0;
  };
  const long q_bad = bad_in(low), p_bad = bad_in(high);
  ParityPair r;
  if (q_bad && !p_bad) {
    r = {high[0] * high[1], w * q_bad * q_bad};
    r.case_no = 1;
  } else if (q_bad && p_bad) {
    r = {p_bad * p_bad, w * q_bad * q_bad};
    r.case_no = 2;
  } else if (p_bad) {
    r = {p_bad * p_bad, w * low[0] * low[1]};
    r.case_no = 3;
  } else {
    r = {high[0] * high[1], w * low[0] * low[1]};
    r.case_no = 4;
  }
  r.lambda_u = lambda_double(f, r.u);
  r.lambda_v = lambda_double(f, r.v);
  r.lower_bound = std::min(std::fabs(r.lambda_u), std::fabs(r.lambda_v));
  return r;
}

}  // namespace

ParityReport build_parity_pairs(const Eigenform& f, double X, long H) {
  require(X >= 2, "build_parity_pairs: X must be at least 2");
  ParityReport rep;
  rep.omega = omega(f);
  const double root = std::sqrt(static_cast<double>(rep.omega));
  const double top = root * X;

  auto usable = [&](long h, int j) {
    const double a = X + j * h, b = a + h;
    return odd_primes_in(a / root, b / root).size() >= 2 && odd_primes_in(a, b).size() >= 2;
  };
  auto count = [&](long h) { return static_cast<int>(std::floor((top - X) / h)); };
  if (H <= 0) {
    H = 2;
    for (;; H *= 2) {
      const int R = count(H);
      if (R <= 1) break;
      int ok = 0;
      for (int j = 0; j < R; ++j) ok += usable(H, j);
      if (2 * ok >= R) break;
    }
  }
  rep.H = H;
  rep.interval_pairs = count(H);
  const double floor_ = std::pow(golden_beta(), 3) - threshold_tol(f);
  for (int j = 0; j < rep.interval_pairs; ++j) {
    const double a = X + j * H, b = a + H;
    auto p = pair_for(f, rep.omega, odd_primes_in(a / root, b / root), odd_primes_in(a, b));
    if (!p) {
      ++rep.skipped;
      continue;
    }
    p->lo = a * a;
    p->hi = b * b;
    if (p->lower_bound < floor_)
      fail(ErrorKind::NumericFailure, "build_parity_pairs: lower bound below beta^3 for u=" + std::to_string(p->u));
    rep.pairs.push_back(*p);
  }
  return rep;
}

Delta2Report delta2_witnesses(const Eigenform& f, double X) {
  require(X >= 2, "delta2_witnesses: X must be at least 2");
  const auto b = lemma_a_exponent(f, 2, 2);
  if (!b || *b > 30) fail(ErrorKind::Indeterminate, "delta2_witnesses: no usable exponent for p=2");
  Delta2Report rep;
  rep.a = 1L << *b;
  const double base = 2.0 * rep.a;
  const double k1 = f.weight - 1;
  double m = 1;
  for (int i = 0; m * base <= X; ++i, m *= base) {
    long q = 0;
    for (long n = std::max(3L, static_cast<long>(std::ceil(m))); n <= 2 * m; ++n)
      if (is_prime(n)) {
        q = n;
        break;
      }
    if (q == 0) {
      rep.skipped.push_back("no odd prime in [" + std::to_string(m) + ", " + std::to_string(2 * m) + "]");
      continue;
    }
    Delta2Witness w;
    w.lo = m;
    w.hi = m * base;
    w.good = is_good(f, q);
    w.n1 = w.good ? q : q * q;
    w.n2 = w.good ? rep.a * q : rep.a * rep.a * q * q;
    auto signed_value = [&](long n) { return (n % 2 ? -1.0 : 1.0) * lambda_double(f, n); };
    w.signed1 = signed_value(w.n1);
    w.signed2 = signed_value(w.n2);
    w.y1 = k1 / (4 * M_PI * w.n1);
    w.y2 = k1 / (4 * M_PI * w.n2);
    if (!(w.signed1 * w.signed2 < 0)) {
      rep.skipped.push_back("no sign certificate at q=" + std::to_string(q));
      continue;
    }
    rep.witnesses.push_back(w);
  }
  return rep;
}

}  // namespace cuspzero::signs
