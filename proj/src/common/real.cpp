#include "common/real.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

namespace cuspzero {

Real& Real::operator+=(const Real& o) {
  if (o.precision() > precision()) round_to(o.precision());
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator-=(const Real& o) {
  if (o.precision() > precision()) round_to(o.precision());
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator*=(const Real& o) {
  if (o.precision() > precision()) round_to(o.precision());
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator/=(const Real& o) {
  if (o.precision() > precision()) round_to(o.precision());
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

std::string Real::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return sign() > 0 ? "inf" : "-inf";
  if (is_zero()) {
    std::string s = "0.";
    s.append(static_cast<size_t>(std::max(digits - 1, 1)), '0');
    return s + "e+0";
  }
  mpfr_exp_t e = 0;
  char* raw = mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(digits), v_, MPFR_RNDN);
  std::string m(raw);
  mpfr_free_str(raw);
  std::string out;
  size_t pos = 0;
  if (m[0] == '-') {
    out.push_back('-');
    pos = 1;
  }
  out.push_back(m[pos]);
  out.push_back('.');
  out.append(m, pos + 1, std::string::npos);
  long exp10 = static_cast<long>(e) - 1;
  out += (exp10 < 0 ? "e-" : "e+") + std::to_string(exp10 < 0 ? -exp10 : exp10);
  return out;
}

Real Real::parse(std::string_view text, mpfr_prec_t prec) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty number");
  Real r(prec);
  char* end = nullptr;
  if (mpfr_strtofr(r.v_, s.c_str(), &end, 10, MPFR_RNDN) == 0 && end == s.c_str())
    throw std::invalid_argument("malformed number: " + s);
  if (end == s.c_str() || *end != '\0') throw std::invalid_argument("malformed number: " + s);
  if (!mpfr_number_p(r.v_)) throw std::invalid_argument("non-finite number: " + s);
  return r;
}

namespace {
using Unary = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);
Real apply(const Real& x, Unary f) {
  Real r(x.precision());
  f(r.get(), x.get(), MPFR_RNDN);
  return r;
}
}  // namespace

Real abs(const Real& x) { return apply(x, mpfr_abs); }
Real sqrt(const Real& x) { return apply(x, mpfr_sqrt); }
Real exp(const Real& x) { return apply(x, mpfr_exp); }
Real log(const Real& x) { return apply(x, mpfr_log); }
Real cos(const Real& x) { return apply(x, mpfr_cos); }
Real sin(const Real& x) { return apply(x, mpfr_sin); }
Real log2(const Real& x) { return apply(x, mpfr_log2); }

Real atan2(const Real& y, const Real& x) {
  Real r(std::max(y.precision(), x.precision()));
  mpfr_atan2(r.get(), y.get(), x.get(), MPFR_RNDN);
  return r;
}

Real pow(const Real& x, const Real& e) {
  Real r(std::max(x.precision(), e.precision()));
  mpfr_pow(r.get(), x.get(), e.get(), MPFR_RNDN);
  return r;
}

Real const_pi(mpfr_prec_t prec) {
  Real r(prec);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}

mpz_class floor_to_mpz(const Real& x) {
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), x.get(), MPFR_RNDD);
  return z;
}

mpz_class ceil_to_mpz(const Real& x) {
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), x.get(), MPFR_RNDU);
  return z;
}

}  // namespace cuspzero
