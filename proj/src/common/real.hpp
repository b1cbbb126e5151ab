#pragma once

// Thin RAII wrapper over mpfr_t with explicit per-value bit precision.
// Binary operations produce a result at the larger operand precision.

#include <mpfr.h>
#include <gmpxx.h>

#include <algorithm>
#include <string>
#include <string_view>

namespace cuspzero {

class Real {
 public:
  explicit Real(mpfr_prec_t prec = 64) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Real(double x, mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_d(v_, x, MPFR_RNDN);
  }
  Real(long x, mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_si(v_, x, MPFR_RNDN);
  }
  Real(const mpz_class& z, mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_z(v_, z.get_mpz_t(), MPFR_RNDN);
  }
  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  // Round to a new precision in place.
  void round_to(mpfr_prec_t prec) { mpfr_prec_round(v_, prec, MPFR_RNDN); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  long exponent() const { return is_zero() ? 0 : mpfr_get_exp(v_); }

  // Scientific notation with exactly `digits` significant digits.
  std::string to_string(int digits) const;
  // Throws std::invalid_argument on malformed input.
  static Real parse(std::string_view text, mpfr_prec_t prec);

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real& operator*=(long o) {
    mpfr_mul_si(v_, v_, o, MPFR_RNDN);
    return *this;
  }
  Real& operator/=(long o) {
    mpfr_div_si(v_, v_, o, MPFR_RNDN);
    return *this;
  }
  Real operator-() const {
    Real r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

  friend Real operator+(const Real& a, const Real& b) { return binop(a, b, mpfr_add); }
  friend Real operator-(const Real& a, const Real& b) { return binop(a, b, mpfr_sub); }
  friend Real operator*(const Real& a, const Real& b) { return binop(a, b, mpfr_mul); }
  friend Real operator/(const Real& a, const Real& b) { return binop(a, b, mpfr_div); }
  friend Real operator*(const Real& a, long b) {
    Real r(a);
    r *= b;
    return r;
  }
  friend Real operator*(long b, const Real& a) { return a * b; }
  friend Real operator/(const Real& a, long b) {
    Real r(a);
    r /= b;
    return r;
  }

  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_); }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_); }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_); }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_); }
  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_); }

 private:
  using Op = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
  static Real binop(const Real& a, const Real& b, Op op) {
    Real r(std::max(a.precision(), b.precision()));
    op(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  mpfr_t v_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real cos(const Real& x);
Real sin(const Real& x);
Real atan2(const Real& y, const Real& x);
Real pow(const Real& x, const Real& e);
Real const_pi(mpfr_prec_t prec);
Real log2(const Real& x);

// Exact integer nearest to x rounded toward -inf / +inf.
mpz_class floor_to_mpz(const Real& x);
mpz_class ceil_to_mpz(const Real& x);

}  // namespace cuspzero
