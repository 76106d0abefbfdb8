#pragma once

#include <gmpxx.h>

#include <boost/multiprecision/mpfr.hpp>

#include <optional>
#include <string>
#include <utility>

namespace qcyc {

using Int = mpz_class;
using Rat = mpq_class;
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

/// Working precision in bits. Applies to every Real created afterwards.
void set_precision(unsigned bits);
unsigned precision_bits();

/// Scoped change of the working precision.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned bits);
  ~PrecisionGuard();
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

Real to_real(const Rat& x);
Real to_real(const Int& x);
Real to_real(long x);
/// n/d in lowest terms.
Rat rat(const Int& n, const Int& d);
/// Exact conversion of a finite Real to a rational.
Rat to_rat(const Real& x);

Real pi();
/// 2^(-k)
Real pow2(long k);

std::string to_string(const Rat& x);
std::string to_string(const Real& x, int digits = 0);
Rat parse_rat(const std::string& s);

Int floor_rat(const Rat& x);
Int ceil_rat(const Rat& x);
/// Representative of x mod 1 in [0,1).
Rat frac(const Rat& x);

struct Complex {
  Real re, im;

  Complex() : re(0), im(0) {}
  Complex(const Real& r) : re(r), im(0) {}  // NOLINT
  Complex(const Real& r, const Real& i) : re(r), im(i) {}
  Complex(long r) : re(r), im(0) {}  // NOLINT

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);
  Complex& operator*=(const Real& o);
};

Complex operator+(Complex a, const Complex& b);
Complex operator-(Complex a, const Complex& b);
Complex operator-(const Complex& a);
Complex operator*(Complex a, const Complex& b);
Complex operator*(Complex a, const Real& b);
Complex operator*(const Real& b, Complex a);
Complex operator/(Complex a, const Complex& b);

Complex conj(const Complex& z);
Real norm2(const Complex& z);
Real abs(const Complex& z);
Real arg(const Complex& z);
Complex exp(const Complex& z);
Complex log(const Complex& z);
/// Principal branch, cut along the negative real axis.
Complex sqrt(const Complex& z);
Complex pow(const Complex& z, long n);
/// e(x) = exp(2 pi i x) for real x.
Complex expi2pi(const Real& x);
/// e(z) = exp(2 pi i z).
Complex e2pi(const Complex& z);
Complex i_unit();

struct Reconstruction {
  std::optional<Rat> value;
  /// Another rational with denominator <= den_bound also lies within tol.
  bool ambiguous = false;
};

/// Smallest-denominator rational within tol of x, if that denominator is <= den_bound.
Reconstruction rational_reconstruct(const Real& x, const Int& den_bound, const Real& tol);

/// Simplest rational in the closed interval [lo, hi].
Rat simplest_in(const Rat& lo, const Rat& hi);

/// Gamma(1/2, x) = sqrt(pi) erfc(sqrt(x)).
Real upper_incomplete_gamma_half(const Real& x);

/// x + y sqrt(D) with rational x, y and a fixed positive nonsquare integer D.
class QuadElem {
 public:
  QuadElem() = default;
  QuadElem(Rat x, Rat y, Int D);

  const Rat& x() const { return x_; }
  const Rat& y() const { return y_; }
  const Int& D() const { return D_; }

  QuadElem conj() const { return {x_, -y_, D_}; }
  Rat norm() const { return x_ * x_ - y_ * y_ * Rat(D_); }
  Rat trace() const { return 2 * x_; }
  /// Exact sign of the first real embedding.
  int sign() const;
  /// Both real embeddings (x + y sqrt D, x - y sqrt D).
  std::pair<Real, Real> embed() const;
  Real value() const { return embed().first; }

  QuadElem operator+(const QuadElem& o) const;
  QuadElem operator-(const QuadElem& o) const;
  QuadElem operator-() const { return {-x_, -y_, D_}; }
  QuadElem operator*(const QuadElem& o) const;
  QuadElem operator/(const QuadElem& o) const;
  QuadElem operator*(const Rat& r) const { return {x_ * r, y_ * r, D_}; }
  bool operator==(const QuadElem& o) const { return x_ == o.x_ && y_ == o.y_ && D_ == o.D_; }
  bool operator<(const QuadElem& o) const { return (o - *this).sign() > 0; }
  bool operator<=(const QuadElem& o) const { return (o - *this).sign() >= 0; }

 private:
  void check(const QuadElem& o) const;
  Rat x_, y_;
  Int D_ = 2;
};

QuadElem quad_conj(const QuadElem& l);
std::pair<Real, Real> quad_embed(const QuadElem& l);

bool is_square(const Int& n);

}  // namespace qcyc
