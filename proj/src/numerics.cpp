#include "qcyc/numerics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qcyc {

namespace {
unsigned g_bits = 256;

unsigned digits10_for_bits(unsigned bits) { return static_cast<unsigned>(bits * 0.30103) + 2; }
}  // namespace

void set_precision(unsigned bits) {
  if (bits < 24) throw std::invalid_argument("precision below 24 bits");
  g_bits = bits;
  Real::default_precision(digits10_for_bits(bits));
}

unsigned precision_bits() { return g_bits; }

PrecisionGuard::PrecisionGuard(unsigned bits) : saved_(g_bits) { set_precision(bits); }
PrecisionGuard::~PrecisionGuard() { set_precision(saved_); }

namespace {
struct InitPrecision {
  InitPrecision() { set_precision(256); }
} init_precision;
}  // namespace

Real to_real(const Rat& x) {
  Real r;
  mpfr_set_q(r.backend().data(), x.get_mpq_t(), MPFR_RNDN);
  return r;
}

Real to_real(const Int& x) {
  Real r;
  mpfr_set_z(r.backend().data(), x.get_mpz_t(), MPFR_RNDN);
  return r;
}

Real to_real(long x) { return Real(x); }

Rat rat(const Int& n, const Int& d) {
  if (d == 0) throw std::domain_error("rat: zero denominator");
  Rat r(n, d);
  r.canonicalize();
  return r;
}

Rat to_rat(const Real& x) {
  if (!boost::multiprecision::isfinite(x)) throw std::domain_error("to_rat: non-finite value");
  Rat q;
  mpfr_get_q(q.get_mpq_t(), x.backend().data());
  q.canonicalize();
  return q;
}

Real pi() { return boost::math::constants::pi<Real>(); }

Real pow2(long k) {
  Real r(1);
  mpfr_mul_2si(r.backend().data(), r.backend().data(), k, MPFR_RNDN);
  return r;
}

std::string to_string(const Rat& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::string to_string(const Real& x, int digits) {
  if (digits <= 0) digits = static_cast<int>(precision_bits() * 0.30103);
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(Int(s, 10));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    Int den = 1;
    for (size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    Rat r(Int(digits, 10), den);
    r.canonicalize();
    return r;
  }
  Rat r(Int(s.substr(0, slash), 10), Int(s.substr(slash + 1), 10));
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator in " + s);
  r.canonicalize();
  return r;
}

Int floor_rat(const Rat& x) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

Int ceil_rat(const Rat& x) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

Rat frac(const Rat& x) { return x - Rat(floor_rat(x)); }

Complex& Complex::operator+=(const Complex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

Complex& Complex::operator-=(const Complex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

Complex& Complex::operator*=(const Complex& o) {
  Real r = re * o.re - im * o.im;
  im = re * o.im + im * o.re;
  re = std::move(r);
  return *this;
}

Complex& Complex::operator/=(const Complex& o) {
  Real d = o.re * o.re + o.im * o.im;
  Real r = (re * o.re + im * o.im) / d;
  im = (im * o.re - re * o.im) / d;
  re = std::move(r);
  return *this;
}

Complex& Complex::operator*=(const Real& o) {
  re *= o;
  im *= o;
  return *this;
}

Complex operator+(Complex a, const Complex& b) { return a += b; }
Complex operator-(Complex a, const Complex& b) { return a -= b; }
Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
Complex operator*(Complex a, const Complex& b) { return a *= b; }
Complex operator*(Complex a, const Real& b) { return a *= b; }
Complex operator*(const Real& b, Complex a) { return a *= b; }
Complex operator/(Complex a, const Complex& b) { return a /= b; }

Complex conj(const Complex& z) { return {z.re, -z.im}; }
Real norm2(const Complex& z) { return z.re * z.re + z.im * z.im; }
Real abs(const Complex& z) { return boost::multiprecision::hypot(z.re, z.im); }
Real arg(const Complex& z) { return boost::multiprecision::atan2(z.im, z.re); }

Complex exp(const Complex& z) {
  Real m = boost::multiprecision::exp(z.re);
  return {m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im)};
}

Complex log(const Complex& z) { return {boost::multiprecision::log(abs(z)), arg(z)}; }

Complex sqrt(const Complex& z) {
  Real r = abs(z);
  if (r == 0) return {};
  Real a = boost::multiprecision::sqrt((r + boost::multiprecision::abs(z.re)) / 2);
  if (z.re >= 0) return {a, z.im / (2 * a)};
  Real b = z.im >= 0 ? a : Real(-a);
  return {boost::multiprecision::abs(z.im) / (2 * a), b};
}

Complex pow(const Complex& z, long n) {
  if (n < 0) return Complex(1) / pow(z, -n);
  Complex result(1), base = z;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return result;
}

Complex expi2pi(const Real& x) {
  Real t = 2 * pi() * x;
  return {boost::multiprecision::cos(t), boost::multiprecision::sin(t)};
}

Complex e2pi(const Complex& z) {
  Real t = 2 * pi();
  return exp(Complex(-t * z.im, t * z.re));
}

Complex i_unit() { return {Real(0), Real(1)}; }

Rat simplest_in(const Rat& lo, const Rat& hi) {
  if (hi < lo) throw std::invalid_argument("simplest_in: empty interval");
  if (lo <= 0 && hi >= 0) return Rat(0);
  if (hi < 0) return -simplest_in(-hi, -lo);
  Int fl = floor_rat(lo);
  if (Rat(fl) == lo) return Rat(fl);
  if (fl < floor_rat(hi)) return Rat(fl + 1);
  Rat inner = simplest_in(1 / (hi - Rat(fl)), 1 / (lo - Rat(fl)));
  Rat r = Rat(fl) + 1 / inner;
  r.canonicalize();
  return r;
}

namespace {
// Farey neighbours of p/q in F_n.
std::pair<Rat, Rat> farey_neighbours(const Rat& x, const Int& n) {
  const Int p = x.get_num(), q = x.get_den();
  if (q == 1) {
    return {Rat(p * n - 1, n), Rat(p * n + 1, n)};
  }
  Int pinv;
  Int pm = p % q;
  if (pm < 0) pm += q;
  mpz_invert(pinv.get_mpz_t(), pm.get_mpz_t(), q.get_mpz_t());
  // left neighbour c/d: p d - c q = 1, d = pinv mod q, maximal d <= n
  Int d = pinv;
  d += q * ((n - d) / q);
  Rat left(Int((p * d - 1) / q), d);
  // right neighbour a/b: a q - b p = 1, b = -pinv mod q
  Int b = (q - pinv) % q;
  if (b == 0) b = q;
  b += q * ((n - b) / q);
  Rat right(Int((1 + b * p) / q), b);
  left.canonicalize();
  right.canonicalize();
  return {left, right};
}
}  // namespace

Reconstruction rational_reconstruct(const Real& x, const Int& den_bound, const Real& tol) {
  if (den_bound < 1) throw std::invalid_argument("den_bound must be >= 1");
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  Reconstruction out;
  if (!boost::multiprecision::isfinite(x)) return out;
  Rat lo = to_rat(x - tol), hi = to_rat(x + tol);
  Rat best = simplest_in(lo, hi);
  if (best.get_den() > den_bound) return out;
  out.value = best;
  auto [left, right] = farey_neighbours(best, den_bound);
  out.ambiguous = (left >= lo && left <= hi) || (right >= lo && right <= hi);
  return out;
}

Real upper_incomplete_gamma_half(const Real& x) {
  if (x < 0) throw std::domain_error("Gamma(1/2, x) needs x >= 0");
  return boost::multiprecision::sqrt(pi()) * boost::multiprecision::erfc(boost::multiprecision::sqrt(x));
}

QuadElem::QuadElem(Rat x, Rat y, Int D) : x_(std::move(x)), y_(std::move(y)), D_(std::move(D)) {
  x_.canonicalize();
  y_.canonicalize();
  if (D_ <= 0 || is_square(D_)) throw std::invalid_argument("QuadElem: D must be a positive nonsquare");
}

void QuadElem::check(const QuadElem& o) const {
  if (D_ != o.D_) throw std::invalid_argument("QuadElem: mismatched D");
}

int QuadElem::sign() const {
  int sx = sgn(x_), sy = sgn(y_);
  if (sy == 0) return sx;
  if (sx == 0) return sy;
  if (sx == sy) return sx;
  // opposite signs: compare x^2 with y^2 D
  int c = cmp(x_ * x_, y_ * y_ * Rat(D_));
  return c > 0 ? sx : sy;
}

std::pair<Real, Real> QuadElem::embed() const {
  Real s = boost::multiprecision::sqrt(to_real(D_));
  Real a = to_real(x_), b = to_real(y_) * s;
  return {a + b, a - b};
}

QuadElem QuadElem::operator+(const QuadElem& o) const {
  check(o);
  return {x_ + o.x_, y_ + o.y_, D_};
}

QuadElem QuadElem::operator-(const QuadElem& o) const {
  check(o);
  return {x_ - o.x_, y_ - o.y_, D_};
}

QuadElem QuadElem::operator*(const QuadElem& o) const {
  check(o);
  return {x_ * o.x_ + y_ * o.y_ * Rat(D_), x_ * o.y_ + y_ * o.x_, D_};
}

QuadElem QuadElem::operator/(const QuadElem& o) const {
  check(o);
  Rat n = o.norm();
  if (n == 0) throw std::domain_error("QuadElem: division by zero");
  QuadElem t = *this * o.conj();
  return {t.x_ / n, t.y_ / n, D_};
}

QuadElem quad_conj(const QuadElem& l) { return l.conj(); }
std::pair<Real, Real> quad_embed(const QuadElem& l) { return l.embed(); }

bool is_square(const Int& n) { return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0; }

}  // namespace qcyc
