#include "qcyc/qforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace qcyc {

Mat2 mat_T(long n) { return {1, n, 0, 1}; }
Mat2 mat_S() { return {0, -1, 1, 0}; }

long QForm::content() const { return std::gcd(std::gcd(std::labs(a), std::labs(b)), std::labs(c)); }

QForm QForm::primitive() const {
  long g = content();
  if (g == 0) throw DomainError("zero form");
  return {a / g, b / g, c / g};
}

std::string QForm::str() const {
  return "[" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + "]";
}

bool valid_disc(long d) {
  long r = ((d % 4) + 4) % 4;
  return d != 0 && (r == 0 || r == 1);
}

QForm act(const Mat2& g, const QForm& Q) {
  if (g.det() != 1) throw DomainError("act: determinant must be 1");
  // doubled matrix of the form: [[b, 2c], [-2a, -b]]
  const long x00 = Q.b, x01 = 2 * Q.c, x10 = -2 * Q.a, x11 = -Q.b;
  const Mat2 gi = g.inv();
  const long m00 = g.a * x00 + g.b * x10, m01 = g.a * x01 + g.b * x11;
  const long m10 = g.c * x00 + g.d * x10, m11 = g.c * x01 + g.d * x11;
  const long y00 = m00 * gi.a + m01 * gi.c, y01 = m00 * gi.b + m01 * gi.d;
  const long y10 = m10 * gi.a + m11 * gi.c;
  return {-y10 / 2, y00, y01 / 2};
}

bool is_reduced_posdef(const QForm& Q) {
  if (!Q.posdef()) return false;
  if (std::labs(Q.b) > Q.a || Q.a > Q.c) return false;
  if ((std::labs(Q.b) == Q.a || Q.a == Q.c) && Q.b < 0) return false;
  return true;
}

namespace {
long ceil_div(long p, long q) {
  // q > 0
  return p >= 0 ? (p + q - 1) / q : -((-p) / q);
}
}  // namespace

Reduced reduce_posdef(const QForm& Q) {
  if (!Q.posdef()) throw DomainError("reduce_posdef: form " + Q.str() + " is not positive definite");
  QForm f = Q;
  Mat2 g;
  for (int iter = 0; iter < 100000; ++iter) {
    // bring b into (-a, a]
    long n = ceil_div(f.b - f.a, 2 * f.a);
    if (n != 0) {
      Mat2 t = mat_T(n);
      f = act(t, f);
      g = t * g;
    }
    if (f.a > f.c || (f.a == f.c && f.b < 0)) {
      f = act(mat_S(), f);
      g = mat_S() * g;
      continue;
    }
    return {f, g};
  }
  throw std::runtime_error("reduce_posdef: no convergence");
}

bool is_reduced_indef(const QForm& Q) {
  const long D = Q.disc();
  if (D <= 0) return false;
  auto lt_sqrt = [&](long x) { return x < 0 || x * x < D; };  // x < sqrt(D)
  auto gt_sqrt = [&](long x) { return x > 0 && x * x > D; };  // x > sqrt(D)
  if (!(Q.b > 0 && lt_sqrt(Q.b))) return false;
  // sqrt(D) - b < 2|a| < sqrt(D) + b
  return gt_sqrt(2 * std::labs(Q.a) + Q.b) && lt_sqrt(2 * std::labs(Q.a) - Q.b);
}

std::pair<QForm, Mat2> rho_step(const QForm& Q) {
  const long D = Q.disc();
  if (D <= 0) throw DomainError("rho_step: indefinite form expected");
  if (Q.c == 0) throw SquareDiscriminant("rho_step: c = 0 (square discriminant)");
  const long cc = std::labs(Q.c);
  const long m = 2 * cc;
  long r = ((-Q.b) % m + m) % m;
  if (cc * cc > D) {
    if (r > cc) r -= m;
  } else {
    // sqrt(D) - 2|c| < r < sqrt(D)
    auto lt_sqrt = [&](long x) { return x < 0 || x * x < D; };
    while (!lt_sqrt(r)) r -= m;
    while (lt_sqrt(r + m)) r += m;
  }
  const long n = (-Q.b - r) / (2 * Q.c);
  Mat2 g = mat_T(n) * mat_S();
  QForm f = act(g, Q);
  return {f, g};
}

std::vector<QForm> reduced_cycle(const QForm& Q) {
  if (!is_reduced_indef(Q)) throw DomainError("reduced_cycle: " + Q.str() + " is not reduced");
  std::vector<QForm> out{Q};
  QForm f = rho_step(Q).first;
  while (!(f == Q)) {
    out.push_back(f);
    if (out.size() > 100000) throw std::runtime_error("reduced_cycle: runaway cycle");
    f = rho_step(f).first;
  }
  return out;
}

Reduced reduce_indef(const QForm& Q) {
  const long D = Q.disc();
  if (D <= 0) throw DomainError("reduce_indef: indefinite form expected");
  if (is_square(Int(D))) throw SquareDiscriminant("reduce_indef: square discriminant");
  QForm f = Q;
  Mat2 g;
  for (int iter = 0; iter < 100000 && !is_reduced_indef(f); ++iter) {
    auto [h, m] = rho_step(f);
    f = h;
    g = m * g;
  }
  if (!is_reduced_indef(f)) throw std::runtime_error("reduce_indef: no convergence");
  return {f, g};
}

std::vector<QForm> class_reps(long d) {
  if (!valid_disc(d)) throw DomainError("class_reps: discriminant " + std::to_string(d) + " is not 0,1 mod 4");
  std::vector<QForm> out;
  if (d < 0) {
    for (long a = 1; 3 * a * a <= -d; ++a) {
      for (long b = -a + 1; b <= a; ++b) {
        long num = b * b - d;
        if (num % (4 * a)) continue;
        long c = num / (4 * a);
        QForm Q{a, b, c};
        if (is_reduced_posdef(Q)) out.push_back(Q);
      }
    }
    return out;
  }
  if (is_square(Int(d))) throw SquareDiscriminant("class_reps: square discriminant " + std::to_string(d));
  std::vector<QForm> reduced;
  for (long b = 1; b * b < d; ++b) {
    long num = b * b - d;
    if (num % 4) continue;
    long ac = num / 4;
    for (long a = -std::labs(ac); a <= std::labs(ac); ++a) {
      if (a == 0 || ac % a) continue;
      QForm Q{a, b, ac / a};
      if (is_reduced_indef(Q)) reduced.push_back(Q);
    }
  }
  std::set<QForm> seen;
  for (const auto& Q : reduced) {
    if (seen.count(Q)) continue;
    auto cyc = reduced_cycle(Q);
    QForm rep{};
    bool have = false;
    for (const auto& f : cyc) {
      seen.insert(f);
      if (f.a > 0 && (!have || f < rep)) {
        rep = f;
        have = true;
      }
    }
    if (!have) rep = *std::min_element(cyc.begin(), cyc.end());
    out.push_back(rep);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool equivalent(const QForm& P, const QForm& Q) {
  if (P.disc() != Q.disc()) return false;
  if (P.disc() < 0) {
    if ((P.a > 0) != (Q.a > 0)) return false;
    if (P.a < 0) return equivalent(-P, -Q);
    return reduce_posdef(P).form == reduce_posdef(Q).form;
  }
  auto rp = reduce_indef(P).form;
  auto rq = reduce_indef(Q).form;
  for (const auto& f : reduced_cycle(rp))
    if (f == rq) return true;
  return false;
}

std::pair<Int, Int> pell4(long D) {
  if (D <= 0) throw DomainError("pell4: D must be positive");
  if (is_square(Int(D))) throw SquareDiscriminant("pell4: square D");
  // D here is a discriminant (0 or 1 mod 4); expand theta = (b0 + sqrt D)/2, the root of the principal
  // reduced form, and multiply its complete quotients over one period.
  if (!valid_disc(D)) throw DomainError("pell4: D must be 0 or 1 mod 4");
  Int s;
  mpz_sqrt(s.get_mpz_t(), Int(D).get_mpz_t());
  Int b0 = s;
  if ((b0 - Int(D)) % 2 != 0) b0 -= 1;
  if (b0 * b0 == Int(D)) b0 -= 2;
  const Int P0 = b0, Q0 = 2;
  Int P = P0, Qd = Q0;
  QuadElem prod(Rat(1), Rat(0), Int(D));
  for (long iter = 0; iter < 10000000; ++iter) {
    prod = prod * QuadElem(Rat(P, Qd), Rat(Int(1), Qd), Int(D));
    Int a;
    mpz_fdiv_q(a.get_mpz_t(), Int(P + s).get_mpz_t(), Qd.get_mpz_t());
    Int Pn = a * Qd - P;
    Int Qn = (Int(D) - Pn * Pn) / Qd;
    P = Pn;
    Qd = Qn;
    if (P == P0 && Qd == Q0) break;
  }
  QuadElem eps = prod;
  if (eps.norm() < 0) eps = eps * eps;
  if (eps.norm() != 1) throw std::runtime_error("pell4: unit of norm != 1");
  if (eps.sign() < 0) eps = -eps;
  if (eps.value() < 1) eps = eps.conj();
  Rat t = 2 * eps.x(), u = 2 * eps.y();
  if (t.get_den() != 1 || u.get_den() != 1) throw std::runtime_error("pell4: non-integral solution");
  return {t.get_num(), abs(u.get_num())};
}

Automorph automorph(const QForm& A) {
  const long D = A.disc();
  if (D <= 0) throw DomainError("automorph: D must be positive");
  if (is_square(Int(D))) throw SquareDiscriminant("automorph: square discriminant");
  const QForm A0 = A.primitive();
  const long g = A.content();
  const long D0 = A0.disc();
  auto [t, u] = pell4(D0);
  if (!t.fits_slong_p() || !u.fits_slong_p()) throw std::overflow_error("automorph: unit too large");
  const long tl = t.get_si(), ul = u.get_si();
  Mat2 M{(tl - A0.b * ul) / 2, -A0.c * ul, A0.a * ul, (tl + A0.b * ul) / 2};
  Automorph out;
  out.M = M;
  out.t = t;
  out.u = u;
  out.eps = QuadElem(Rat(t, 2), Rat(u, Int(2 * g)), Int(D));
  return out;
}

Geodesic geodesic(const QForm& A) {
  const long D = A.disc();
  if (D <= 0) throw DomainError("geodesic: D must be positive");
  if (is_square(Int(D))) throw SquareDiscriminant("geodesic: square discriminant");
  if (A.a <= 0) throw DomainError("geodesic: a must be positive; negate A (this flips the sign of cycle integrals)");
  Geodesic G;
  G.A = A;
  G.D = D;
  Real sD = boost::multiprecision::sqrt(Real(D));
  G.w = (-Real(A.b) - sD) / (2 * Real(A.a));
  G.wp = (-Real(A.b) + sD) / (2 * Real(A.a));
  Real s0 = boost::multiprecision::sqrt(Real(A.a)) / boost::multiprecision::sqrt(sD);
  G.sigma = {s0 * G.wp, s0 * G.w, s0, s0};
  G.aut = automorph(A);
  G.log_eps = boost::multiprecision::log(G.aut.eps.value());
  return G;
}

std::pair<Complex, Complex> geodesic_point(const Geodesic& G, const Complex& s) {
  Complex zeta = i_unit() * exp(s);
  Complex den = zeta + Complex(1);
  Complex z = (Complex(G.wp) * zeta + Complex(G.w)) / den;
  Complex dz = Complex(G.wp - G.w) * zeta / (den * den);
  return {z, dz};
}

Complex geodesic_param(const Geodesic& G, const Complex& z) {
  Complex zeta = (z - Complex(G.w)) / (Complex(G.wp) - z);
  Complex l = log(zeta);
  return {l.re, l.im - pi() / 2};
}

Complex cm_point(const QForm& Q) {
  if (!Q.posdef()) throw DomainError("cm_point: positive definite form expected, got " + Q.str());
  Real s = boost::multiprecision::sqrt(Real(-Q.disc()));
  return {Real(-Q.b) / (2 * Real(Q.a)), s / (2 * Real(Q.a))};
}

Complex mobius(const Mat2& g, const Complex& z) {
  return (Complex(Real(g.a)) * z + Complex(Real(g.b))) / (Complex(Real(g.c)) * z + Complex(Real(g.d)));
}

Complex eval_form(const QForm& Q, const Complex& z) {
  return Complex(Real(Q.a)) * z * z + Complex(Real(Q.b)) * z + Complex(Real(Q.c));
}

}  // namespace qcyc
