#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

using namespace qcyc;
using namespace qcyc::testing;

namespace {

// q prod (1 - q^n)^24 by repeated multiplication with plain integers
std::vector<Int> delta_product(long order) {
  std::vector<Int> p(order, 0);
  p[0] = 1;
  for (long n = 1; n < order; ++n)
    for (int r = 0; r < 24; ++r)
      for (long e = order - 1; e >= n; --e) p[e] -= p[e - n];
  std::vector<Int> d(order, 0);
  for (long e = 1; e < order; ++e) d[e] = p[e - 1];
  return d;
}

Int sigma(long k, long n) {
  Int s = 0;
  for (long d = 1; d <= n; ++d)
    if (n % d == 0) {
      Int t;
      mpz_ui_pow_ui(t.get_mpz_t(), d, k);
      s += t;
    }
  return s;
}

VVQSeries<Rat> monomial(const Rat& e, const Rat& c, const Rat& weight) {
  VVQSeries<Rat> f{weight, Rat(100), {}};
  f.add(Key{}, e, c);
  return f;
}

Complex cpow(const Complex& z, const Rat& w) { return exp(log(z) * Complex(to_real(w))); }

// max over components of |f(-1/tau) - tau^w S f(tau)|
Real s_residual(const VVQSeries<Rat>& f, const Complex& tau, bool dual) {
  auto lhs = evaluate(f, Complex(Real(-1)) / tau);
  auto rhs = evaluate(f, tau);
  return transform_residual(lhs, rhs, {key_even(), key_odd()}, weil_S_L(dual), cpow(tau, f.weight));
}

// T acts diagonally by e(q(gamma)); exponents of each component lie in q(gamma) + Z
bool exponents_consistent(const VVQSeries<Rat>& f, bool dual) {
  for (const auto& [k, s] : f.comp) {
    Rat qg = lattice_L().q_mod1(k);
    if (dual) qg = -qg;
    for (const auto& [e, c] : s.terms)
      if (frac(e - qg) != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("binomials and Bernoulli numbers") {
  CHECK(binom(Rat(5), 2) == 10);
  CHECK(binom(Rat(1, 2), 2) == Rat(-1, 8));
  CHECK(binom(Rat(3), 4) == 0);
  CHECK(bernoulli(2) == Rat(1, 6));
  CHECK(bernoulli(4) == Rat(-1, 30));
  CHECK(bernoulli(12) == Rat(-691, 2730));
}

TEST_CASE("Eisenstein series, Delta and j") {
  const long N = 30;
  Laurent E4 = eisenstein(4, N), E6 = eisenstein(6, N);
  for (long n = 1; n < N; ++n) {
    CHECK(E4[n] == 240 * Rat(sigma(3, n)));
    CHECK(E6[n] == -504 * Rat(sigma(5, n)));
  }
  Laurent E8 = eisenstein(8, N);
  Laurent sq = pow(E4, 2);
  for (long n = 0; n < N; ++n) CHECK(sq[n] == E8[n]);
  Laurent d = delta(N);
  auto prod = delta_product(N);
  for (long n = 0; n < N; ++n) CHECK(d[n] == Rat(prod[n]));
  CHECK(d[2] == -24);
  CHECK(d[5] == 4830);
  Laurent j = jfunc(4);
  CHECK(j[-1] == 1);
  CHECK(j[0] == 744);
  CHECK(j[1] == 196884);
  CHECK(j[2] == 21493760);
  CHECK_THROWS_AS(eisenstein(5, 10), DomainError);
}

TEST_CASE("Laurent products against direct convolution") {
  for (int t = 0; t < 30; ++t) {
    Laurent a, b;
    a.val = uniform(-3, 2);
    b.val = uniform(-3, 2);
    for (int i = 0; i < 12; ++i) a.c.push_back(rat(uniform(-9, 9), uniform(1, 4)));
    for (int i = 0; i < 9; ++i) b.c.push_back(rat(uniform(-9, 9), uniform(1, 4)));
    Laurent p = a * b;
    CHECK(p.order() == std::min(a.order() + b.val, b.order() + a.val));
    for (long e = p.val; e < p.order(); ++e) {
      Rat s = 0;
      for (long i = a.val; i < a.order(); ++i) s += a[i] * b[e - i];
      CHECK(p[e] == s);
    }
    a.c[0] = 1 + Rat(uniform(0, 3));
    Laurent one = a * inverse(a);
    CHECK(one[0] == 1);
    for (long e = 1; e < one.order(); ++e) CHECK(one[e] == 0);
  }
}

TEST_CASE("Rankin-Cohen brackets") {
  for (int t = 0; t < 40; ++t) {
    Rat e1 = rat(uniform(-8, 8), 4), e2 = rat(uniform(-8, 8), 4);
    Rat k = rat(uniform(-5, 8), 2), l = rat(uniform(-5, 8), 2);
    auto f = monomial(e1, Rat(1), k), g = monomial(e2, Rat(1), l);
    CHECK(rankin_cohen(f, k, g, l, 0).coeff(Key{}, e1 + e2) == 1);
    CHECK(rankin_cohen(f, k, g, l, 1).coeff(Key{}, e1 + e2) == l * e1 - k * e2);
    Rat w0 = (l + 1) * l / 2, w1 = -(k + 1) * (l + 1), w2 = (k + 1) * k / 2;
    CHECK(rankin_cohen(f, k, g, l, 2).coeff(Key{}, e1 + e2) == w0 * e1 * e1 + w1 * e1 * e2 + w2 * e2 * e2);
    for (long n = 0; n <= 4; ++n) {
      Rat a = rankin_cohen(f, k, g, l, n).coeff(Key{}, e1 + e2);
      Rat b = rankin_cohen(g, l, f, k, n).coeff(Key{}, e1 + e2);
      CHECK(a == (n % 2 ? -b : b));
    }
  }
  // the bracket of E4 with E6 is a multiple of Delta
  Laurent E4 = eisenstein(4, 12), E6 = eisenstein(6, 12);
  auto br = rankin_cohen(as_vv(E4, Rat(4)), Rat(4), as_vv(E6, Rat(6)), Rat(6), 1);
  Laurent d = delta(12);
  CHECK(br.weight == 12);
  Rat c = br.coeff(Key{}, Rat(1));
  CHECK(c != 0);
  CHECK(br.coeff(Key{}, Rat(0)) == 0);
  for (long n = 1; n < 12; ++n) CHECK(br.coeff(Key{}, Rat(n)) == c * d[n]);
}

TEST_CASE("constant term pairing") {
  VVQSeries<Rat> g{Rat(-1, 2), Rat(5), {}}, h{Rat(5, 2), Rat(5), {}};
  g.add(key_even(), Rat(-1), Rat(3));
  g.add(key_odd(), Rat(-1, 4), Rat(2));
  g.add(key_even(), Rat(0), Rat(7));
  h.add(key_even(), Rat(1), Rat(5));
  h.add(key_odd(), Rat(1, 4), Rat(-1));
  h.add(key_even(), Rat(0), Rat(1, 2));
  CHECK(ct_pair(g, h) == 3 * 5 + 2 * (-1) + Rat(7, 2));
  VVQSeries<Rat> short_h{Rat(5, 2), Rat(1, 2), {}};
  CHECK_THROWS_AS(ct_pair(g, short_h), InsufficientOrder);
  CHECK_THROWS_AS(g.coeff(key_even(), Rat(5)), InsufficientOrder);
}

TEST_CASE("unary theta of weight 1/2") {
  auto th = unary_theta_half(Rat(60));
  CHECK(th.weight == Rat(1, 2));
  for (long e4 = 0; e4 < 240; ++e4) {
    long count = 0;
    for (long n = -16; n <= 16; ++n)
      if (n * n == e4) ++count;
    Key k = e4 % 4 == 0 ? key_even() : key_odd();
    if (e4 % 4 == 0 || e4 % 4 == 1) CHECK(th.coeff(k, rat(e4, 4)) == count);
  }
  set_precision(256);
  CHECK(s_residual(th, Complex(Real("0.3"), Real("1.1")), true) < Real("1e-60"));
  CHECK(exponents_consistent(th, true));
  CHECK(s_residual(e7_theta(Rat(60)), Complex(Real("-0.2"), Real("0.9")), false) < Real("1e-60"));
  CHECK(exponents_consistent(e7_theta(Rat(10)), false));
}

TEST_CASE("Weil S matrices are unitary") {
  set_precision(128);
  for (bool dual : {false, true}) {
    auto S = weil_S_L(dual);
    for (size_t i = 0; i < S.size(); ++i)
      for (size_t j = 0; j < S.size(); ++j) {
        Complex s;
        for (size_t k = 0; k < S.size(); ++k) s += S[i][k] * conj(S[j][k]);
        CHECK(abs(s - Complex(Real(i == j ? 1 : 0))) < pow2(-120));
      }
  }
  Split sp = split({1, 1, -1});
  auto S = weil_S(sp.M, false);
  CHECK(S.size() == sp.M.disc_group().size());
  for (size_t i = 0; i < S.size(); ++i) {
    Complex s;
    for (size_t k = 0; k < S.size(); ++k) s += S[i][k] * conj(S[i][k]);
    CHECK(abs(s - Complex(Real(1))) < pow2(-120));
  }
}

TEST_CASE("weakly holomorphic inputs for k = 3") {
  auto basis = plus_basis(3, -4, Rat(60));
  REQUIRE(basis.size() == 1);
  const auto& g = basis[0];
  CHECK(g.weight == Rat(-3, 2));
  CHECK(coeff_disc(g, -4) == 1);
  CHECK(coeff_disc(g, -3) == 2);
  CHECK(coeff_disc(g, -7) == 0);
  CHECK(exponents_consistent(g, true));
  for (const auto& [k, s] : g.comp)
    for (const auto& [e, c] : s.terms) CHECK(c.get_den() == 1);
  set_precision(256);
  CHECK(s_residual(g, i_unit(), true) < Real("1e-60"));
  CHECK(s_residual(g, Complex(Real("0.25"), Real("1.2")), true) < Real("1e-60"));

  auto basis5 = plus_basis(5, -8, Rat(60));
  REQUIRE(basis5.size() == 2);
  CHECK(coeff_disc(basis5[0], -4) == 1);
  CHECK(coeff_disc(basis5[0], -8) == 0);
  CHECK(coeff_disc(basis5[1], -4) == 0);
  CHECK(coeff_disc(basis5[1], -8) == 1);
  for (const auto& b : basis5) {
    CHECK(b.weight == Rat(-7, 2));
    CHECK(s_residual(b, Complex(Real("0.1"), Real("1.3")), true) < Real("1e-60"));
  }
  CHECK_THROWS(plus_basis(4, -4, Rat(10)));
}

TEST_CASE("product recipes") {
  set_precision(256);
  auto g = g_recipe("theta*E4*E6/Delta", Rat(60));
  CHECK(g.weight == Rat(-3, 2));
  CHECK(s_residual(g, Complex(Real("0.3"), Real("1.1")), true) < Real("1e-60"));
  auto h = g_recipe("theta*E4^2/Delta", Rat(30));
  CHECK(h.weight == Rat(-7, 2));
  auto hj = g_recipe("theta*E4^2/Delta*j", Rat(20));
  CHECK(hj.weight == Rat(-7, 2));
  CHECK(hj.min_exponent() == -2);
  auto f = plus_form_even_58(Rat(60));
  CHECK(f.weight == Rat(-1, 2));
  CHECK(coeff_disc(f, -5) == 1);
  CHECK(coeff_disc(f, -1) == 0);
  CHECK(coeff_disc(f, -4) == 0);
  CHECK(f.min_exponent() == Rat(-2));
  CHECK(exponents_consistent(f, false));
  CHECK(s_residual(f, Complex(Real("0.2"), Real("1.1")), false) < Real("1e-60"));
  CHECK_THROWS(g_recipe("theta*E5/Delta", Rat(10)));
}
