#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

#include <cmath>

using namespace qcyc;
using namespace qcyc::testing;

namespace {

const Real& tight() {
  static const Real t("1e-60");
  return t;
}

Complex cpow(const Complex& z, const Rat& w) { return exp(log(z) * Complex(to_real(w))); }

std::map<Key, Complex> t_twist(const std::map<Key, Complex>& f, const Sublattice& M, int sign) {
  std::map<Key, Complex> out;
  for (const auto& [k, v] : f) out[k] = v * expi2pi(Real(sign) * to_real(M.q_mod1(k)));
  return out;
}

template <class C>
bool same_series(const VVQSeries<C>& a, const VVQSeries<C>& b) {
  auto strip = [](const VVQSeries<C>& f) {
    std::map<Key, std::map<Rat, C>> m;
    for (const auto& [k, s] : f.comp)
      if (!s.terms.empty()) m[k] = s.terms;
    return m;
  };
  return a.order == b.order && strip(a) == strip(b);
}

Complex on_geodesic(const QForm& A, double s) { return geodesic_point(geodesic(A), Complex(Real(s))).first; }

}  // namespace

TEST_CASE("short vectors against enumeration") {
  std::vector<std::vector<double>> G{{2, 1, 0}, {1, 3, 1}, {0, 1, 4}};
  auto sv = short_vectors(G, 12.0);
  std::set<std::vector<long>> got(sv.begin(), sv.end());
  std::set<std::vector<long>> want;
  for (long a = -5; a <= 5; ++a)
    for (long b = -5; b <= 5; ++b)
      for (long c = -5; c <= 5; ++c) {
        std::vector<long> x{a, b, c};
        double n = 0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) n += x[i] * G[i][j] * x[j];
        if (n <= 12.0) want.insert(x);
      }
  CHECK(got == want);
}

TEST_CASE("Siegel theta transforms under S and T") {
  set_precision(256);
  const auto& L = lattice_L();
  const std::vector<Key> grp{key_even(), key_odd()};
  for (int i = 0; i < 6; ++i) {
    Complex tau = random_upper(0.7, 1.5), z = random_upper(0.5, 2.0);
    auto a = siegel_eval(Complex(Real(-1)) / tau, z, tight()).comp;
    auto b = siegel_eval(tau, z, tight()).comp;
    CHECK(transform_residual(a, b, grp, weil_S_L(false), cpow(tau, Rat(-1, 2))) < Real("1e-55"));
    auto c = siegel_eval(tau + Complex(Real(1)), z, tight()).comp;
    CHECK(max_dev(c, t_twist(b, L, 1)) < Real("1e-55"));
  }
}

TEST_CASE("Siegel theta is invariant in z") {
  set_precision(256);
  for (int i = 0; i < 10; ++i) {
    Complex tau = random_upper(0.8, 1.5), z = random_upper(0.6, 1.5);
    Mat2 g = random_sl2(2);
    Complex gz = mobius(g, z);
    if (gz.im < Real("0.05")) continue;
    auto a = siegel_eval(tau, z, tight()).comp;
    auto b = siegel_eval(tau, gz, tight()).comp;
    CHECK(max_dev(a, b) < Real("1e-50"));
  }
}

TEST_CASE("Siegel theta for large v") {
  set_precision(128);
  Complex tau(Real("0.1"), Real(20)), z(Real(0), Real(1));
  auto t = siegel_eval(tau, z, Real("1e-30"));
  CHECK(abs(t.comp.at(key_even()) / Complex(tau.im) - Complex(Real(1))) < Real("1e-20"));
  // odd vectors have majorant at least 1/4 at z = i, attained by (0, +-1, 0)
  Real lead = 2 * tau.im * boost::multiprecision::exp(-pi() * tau.im / 2);
  CHECK(boost::multiprecision::abs(abs(t.comp.at(key_odd())) / lead - 1) < Real("1e-10"));
}

TEST_CASE("raised theta is a z-derivative") {
  set_precision(256);
  const Real h("1e-25");
  for (int i = 0; i < 4; ++i) {
    Complex tau = random_upper(0.8, 1.4), z = random_upper(0.7, 1.4);
    auto r = raised_siegel_eval(tau, z, tight()).comp;
    auto xp = siegel_eval(tau, z + Complex(h), tight()).comp;
    auto xm = siegel_eval(tau, z - Complex(h), tight()).comp;
    auto yp = siegel_eval(tau, z + Complex(Real(0), h), tight()).comp;
    auto ym = siegel_eval(tau, z - Complex(Real(0), h), tight()).comp;
    std::map<Key, Complex> dz;
    for (const auto& [k, v] : xp) {
      Complex dx = (v - xm[k]) * Complex(1 / (2 * h));
      Complex dy = (yp[k] - ym[k]) * Complex(1 / (2 * h));
      // 2i d/dz = i (d/dx - i d/dy)
      dz[k] = i_unit() * (dx - i_unit() * dy);
    }
    CHECK(max_dev(r, dz) < Real("1e-40"));
  }
}

TEST_CASE("theta of L is the up map of theta of I + N") {
  set_precision(256);
  const auto& L = lattice_L();
  for (const QForm A : {QForm{1, 1, -1}, QForm{1, 0, -2}}) {
    Split s = split(A);
    Complex tau(Real("0.15"), Real("1.1")), z = on_geodesic(A, 0.3);
    auto tl = siegel_eval(tau, z, tight()).comp;
    auto tm = siegel_eval(tau, z, tight(), s.M).comp;
    CHECK(max_dev(up_map(tm, L, s.M), tl) < Real("1e-50"));
  }
}

TEST_CASE("unary theta series") {
  Split s = split({1, 1, -1});
  CHECK(s.N.disc_group().size() == 10);
  auto u3 = unary_theta_series(s, 3, Rat(20));
  auto u1 = unary_theta_series(s, 1, Rat(20));
  CHECK(u3.weight == Rat(3, 2));
  CHECK(u1.weight == Rat(1, 2));
  // direct sum over W = t n0 / 10
  VVQSeries<Rat> o3{Rat(3, 2), Rat(20), {}}, o1{Rat(1, 2), Rat(20), {}};
  for (long t = -60; t <= 60; ++t) {
    Vec3 W = rat(t, 10) * s.n0;
    Rat e = -q(W);
    o3.add(s.N.key(W), e, bilinear(W, s.Avec));
    o1.add(s.N.key(W), e, Rat(1));
  }
  CHECK(same_series(u3, o3));
  CHECK(same_series(u1, o1));
  for (const auto& [k, ser] : u3.comp) {
    Key mk = s.N.key(Rat(-1) * s.N.rep(k));
    for (const auto& [e, c] : ser.terms) CHECK(u3.coeff(mk, e) == -c);
  }
  set_precision(256);
  Complex tau(Real("0.2"), Real("1.1"));
  auto a = evaluate(u3, Complex(Real(-1)) / tau), b = evaluate(u3, tau);
  CHECK(transform_residual(a, b, s.N.disc_group(), weil_S(s.N, true), cpow(tau, Rat(3, 2))) < Real("1e-25"));
  CHECK_THROWS_AS(unary_theta_series(s, 2, Rat(5)), DomainError);
}

TEST_CASE("Hecke theta series") {
  set_precision(256);
  for (const QForm A : {QForm{1, 1, -1}, QForm{1, 0, -2}, QForm{1, 3, -1}, QForm{1, 2, -2}}) {
    CAPTURE(A.disc());
    Split s = split(A);
    auto h0 = hecke_theta_series(s, Rat(40), 0);
    CHECK(same_series(h0, hecke_theta_series(s, Rat(40), 4)));
    CHECK(same_series(h0, hecke_theta_series(s, Rat(40), -2)));
    CHECK(h0.weight == 1);
    for (const Complex& tau : {i_unit(), Complex(Real("0.2"), Real("1.3"))}) {
      auto a = evaluate(h0, Complex(Real(-1)) / tau), b = evaluate(h0, tau);
      CHECK(transform_residual(a, b, s.I.disc_group(), weil_S(s.I, false), tau) < Real("1e-15"));
    }
  }
}

TEST_CASE("sign of lambda matches the pairing with Y0") {
  set_precision(128);
  for (const QForm A : {QForm{1, 1, -1}, QForm{1, 0, -2}, QForm{2, 2, -1}}) {
    Split s = split(A);
    RVec3 Y0 = y0_vector(A);
    for (int i = 0; i < 50; ++i) {
      Vec3 Y = Rat(uniform(-9, 9)) * s.I.basis()[0] + Rat(uniform(-9, 9)) * s.I.basis()[1];
      if (Y == Vec3{}) continue;
      QuadElem l = lambda_of(A, Y);
      Real p = bilinear(to_real(Y), Y0);
      Real lv = l.value();
      CHECK(boost::multiprecision::abs(lv - Real(A.a) * p / boost::multiprecision::sqrt(Real(A.disc()))) <
            Real("1e-30") * (1 + boost::multiprecision::abs(p)));
      CHECK(l.sign() == (p > 0 ? 1 : p < 0 ? -1 : 0));
    }
    for (const auto& w : windowed_vectors(s.I.basis(), A, Rat(30), 0)) {
      CHECK(w.qY > 0);
      CHECK(w.qY <= 30);
      CHECK(q(w.Y) == w.qY);
    }
  }
}

TEST_CASE("tail bounds are sound") {
  set_precision(256);
  Split s = split({1, 1, -1});
  Complex z = on_geodesic({1, 1, -1}, 0.2);
  for (const char* loose : {"1e-8", "1e-20"}) {
    Complex tau(Real("0.3"), Real("0.9"));
    auto a = siegel_eval(tau, z, Real(loose)), b = siegel_eval(tau, z, tight());
    CHECK(max_dev(a.comp, b.comp) <= a.tail_bound);
    CHECK(a.tail_bound <= Real(loose));
    auto c = raised_siegel_eval(tau, z, Real(loose)), d = raised_siegel_eval(tau, z, tight());
    CHECK(max_dev(c.comp, d.comp) <= c.tail_bound);
    auto e = theta_I_star_eval(s, tau, z, Real(loose)), f = theta_I_star_eval(s, tau, z, tight());
    CHECK(max_dev(e.comp, f.comp) <= e.tail_bound);
    auto g = theta_I_eval(s, tau, z, Real(loose)), hh = theta_I_eval(s, tau, z, tight());
    CHECK(max_dev(g.comp, hh.comp) <= g.tail_bound);
  }
  CHECK_THROWS_AS(siegel_eval(Complex(Real(0), Real(-1)), z, tight()), DomainError);
}
