#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

using namespace qcyc;
using namespace qcyc::testing;

namespace {

const MockPart& mock(long D) {
  static std::map<long, MockPart> cache;
  auto it = cache.find(D);
  if (it != cache.end()) return it->second;
  QForm A = D == 5 ? QForm{1, 1, -1} : D == 8 ? QForm{1, 0, -2} : QForm{1, 2, -2};
  return cache.emplace(D, solve_mock(split(A))).first->second;
}

Split split_for(long D) { return split(D == 5 ? QForm{1, 1, -1} : D == 8 ? QForm{1, 0, -2} : QForm{1, 2, -2}); }

std::vector<Complex> off_arc() {
  return {Complex(Real("0.1"), Real("1.2")), Complex(Real("-0.35"), Real("0.8")), Complex(Real("0.45"), Real("0.95"))};
}

}  // namespace

TEST_CASE("mock theta part solves the modularity equations") {
  set_precision(256);
  for (long D : {5L, 8L}) {
    CAPTURE(D);
    const MockPart& mp = mock(D);
    CHECK(mp.residual < pow2(-64));
    CHECK(mp.exact_residual < pow2(-64));
    CHECK(mp.holo.weight == Rat(1, 2));
    CHECK(mp.holo.order >= 15);
    // the exact part stops at the first coefficient that failed reconstruction
    if (!mp.unrecognized.empty()) CHECK(mp.unrecognized.front().second == mp.holo.order);
    CHECK(modularity_residual(mp.holo_numeric, mp, off_arc()) < Real("1e-15"));
    CHECK(modularity_residual(convert<Real>(mp.holo), mp, off_arc()) < Real("1e-15"));
    for (const auto& [k, s] : mp.holo.comp)
      for (const auto& [e, c] : s.terms) {
        CHECK(c.get_den() <= mp.den_bound_used);
        CHECK(boost::multiprecision::abs(mp.holo_numeric.coeff(k, e) - to_real(c)) <
              Real("1e-12") * (1 + boost::multiprecision::abs(to_real(c))));
      }
  }
}

TEST_CASE("mock theta part is odd") {
  const MockPart& mp = mock(5);
  Split s = split_for(5);
  for (const auto& [k, ser] : mp.holo.comp) {
    Key mk = s.N.key(Rat(-1) * s.N.rep(k));
    for (const auto& [e, c] : ser.terms) CHECK(mp.holo.coeff(mk, e) == -c);
  }
}

TEST_CASE("xi maps the completion to the shadow") {
  set_precision(256);
  const Real h("1e-20");
  for (long D : {5L, 8L}) {
    const MockPart& mp = mock(D);
    VVFunction F = [&](const Complex& t) { return completion_eval(mp, t); };
    for (const Complex& tau : {i_unit(), Complex(Real("0.3"), Real("0.9"))}) {
      auto xi = xi_numeric(F, Rat(1, 2), tau, h);
      auto sh = evaluate(mp.shadow, tau);
      for (auto& [k, v] : sh) v = v * mp.scale;
      CHECK(max_dev(xi, sh) < Real("1e-15"));
      auto lap = laplacian_numeric(F, Rat(1, 2), tau, Real("1e-15"));
      Real m = 0;
      for (const auto& [k, v] : lap) m = std::max(m, abs(v));
      CHECK(m < Real("1e-15"));
    }
  }
}

TEST_CASE("numeric operators on known functions") {
  set_precision(256);
  // xi_k of v^{1-k} is (1 - k) times a constant, and holomorphic functions are annihilated
  const Rat k(1, 2);
  VVFunction f = [](const Complex& t) {
    return std::map<Key, Complex>{{Key{}, Complex(boost::multiprecision::sqrt(t.im))}};
  };
  VVFunction g = [](const Complex& t) { return std::map<Key, Complex>{{Key{}, exp(t * t)}}; };
  Complex tau(Real("0.2"), Real("1.1"));
  auto xf = xi_numeric(f, k, tau, Real("1e-20"));
  // xi v^{1/2} = 2i v^{1/2} conj(d/dtaubar v^{1/2}) = 2i v^{1/2} conj(i/(4 v^{1/2})) = 1/2
  CHECK(abs(xf.at(Key{}) - Complex(Real("0.5"))) < Real("1e-30"));
  CHECK(abs(xi_numeric(g, k, tau, Real("1e-20")).at(Key{})) < Real("1e-30"));
  CHECK(abs(laplacian_numeric(g, k, tau, Real("1e-15")).at(Key{})) < Real("1e-20"));
}

TEST_CASE("completion tail uses the incomplete gamma function") {
  set_precision(256);
  const MockPart& mp = mock(8);
  VVQSeries<Real> zero{Rat(1, 2), Rat(40), {}};
  Complex tau(Real("0.1"), Real("0.8"));
  auto nonh = completion_eval(zero, mp.shadow, mp.scale, tau);
  // direct sum of the nonholomorphic part from the shadow coefficients
  std::map<Key, Complex> direct;
  for (const auto& [k, s] : mp.shadow.comp)
    for (const auto& [e, c] : s.terms) {
      if (e <= 0) continue;
      Real n = to_real(e);
      Real amp = -mp.scale * to_real(c) / boost::multiprecision::sqrt(4 * pi() * n) *
                 upper_incomplete_gamma_half(4 * pi() * n * tau.im);
      direct[k] += Complex(amp) * e2pi(Complex(-n) * tau);
    }
  CHECK(max_dev(nonh, direct) < Real("1e-40"));
}

TEST_CASE("gauge freedom by odd weakly holomorphic forms") {
  set_precision(256);
  const MockPart& mp = mock(5);
  Split s = split_for(5);
  auto h = odd_weakly_holomorphic(s, 2, Rat(-1, 5));
  CHECK(h.coeff(s.N.key(rat(2, 10) * s.n0), Rat(-1, 5)) == 1);
  CHECK(h.min_exponent() == Rat(-1, 5));
  for (const auto& [k, ser] : h.comp)
    for (const auto& [e, c] : ser.terms) CHECK(c.get_den() <= 1000000);
  auto shifted = mp.holo_numeric;
  shifted += convert<Real>(h).scaled(Real(3));
  CHECK(modularity_residual(shifted, mp, off_arc()) < Real("1e-15"));
  CHECK_THROWS(odd_weakly_holomorphic(s, 1, Rat(-1, 20)));
  CHECK_THROWS_AS(odd_weakly_holomorphic(s, 2, Rat(-1, 4)), DomainError);
}

TEST_CASE("arc points") {
  set_precision(128);
  auto pts = arc_points(7);
  CHECK(pts.size() == 7);
  for (const auto& p : pts) {
    CHECK(boost::multiprecision::abs(abs(p) - 1) < Real("1e-30"));
    CHECK(arg(p) >= pi() / 6 - Real("1e-30"));
    CHECK(arg(p) <= 5 * pi() / 6 + Real("1e-30"));
  }
}
