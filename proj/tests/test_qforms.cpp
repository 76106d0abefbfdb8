#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

#include <numeric>
#include <set>

using namespace qcyc;
using namespace qcyc::testing;

namespace {

bool gauss_reduced(const QForm& Q) {
  const long ab = std::labs(Q.b);
  if (!(ab <= Q.a && Q.a <= Q.c)) return false;
  if ((ab == Q.a || Q.a == Q.c) && Q.b < 0) return false;
  return true;
}

// reduced forms of discriminant d < 0 by direct enumeration
std::set<QForm> reduced_oracle(long d) {
  std::set<QForm> out;
  for (long a = 1; 3 * a * a <= -d; ++a)
    for (long b = -a; b <= a; ++b) {
      long num = b * b - d;
      if (num % (4 * a)) continue;
      QForm Q{a, b, num / (4 * a)};
      if (gauss_reduced(Q)) out.insert(Q);
    }
  return out;
}

// orbit of Q under words of length <= depth in S, T, T^-1
std::set<QForm> orbit(const QForm& Q, int depth) {
  std::set<QForm> seen{Q}, frontier{Q};
  const std::vector<Mat2> gens{mat_S(), mat_T(1), mat_T(-1)};
  for (int i = 0; i < depth; ++i) {
    std::set<QForm> next;
    for (const auto& P : frontier)
      for (const auto& g : gens) {
        QForm R = act(g, P);
        if (std::labs(R.a) > 200 || std::labs(R.b) > 200 || std::labs(R.c) > 200) continue;
        if (seen.insert(R).second) next.insert(R);
      }
    frontier = next;
  }
  return seen;
}

// number of classes of discriminant D > 0 by merging orbits of all forms in a box
long class_count_oracle(long D) {
  std::vector<QForm> box;
  for (long a = -6; a <= 6; ++a)
    for (long b = -12; b <= 12; ++b) {
      if (a == 0) continue;
      long num = b * b - D;
      if (num % (4 * a)) continue;
      box.push_back({a, b, num / (4 * a)});
    }
  std::vector<int> comp(box.size(), -1);
  int n = 0;
  for (size_t i = 0; i < box.size(); ++i) {
    if (comp[i] >= 0) continue;
    auto orb = orbit(box[i], 14);
    for (size_t j = 0; j < box.size(); ++j)
      if (orb.count(box[j])) {
        if (comp[j] >= 0 && comp[j] != n) {
          int old = comp[j];
          for (auto& c : comp)
            if (c == old) c = n;
        }
        comp[j] = n;
      }
    ++n;
  }
  std::set<int> distinct(comp.begin(), comp.end());
  return static_cast<long>(distinct.size());
}

std::pair<long, long> pell_oracle(long D) {
  for (long u = 1; u < 100000; ++u) {
    long t2 = 4 + D * u * u;
    long t = std::lround(std::sqrt(static_cast<double>(t2)));
    for (long s = t - 1; s <= t + 1; ++s)
      if (s > 0 && s * s == t2) return {s, u};
  }
  return {0, 0};
}

}  // namespace

TEST_CASE("group action") {
  QForm Q{1, 0, 1};
  CHECK(act(Mat2{}, Q) == Q);
  CHECK(act(mat_T(1), Q).disc() == -4);
  for (int i = 0; i < 100; ++i) {
    Mat2 g = random_sl2(3), h = random_sl2(3);
    QForm P{uniform(-20, 20), uniform(-20, 20), uniform(-20, 20)};
    CHECK(g.det() == 1);
    CHECK(act(g, act(h, P)) == act(g * h, P));
    CHECK(act(g, P).disc() == P.disc());
  }
}

TEST_CASE("positive definite reduction") {
  CHECK(reduce_posdef({1, 0, 1}).form == QForm{1, 0, 1});
  CHECK(reduce_posdef({3, 2, 2}).form == QForm{2, 2, 3});
  // brute-force: the reduced form in the orbit of [3,2,2]
  std::set<QForm> red;
  for (const auto& P : orbit({3, 2, 2}, 8))
    if (P.a > 0 && gauss_reduced(P)) red.insert(P);
  REQUIRE(red.size() == 1);
  CHECK(*red.begin() == QForm{2, 2, 3});
  for (int i = 0; i < 100; ++i) {
    QForm P = *std::next(reduced_oracle(-20 * 3).begin(), uniform(0, 3));
    Mat2 g = random_sl2(4);
    auto r = reduce_posdef(act(g, P));
    CHECK(r.form == P);
    CHECK(act(r.transform, act(g, P)) == P);
  }
  CHECK_THROWS_AS(reduce_posdef({1, 3, 1}), DomainError);
}

TEST_CASE("class representatives, definite") {
  for (long d : {-3L, -4L, -7L, -8L, -15L, -20L, -23L, -47L, -84L}) {
    auto reps = class_reps(d);
    std::set<QForm> got(reps.begin(), reps.end());
    CHECK(got == reduced_oracle(d));
  }
  CHECK(class_reps(-3) == std::vector<QForm>{{1, 1, 1}});
  CHECK(class_reps(-20) == std::vector<QForm>{{1, 0, 5}, {2, 2, 3}});
  CHECK_THROWS_AS(class_reps(-6), DomainError);
}

TEST_CASE("class representatives, indefinite") {
  auto r5 = class_reps(5);
  REQUIRE(r5.size() == 1);
  CHECK(equivalent(r5[0], {1, 1, -1}));
  for (long D : {5L, 8L, 12L, 13L, 17L, 21L, 24L, 40L}) {
    auto reps = class_reps(D);
    CHECK(static_cast<long>(reps.size()) == class_count_oracle(D));
    for (size_t i = 0; i < reps.size(); ++i)
      for (size_t j = i + 1; j < reps.size(); ++j) CHECK_FALSE(equivalent(reps[i], reps[j]));
  }
  CHECK_THROWS_AS(class_reps(9), SquareDiscriminant);
}

TEST_CASE("automorphs") {
  auto a = automorph({1, 1, -1});
  CHECK(a.t == 3);
  CHECK(a.u == 1);
  CHECK(a.M == Mat2{1, 1, 1, 2});
  CHECK(a.eps == QuadElem(Rat(3, 2), Rat(1, 2), 5));
  auto b = automorph({1, 0, -2});
  CHECK(b.t == 6);
  CHECK(b.u == 2);
  CHECK(b.M == Mat2{3, 4, 2, 3});
  for (long D : {5L, 8L, 12L, 13L, 24L, 29L, 61L}) {
    auto [t, u] = pell4(D);
    auto [to, uo] = pell_oracle(D);
    CHECK(t == to);
    CHECK(u == uo);
    for (const auto& A : class_reps(D)) {
      auto au = automorph(A);
      CHECK(au.M.det() == 1);
      CHECK(act(au.M, A) == A);
      CHECK(au.eps.norm() == 1);
      CHECK(au.eps.value() > 1);
    }
  }
  // imprimitive forms use the primitive part
  CHECK(act(automorph({2, 2, -2}).M, QForm{2, 2, -2}) == QForm{2, 2, -2});
  CHECK_THROWS(automorph({1, 0, -4}));
}

TEST_CASE("geodesic data") {
  set_precision(256);
  Geodesic G = geodesic({1, 1, -1});
  CHECK(boost::multiprecision::abs(G.w + Real("1.6180339887498948482")) < 1e-18);
  CHECK(boost::multiprecision::abs(G.wp - Real("0.6180339887498948482")) < 1e-18);
  const Real tol = pow2(-120);
  for (const QForm A : {QForm{1, 1, -1}, QForm{1, 0, -2}, QForm{1, 2, -2}, QForm{3, 1, -1}, QForm{2, 4, -1}}) {
    Geodesic g = geodesic(A);
    CHECK(g.w < g.wp);
    const auto& s = g.sigma;
    CHECK(boost::multiprecision::abs(s[0] * s[3] - s[1] * s[2] - 1) < tol);
    // sigma^-1 . A is the form A(sigma (x, y)) = [0, -sqrt D, 0]
    auto Aat = [&](const Real& x, const Real& y) { return Real(A.a) * x * x + Real(A.b) * x * y + Real(A.c) * y * y; };
    Real cx2 = Aat(s[0], s[2]);
    Real cy2 = Aat(s[1], s[3]);
    Real cxy = Aat(s[0] + s[1], s[2] + s[3]) - cx2 - cy2;
    CHECK(boost::multiprecision::abs(cx2) < tol);
    CHECK(boost::multiprecision::abs(cy2) < tol);
    CHECK(boost::multiprecision::abs(cxy + boost::multiprecision::sqrt(Real(A.disc()))) < tol);
    // the fixed points of M_A are the endpoints
    const Mat2& M = g.aut.M;
    for (const Real& w : {g.w, g.wp}) {
      Real img = (Real(M.a) * w + Real(M.b)) / (Real(M.c) * w + Real(M.d));
      CHECK(boost::multiprecision::abs(img - w) < tol);
    }
    // points of the parametrization lie on S_A, and one period maps z to M_A z
    for (int i = 0; i < 5; ++i) {
      Real t = uniform_real(-2, 2);
      auto [z, dz] = geodesic_point(g, Complex(t));
      CHECK(abs(Complex(Real(A.a) * norm2(z) + Real(A.b) * z.re + Real(A.c))) < tol);
      auto [z2, dz2] = geodesic_point(g, Complex(t + 2 * g.log_eps));
      Complex Mz = mobius(M, z);
      Complex Minv = mobius(M.inv(), z);
      CHECK(std::min(abs(z2 - Mz), abs(z2 - Minv)) < tol);
      CHECK(abs(geodesic_param(g, z) - Complex(t)) < tol);
    }
  }
  CHECK_THROWS_AS(geodesic({-1, -1, 1}), DomainError);
  CHECK_THROWS_AS(geodesic({1, 0, -4}), SquareDiscriminant);
}

TEST_CASE("CM points") {
  set_precision(256);
  CHECK(abs(cm_point({1, 0, 1}) - i_unit()) < pow2(-250));
  Complex w = cm_point({1, 1, 1});
  CHECK(abs(w - Complex(Real(-0.5), boost::multiprecision::sqrt(Real(3)) / 2)) < pow2(-250));
  for (long d : {-3L, -4L, -20L, -47L})
    for (const auto& Q : class_reps(d)) CHECK(abs(eval_form(Q, cm_point(Q))) < pow2(-248));
  CHECK_THROWS(cm_point({1, 1, -1}));
}
