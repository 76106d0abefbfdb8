#include "qcyc/lattice.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

namespace qcyc {

Vec3 vec(const QForm& Q) { return {Rat(Q.a), Rat(Q.b), Rat(Q.c)}; }
Vec3 vec(long a, long b, long c) { return {Rat(a), Rat(b), Rat(c)}; }
RVec3 to_real(const Vec3& X) { return {to_real(X[0]), to_real(X[1]), to_real(X[2])}; }

Vec3 operator+(const Vec3& X, const Vec3& Y) { return {X[0] + Y[0], X[1] + Y[1], X[2] + Y[2]}; }
Vec3 operator-(const Vec3& X, const Vec3& Y) { return {X[0] - Y[0], X[1] - Y[1], X[2] - Y[2]}; }
Vec3 operator*(const Rat& s, const Vec3& X) { return {s * X[0], s * X[1], s * X[2]}; }

Rat q(const Vec3& X) { return X[0] * X[2] - X[1] * X[1] / 4; }
Real q(const RVec3& X) { return X[0] * X[2] - X[1] * X[1] / 4; }

Rat bilinear(const Vec3& X, const Vec3& Y) { return X[0] * Y[2] + Y[0] * X[2] - X[1] * Y[1] / 2; }
Real bilinear(const RVec3& X, const RVec3& Y) { return X[0] * Y[2] + Y[0] * X[2] - X[1] * Y[1] / 2; }

bool in_Ldual(const Vec3& X) {
  return X[0].get_den() == 1 && X[1].get_den() == 1 && X[2].get_den() == 1;
}

bool in_L(const Vec3& X) { return in_Ldual(X) && mpz_even_p(X[1].get_num_mpz_t()); }

namespace {
template <class T, class Arr>
Arr act_impl(const Mat2& g, const Arr& X) {
  // matrix model [[b/2, c], [-a, -b/2]]
  const T x00 = X[1] / 2, x01 = X[2], x10 = -X[0], x11 = -X[1] / 2;
  const T ga(g.a), gb(g.b), gc(g.c), gd(g.d);
  const Mat2 h = g.inv();
  const T ha(h.a), hb(h.b), hc(h.c), hd(h.d);
  const T m00 = ga * x00 + gb * x10, m01 = ga * x01 + gb * x11;
  const T m10 = gc * x00 + gd * x10, m11 = gc * x01 + gd * x11;
  const T y00 = m00 * ha + m01 * hc, y01 = m00 * hb + m01 * hd, y10 = m10 * ha + m11 * hc;
  return {-y10, 2 * y00, y01};
}
}  // namespace

Vec3 act(const Mat2& g, const Vec3& X) {
  if (g.det() != 1) throw DomainError("act: determinant must be 1");
  return act_impl<Rat, Vec3>(g, X);
}

RVec3 act(const Mat2& g, const RVec3& X) {
  if (g.det() != 1) throw DomainError("act: determinant must be 1");
  return act_impl<Real, RVec3>(g, X);
}

Frame frame(const Complex& z) {
  if (!(z.im > 0)) throw DomainError("frame: Im z must be positive");
  const Real& x = z.re;
  const Real& y = z.im;
  const Real s = 1 / (boost::multiprecision::sqrt(Real(2)) * y);
  Frame f;
  f.z = z;
  f.X = {s, -2 * x * s, (x * x + y * y) * s};
  f.U1 = {-s, 2 * x * s, (y * y - x * x) * s};
  f.U2 = {Real(0), 2 * y * s, -2 * x * y * s};
  return f;
}

Complex polyQ(const RVec3& X, const Complex& z) { return Complex(X[0]) * z * z + Complex(X[1]) * z + Complex(X[2]); }

Real polyP(const RVec3& X, const Complex& z) {
  return (X[0] * norm2(z) + X[1] * z.re + X[2]) / z.im;
}

Real majorant(const RVec3& X, const Complex& z) {
  Real p = polyP(X, z);
  return p * p / 4 + norm2(polyQ(X, z)) / (4 * z.im * z.im);
}

std::array<std::array<double, 3>, 3> majorant_matrix(const Complex& z) {
  const double x = static_cast<double>(z.re), y = static_cast<double>(z.im);
  const double l1[3] = {(x * x + y * y) / y, x / y, 1 / y};
  const double lr[3] = {x * x - y * y, x, 1};
  const double li[3] = {2 * x * y, y, 0};
  std::array<std::array<double, 3>, 3> S{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      S[i][j] = l1[i] * l1[j] / 4 + (lr[i] * lr[j] + li[i] * li[j]) / (4 * y * y);
  return S;
}

namespace {

Rat det_rat(RatMatrix m) {
  const size_t n = m.size();
  Rat det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      Rat f = m[r][c] / m[c][c];
      for (size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

RatMatrix inverse_rat(RatMatrix m) {
  const size_t n = m.size();
  RatMatrix inv(n, std::vector<Rat>(n, Rat(0)));
  for (size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) throw DomainError("singular Gram matrix");
    std::swap(m[p], m[c]);
    std::swap(inv[p], inv[c]);
    Rat piv = m[c][c];
    for (size_t k = 0; k < n; ++k) {
      m[c][k] /= piv;
      inv[c][k] /= piv;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      Rat f = m[r][c];
      for (size_t k = 0; k < n; ++k) {
        m[r][k] -= f * m[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

bool integral(const Rat& x) { return x.get_den() == 1; }

}  // namespace

Sublattice::Sublattice(std::vector<Vec3> basis) : basis_(std::move(basis)) {
  const int r = rank();
  if (r < 1 || r > 3) throw DomainError("Sublattice: rank must be 1, 2 or 3");
  gram_.assign(r, std::vector<Rat>(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) gram_[i][j] = bilinear(basis_[i], basis_[j]);
  det_ = det_rat(gram_);
  if (det_ == 0) throw DomainError("Sublattice: degenerate Gram matrix");
  gram_inv_ = inverse_rat(gram_);
  dual_.assign(r, Vec3{Rat(0), Rat(0), Rat(0)});
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) dual_[i] = dual_[i] + gram_inv_[i][j] * basis_[j];

  Eigen::MatrixXd G(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) G(i, j) = gram_[i][j].get_d();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  for (int i = 0; i < r; ++i) (es.eigenvalues()(i) > 0 ? sig_.first : sig_.second)++;

  std::set<Key> seen;
  std::deque<Vec3> todo;
  Vec3 zero{Rat(0), Rat(0), Rat(0)};
  seen.insert(key(zero));
  todo.push_back(zero);
  while (!todo.empty()) {
    Vec3 X = todo.front();
    todo.pop_front();
    for (const auto& d : dual_) {
      Vec3 Y = rep(key(X + d));
      if (seen.insert(key(Y)).second) todo.push_back(Y);
    }
  }
  group_.assign(seen.begin(), seen.end());
}

std::vector<Rat> Sublattice::coords(const Vec3& X) const {
  std::vector<Rat> x(rank());
  Vec3 back{Rat(0), Rat(0), Rat(0)};
  for (int i = 0; i < rank(); ++i) {
    x[i] = bilinear(X, dual_[i]);
    back = back + x[i] * basis_[i];
  }
  if (back != X) return {};
  return x;
}

bool Sublattice::in_span(const Vec3& X) const { return !coords(X).empty(); }

bool Sublattice::contains(const Vec3& X) const {
  auto x = coords(X);
  if (x.empty()) return false;
  return std::all_of(x.begin(), x.end(), integral);
}

bool Sublattice::in_dual(const Vec3& X) const {
  if (!in_span(X)) return false;
  return std::all_of(basis_.begin(), basis_.end(), [&](const Vec3& b) { return integral(bilinear(X, b)); });
}

Key Sublattice::key(const Vec3& X) const {
  auto x = coords(X);
  if (x.empty()) throw DomainError("Sublattice::key: vector outside the rational span");
  for (auto& t : x) t = frac(t);
  return x;
}

Vec3 Sublattice::rep(const Key& k) const {
  if (static_cast<int>(k.size()) != rank()) throw DomainError("Sublattice::rep: key of wrong length");
  Vec3 X{Rat(0), Rat(0), Rat(0)};
  for (int i = 0; i < rank(); ++i) X = X + k[i] * basis_[i];
  return X;
}

Rat Sublattice::q_mod1(const Key& k) const { return frac(q(rep(k))); }

bool Sublattice::is_sublattice_of(const Sublattice& L) const {
  return std::all_of(basis_.begin(), basis_.end(), [&](const Vec3& b) { return L.contains(b); });
}

const Sublattice& lattice_L() {
  static const Sublattice L({vec(1, 0, 0), vec(0, 2, 0), vec(0, 0, 1)});
  return L;
}

std::vector<std::array<Int, 3>> integer_kernel(const std::array<Int, 3>& v) {
  std::array<Int, 3> w = v;
  std::array<std::array<Int, 3>, 3> U{};  // columns
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) U[i][j] = (i == j) ? 1 : 0;
  if (w[0] == 0 && w[1] == 0 && w[2] == 0) throw DomainError("integer_kernel: zero vector");
  for (;;) {
    int piv = -1;
    for (int i = 0; i < 3; ++i)
      if (w[i] != 0 && (piv < 0 || abs(w[i]) < abs(w[piv]))) piv = i;
    bool done = true;
    for (int j = 0; j < 3; ++j) {
      if (j == piv || w[j] == 0) continue;
      Int qt;
      mpz_fdiv_q(qt.get_mpz_t(), w[j].get_mpz_t(), w[piv].get_mpz_t());
      w[j] -= qt * w[piv];
      for (int i = 0; i < 3; ++i) U[j][i] -= qt * U[piv][i];
      if (w[j] != 0) done = false;
    }
    if (done) {
      std::vector<std::array<Int, 3>> out;
      for (int j = 0; j < 3; ++j)
        if (j != piv) out.push_back(U[j]);
      // Lagrange reduction in the Euclidean norm for small coordinates
      auto dot = [](const std::array<Int, 3>& a, const std::array<Int, 3>& b) -> Int {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
      };
      for (int it = 0; it < 1000; ++it) {
        if (dot(out[1], out[1]) < dot(out[0], out[0])) std::swap(out[0], out[1]);
        Rat mu = rat(dot(out[0], out[1]), dot(out[0], out[0]));
        Int r = floor_rat(mu + Rat(1, 2));
        if (r == 0) break;
        for (int i = 0; i < 3; ++i) out[1][i] -= r * out[0][i];
      }
      return out;
    }
  }
}

std::vector<Vec3> coset_reps(const std::vector<Vec3>& generators, const Sublattice& small) {
  std::set<Key> seen;
  std::vector<Vec3> reps;
  std::deque<Vec3> todo;
  Vec3 zero{Rat(0), Rat(0), Rat(0)};
  seen.insert(small.key(zero));
  reps.push_back(zero);
  todo.push_back(zero);
  while (!todo.empty()) {
    Vec3 X = todo.front();
    todo.pop_front();
    for (const auto& g : generators) {
      Vec3 Y = X + g;
      if (seen.insert(small.key(Y)).second) {
        reps.push_back(Y);
        todo.push_back(Y);
      }
    }
    if (reps.size() > 1000000) throw std::runtime_error("coset_reps: index too large");
  }
  return reps;
}

std::pair<Vec3, Vec3> Split::decompose(const Vec3& X) const {
  Vec3 W = (bilinear(X, Avec) / bilinear(Avec, Avec)) * Avec;
  return {X - W, W};
}

Key Split::join(const Key& kI, const Key& kN) const {
  Key k = kI;
  k.insert(k.end(), kN.begin(), kN.end());
  return k;
}

Split split(const QForm& A) {
  const long D = A.disc();
  if (D <= 0) throw DomainError("split: A must be indefinite");
  if (is_square(Int(D))) throw SquareDiscriminant("split: I is isotropic for square discriminant " + std::to_string(D));
  Split s;
  s.A = A;
  s.Avec = vec(A);
  s.D = D;
  // (X, A) = alpha c - beta b + gamma a for X = (alpha, 2 beta, gamma)
  std::array<Int, 3> v{Int(A.c), Int(-A.b), Int(A.a)};
  Int g;
  mpz_gcd(g.get_mpz_t(), Int(std::gcd(A.a, A.b)).get_mpz_t(), Int(A.c).get_mpz_t());
  for (auto& t : v) t /= g;
  std::vector<Vec3> Ib;
  for (const auto& k : integer_kernel(v)) Ib.push_back({Rat(k[0]), Rat(2 * k[1]), Rat(k[2])});
  s.I = Sublattice(Ib);
  QForm A0 = A.primitive();
  s.n0 = (A0.b % 2 == 0) ? vec(A0) : vec(2 * A0.a, 2 * A0.b, 2 * A0.c);
  s.m = -q(s.n0);
  s.N = Sublattice({s.n0});
  std::vector<Vec3> Mb = Ib;
  Mb.push_back(s.n0);
  s.M = Sublattice(Mb);
  s.cosets = coset_reps(lattice_L().basis(), s.M);
  s.index = static_cast<long>(s.cosets.size());
  Rat ratio = s.M.det() / lattice_L().det();
  if (Rat(s.index * s.index) != ratio) throw std::logic_error("split: coset count disagrees with Gram determinants");
  s.ldual_reps = coset_reps({vec(1, 0, 0), vec(0, 1, 0), vec(0, 0, 1)}, s.M);
  return s;
}

RVec3 y0_vector(const QForm& A) {
  const long D = A.disc();
  if (D <= 0 || is_square(Int(D))) throw DomainError("y0_vector: positive nonsquare discriminant required");
  if (A.a <= 0) throw DomainError("y0_vector: a must be positive");
  Real w = (-Real(A.b) - boost::multiprecision::sqrt(Real(D))) / (2 * Real(A.a));
  return {Real(1), -2 * w, w * w};
}

}  // namespace qcyc
