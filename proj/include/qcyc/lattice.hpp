#pragma once

#include "qcyc/numerics.hpp"
#include "qcyc/qforms.hpp"

#include <array>
#include <map>
#include <vector>

namespace qcyc {

/// A vector of V(Q) written as the form triple (a, b, c), i.e. the matrix [[b/2, c], [-a, -b/2]].
/// L' is the set of integral triples and L the integral triples with b even.
using Vec3 = std::array<Rat, 3>;
using RVec3 = std::array<Real, 3>;
/// Component index of a discriminant group: coordinates in a lattice basis, reduced mod 1.
using Key = std::vector<Rat>;

Vec3 vec(const QForm& Q);
Vec3 vec(long a, long b, long c);
RVec3 to_real(const Vec3& X);

Vec3 operator+(const Vec3& X, const Vec3& Y);
Vec3 operator-(const Vec3& X, const Vec3& Y);
Vec3 operator*(const Rat& s, const Vec3& X);

/// q(X) = det X = ac - b^2/4
Rat q(const Vec3& X);
Real q(const RVec3& X);
/// (X, Y) = q(X + Y) - q(X) - q(Y)
Rat bilinear(const Vec3& X, const Vec3& Y);
Real bilinear(const RVec3& X, const RVec3& Y);

bool in_L(const Vec3& X);
bool in_Ldual(const Vec3& X);

/// g.X = g X g^{-1}
Vec3 act(const Mat2& g, const Vec3& X);
RVec3 act(const Mat2& g, const RVec3& X);

struct Frame {
  Complex z;
  RVec3 X, U1, U2;
};

/// X(z), U1(z), U2(z); throws DomainError unless Im z > 0.
Frame frame(const Complex& z);

/// Q_X(z) = a z^2 + b z + c
Complex polyQ(const RVec3& X, const Complex& z);
/// p_X(z) = (a|z|^2 + b x + c) / y
Real polyP(const RVec3& X, const Complex& z);
/// q(X_z) - q(X_{z perp}) = p^2/4 + |Q|^2/(4 y^2)
Real majorant(const RVec3& X, const Complex& z);
/// Symmetric matrix S with majorant(X, z) = X^T S X in (a, b, c) coordinates.
std::array<std::array<double, 3>, 3> majorant_matrix(const Complex& z);

using RatMatrix = std::vector<std::vector<Rat>>;

/// A lattice of rank r <= 3 spanned by rational triples.
class Sublattice {
 public:
  Sublattice() = default;
  explicit Sublattice(std::vector<Vec3> basis);

  int rank() const { return static_cast<int>(basis_.size()); }
  const std::vector<Vec3>& basis() const { return basis_; }
  const std::vector<Vec3>& dual_basis() const { return dual_; }
  const RatMatrix& gram() const { return gram_; }
  const Rat& det() const { return det_; }
  /// (positive, negative) inertia of the Gram matrix.
  std::pair<int, int> signature() const { return sig_; }

  /// Coordinates of X in the basis; empty if X is not in the rational span.
  std::vector<Rat> coords(const Vec3& X) const;
  bool in_span(const Vec3& X) const;
  bool contains(const Vec3& X) const;
  bool in_dual(const Vec3& X) const;
  /// Class of X in M'/M; X must lie in the dual.
  Key key(const Vec3& X) const;
  /// The representative sum key_i b_i.
  Vec3 rep(const Key& k) const;
  /// q of a class, modulo 1.
  Rat q_mod1(const Key& k) const;
  /// All elements of M'/M in a fixed order.
  const std::vector<Key>& disc_group() const { return group_; }
  bool is_sublattice_of(const Sublattice& L) const;

 private:
  std::vector<Vec3> basis_, dual_;
  RatMatrix gram_, gram_inv_;
  Rat det_;
  std::pair<int, int> sig_{0, 0};
  std::vector<Key> group_;
  // rows of a left inverse of the basis matrix, used by coords()
  std::vector<Vec3> left_inv_;
  std::vector<int> pivots_;
};

/// The lattice L of integral triples with even middle coefficient.
const Sublattice& lattice_L();

/// Integral basis of the kernel of v.x = 0 in Z^3 (v a nonzero integer vector).
std::vector<std::array<Int, 3>> integer_kernel(const std::array<Int, 3>& v);

/// Coset representatives of big/small by breadth-first closure over the generators.
std::vector<Vec3> coset_reps(const std::vector<Vec3>& generators, const Sublattice& small);

struct Split {
  QForm A;
  Vec3 Avec;
  long D = 0;
  Sublattice I, N;
  /// I + N with the basis of I followed by the generator of N.
  Sublattice M;
  /// generator n0 of N and m = -q(n0)
  Vec3 n0;
  Rat m;
  /// coset representatives of L / (I + N)
  std::vector<Vec3> cosets;
  long index = 0;
  /// representatives of L' / (I + N) inside (I + N)'/(I + N)
  std::vector<Vec3> ldual_reps;

  /// Decompose X in M' as Y + W with Y in I', W in N'.
  std::pair<Vec3, Vec3> decompose(const Vec3& X) const;
  Key join(const Key& kI, const Key& kN) const;
};

/// I = L cap (QA)^perp, N = L cap QA and the coset data of L / (I + N).
Split split(const QForm& A);

/// Y0 = [[-w, w^2], [-1, w]] as a real triple.
RVec3 y0_vector(const QForm& A);

/// (f_M)_gamma = f_gamma if gamma lies in L'/M, else 0 (omitted).
template <class T>
std::map<Key, T> down_map(const std::map<Key, T>& f, const Sublattice& L, const Sublattice& M) {
  if (!M.is_sublattice_of(L)) throw DomainError("down_map: M is not a sublattice of L");
  std::map<Key, T> out;
  for (const auto& g : M.disc_group()) {
    Vec3 X = M.rep(g);
    if (!L.in_dual(X)) continue;
    auto it = f.find(L.key(X));
    if (it != f.end()) out.emplace(g, it->second);
  }
  return out;
}

/// (g^L)_gamma = sum over beta in L/M of g_{beta + gamma}.
template <class T>
std::map<Key, T> up_map(const std::map<Key, T>& g, const Sublattice& L, const Sublattice& M) {
  if (!M.is_sublattice_of(L)) throw DomainError("up_map: M is not a sublattice of L");
  std::vector<Vec3> gens = L.basis();
  auto reps = coset_reps(gens, M);
  std::map<Key, T> out;
  for (const auto& gamma : L.disc_group()) {
    Vec3 X = L.rep(gamma);
    bool any = false;
    T acc{};
    for (const auto& beta : reps) {
      auto it = g.find(M.key(X + beta));
      if (it == g.end()) continue;
      if (!any) {
        acc = it->second;
        any = true;
      } else {
        acc += it->second;
      }
    }
    if (any) out.emplace(gamma, acc);
  }
  return out;
}

}  // namespace qcyc
