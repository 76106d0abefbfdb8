#pragma once

#include "qcyc/numerics.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcyc {

/// Integer 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  long a = 1, b = 0, c = 0, d = 1;

  long det() const { return a * d - b * c; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  /// Inverse of a determinant-one matrix.
  Mat2 inv() const { return {d, -b, -c, a}; }
  bool operator==(const Mat2& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
};

Mat2 mat_T(long n = 1);
Mat2 mat_S();

/// The form [a,b,c] = a x^2 + b x y + c y^2.
struct QForm {
  long a = 0, b = 0, c = 0;

  long disc() const { return b * b - 4 * a * c; }
  bool posdef() const { return disc() < 0 && a > 0; }
  long content() const;
  QForm primitive() const;
  QForm operator-() const { return {-a, -b, -c}; }
  bool operator==(const QForm& o) const { return a == o.a && b == o.b && c == o.c; }
  bool operator<(const QForm& o) const {
    return a != o.a ? a < o.a : (b != o.b ? b < o.b : c < o.c);
  }
  std::string str() const;
};

/// Raised for inputs outside an operation's domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for square discriminants, which have infinite geodesics.
class SquareDiscriminant : public DomainError {
 public:
  using DomainError::DomainError;
};

bool valid_disc(long d);

/// g.Q, the form Q o g^{-1}; in the matrix model X -> g X g^{-1}.
QForm act(const Mat2& g, const QForm& Q);

struct Reduced {
  QForm form;
  /// act(transform, input) == form
  Mat2 transform;
};

/// Gauss reduction of a positive definite form.
Reduced reduce_posdef(const QForm& Q);
bool is_reduced_posdef(const QForm& Q);

/// Reduction step for indefinite forms; returns rho(Q) and the matrix g with act(g, Q) = rho(Q).
std::pair<QForm, Mat2> rho_step(const QForm& Q);
bool is_reduced_indef(const QForm& Q);
/// The reduction cycle containing a reduced indefinite form.
std::vector<QForm> reduced_cycle(const QForm& Q);
/// Reduce an indefinite form; returns a reduced equivalent form and the transform.
Reduced reduce_indef(const QForm& Q);

/// One representative per class; positive definite forms for d < 0 (including imprimitive ones).
std::vector<QForm> class_reps(long d);

/// Whether two forms of the same nonsquare discriminant are properly equivalent.
bool equivalent(const QForm& P, const QForm& Q);

struct Automorph {
  Mat2 M;      ///< generator of the stabilizer
  Int t, u;    ///< minimal t^2 - D0 u^2 = 4 for the primitive part
  QuadElem eps;  ///< (t + u sqrt(D0)) / 2, expressed over sqrt(D)
};

/// Minimal positive solution (t, u) of t^2 - D u^2 = 4.
std::pair<Int, Int> pell4(long D);
Automorph automorph(const QForm& A);

struct Geodesic {
  QForm A;
  long D = 0;
  Real w, wp;
  /// sigma = s0 [[w', w], [1, 1]]
  std::array<Real, 4> sigma;
  Automorph aut;
  /// log of eps; one period of the geodesic in the parameter log t is 2 log eps.
  Real log_eps;
};

Geodesic geodesic(const QForm& A);
/// sigma(i t) for t = e^s with complex s, and its derivative in s.
std::pair<Complex, Complex> geodesic_point(const Geodesic& G, const Complex& s);
/// Preimage of z under sigma, as a complex log parameter s with sigma(i e^s) = z.
Complex geodesic_param(const Geodesic& G, const Complex& z);

/// Root of Q(z, 1) in the upper half-plane.
Complex cm_point(const QForm& Q);

Complex mobius(const Mat2& g, const Complex& z);
/// Q(z, 1)
Complex eval_form(const QForm& Q, const Complex& z);

}  // namespace qcyc
