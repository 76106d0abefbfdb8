#pragma once

#include "qcyc/lattice.hpp"
#include "qcyc/qforms.hpp"
#include "qcyc/qseries.hpp"

#include <map>
#include <vector>

namespace qcyc {

/// Componentwise value of a theta function with a bound on the discarded tail.
struct ThetaValue {
  std::map<Key, Complex> comp;
  Real tail_bound;
  long terms = 0;
};

/// Integer vectors x with x^T G x <= R (G positive definite, double precision).
std::vector<std::vector<long>> short_vectors(const std::vector<std::vector<double>>& G, double R);

/// Theta_M(tau, z) = v sum_{X in M'} e(q(X_z) tau + q(X_{z perp}) conj(tau)) e_X.
ThetaValue siegel_eval(const Complex& tau, const Complex& z, const Real& tol, const Sublattice& M = lattice_L());
/// R_0 Theta_M = 2 pi v^2 sum p_X(z) y^-2 conj(Q_X(z)) e(...) e_X.
ThetaValue raised_siegel_eval(const Complex& tau, const Complex& z, const Real& tol,
                              const Sublattice& M = lattice_L());

/// v^{3/2} sum_{Y in I'} p_Y y^-2 conj(Q_Y) e(...) e_Y for z on S_A.
ThetaValue theta_I_star_eval(const Split& s, const Complex& tau, const Complex& z, const Real& tol);
/// v^{1/2} sum_{Y in I'} p_Y e(...) e_Y for z on S_A.
ThetaValue theta_I_eval(const Split& s, const Complex& tau, const Complex& z, const Real& tol);

/// Sum_{W in N'} (W, A) e(-q(W) tau) e_W (weight 3/2) or sum e(-q(W) tau) e_W (weight 1/2).
/// twice_weight is 3 or 1.
VVQSeries<Rat> unary_theta_series(const Split& s, int twice_weight, const Rat& order);

struct WindowVector {
  Vec3 Y;
  QuadElem lambda;
  Rat qY;
};

/// lambda(Y) = (a / sqrt D)(alpha w^2 + beta w + gamma) in Q(sqrt D).
QuadElem lambda_of(const QForm& A, const Vec3& Y);

/// Vectors Y of the lattice spanned by `basis` (inside A-perp) with 0 < q(Y) <= qmax and
/// eps^e <= |lambda / lambda'| < eps^(e+4), e = window_start.
std::vector<WindowVector> windowed_vectors(const std::vector<Vec3>& basis, const QForm& A, const Rat& qmax,
                                           long window_start);

/// Hecke theta series sum_{Y in Gamma_I \ I', q(Y) > 0} sgn(Y, Y0) e(q(Y) tau) e_Y, exponents < order.
VVQSeries<Rat> hecke_theta_series(const Split& s, const Rat& order, long window_start = 0);

}  // namespace qcyc
