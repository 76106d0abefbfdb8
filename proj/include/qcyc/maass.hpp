#pragma once

#include "qcyc/lattice.hpp"
#include "qcyc/qseries.hpp"

#include <functional>
#include <map>
#include <vector>

namespace qcyc {

struct MockConfig {
  /// exponents below this are unknowns
  long order = 40;
  /// principal-part slots lie in (-principal_depth, 0)
  long principal_depth = 1;
  /// sample points on the arc |tau| = 1; 0 picks about 3x oversampling
  long points = 0;
  Int den_bound = 1000000;
};

/// Holomorphic part of a harmonic Maass form F of weight 1/2 for rho_N with xi F = scale * shadow.
struct MockPart {
  /// reconstructed rationals, complete below holo.order (at most config.order / 2)
  VVQSeries<Rat> holo;
  /// the floating solution, complete below config.order
  VVQSeries<Real> holo_numeric;
  /// Theta_{3/2,N}, long enough to evaluate the completion at Im tau >= 1/2
  VVQSeries<Rat> shadow;
  Real scale;
  /// max |equation residual| of the floating solve and with the rationals substituted
  Real residual, exact_residual;
  Int den_bound_used;
  long points = 0, columns = 0, dropped = 0;
  MockConfig config;
  /// coefficients that failed reconstruction: (component, exponent)
  std::vector<std::pair<Key, Rat>> unrecognized;
};

/// F(tau) = holo(tau) + F^-(tau) with F^- = sum -conj(scale b(n)) (4 pi n)^{-1/2} Gamma(1/2, 4 pi n v) q^{-n}.
std::map<Key, Complex> completion_eval(const VVQSeries<Real>& holo, const VVQSeries<Rat>& shadow, const Real& scale,
                                       const Complex& tau);
std::map<Key, Complex> completion_eval(const MockPart& mp, const Complex& tau);

using VVFunction = std::function<std::map<Key, Complex>(const Complex&)>;

/// xi_k F = 2 i v^k conj(d F / d tau-bar) by central differences with step h.
std::map<Key, Complex> xi_numeric(const VVFunction& F, const Rat& weight, const Complex& tau, const Real& h);
/// Delta_k F = -v^2 (F_xx + F_yy) + i k v (F_x + i F_y) by central differences with step h.
std::map<Key, Complex> laplacian_numeric(const VVFunction& F, const Rat& weight, const Complex& tau, const Real& h);

/// Solve for the holomorphic part of a weight-1/2 preimage of D^{-1/2} Theta_{3/2,N}.
MockPart solve_mock(const Split& s, const MockConfig& cfg = {});

/// max over components and sample points of |F(-1/tau) - sqrt(tau) rho_N(S) F(tau)| for F = holo + F^-.
Real modularity_residual(const VVQSeries<Real>& holo, const MockPart& mp, const std::vector<Complex>& taus);

/// A weakly holomorphic odd form of weight 1/2 for rho_N with coefficient 1 at (component j, exponent e < 0),
/// zero on the slots deeper than e, and rational coefficients. Throws if no such form is found.
VVQSeries<Rat> odd_weakly_holomorphic(const Split& s, long j, const Rat& e, const MockConfig& cfg = {});

/// Sample points on |tau| = 1 with argument in [pi/6, 5 pi/6].
std::vector<Complex> arc_points(long n);

}  // namespace qcyc
