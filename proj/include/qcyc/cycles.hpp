#pragma once

#include "qcyc/lattice.hpp"
#include "qcyc/maass.hpp"
#include "qcyc/qforms.hpp"
#include "qcyc/qseries.hpp"
#include "qcyc/theta.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcyc {

/// z is (numerically) a pole of the evaluated form.
class PoleError : public std::runtime_error {
 public:
  PoleError(const std::string& what, QForm q) : std::runtime_error(what), form(q) {}
  QForm form;
};

/// Quadrature did not reach its tolerance within the node budget.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reduce z into the standard fundamental domain; returns (g z, g).
std::pair<Complex, Mat2> reduce_point(const Complex& z);

/// Scalar values E4, E6, Delta at z (Im z large enough for the stored expansion).
struct EisensteinValues {
  Complex e4, e6, delta;
};
EisensteinValues eisenstein_values(const Complex& z);

/// f = C sum_{Q in forms, Gamma-orbits} Q(z,1)^{-k}, C = |d|^{k-1/2}/pi, built as G/H with H a product of
/// E4, E6 or E4^3 - j(z_Q) Delta vanishing at the CM points and G in Delta M_{2k+w-12} fixed by the
/// principal parts. Valid when there are no cusp forms of weight 2k (k in {2, 3, 4, 5, 7}).
class FKEvaluator {
 public:
  FKEvaluator(long k, std::vector<QForm> reduced_forms);
  long k() const { return k_; }
  long disc() const { return d_; }
  const std::vector<QForm>& forms() const { return forms_; }
  /// Residual of the principal-part fit.
  const Real& residual() const { return residual_; }
  Complex operator()(const Complex& z) const;

 private:
  struct Factor {
    int kind;  // 0: E6, 1: E4, 2: E4^3 - j Delta
    Complex j;
    QForm form;
  };
  long k_, d_;
  std::vector<QForm> forms_;
  std::vector<Factor> factors_;
  std::vector<std::pair<long, long>> basis_;  // Delta E4^a E6^b
  std::vector<Complex> coef_;
  Real residual_;
  unsigned prec_;
};

/// Shared evaluator for (k, class set) at the current precision.
std::shared_ptr<const FKEvaluator> fk_evaluator(long k, const std::vector<QForm>& reduced_forms);

/// f_{k,d}(z) = (|d|^{k-1/2}/pi) sum_{Q in Q_d, a > 0} Q(z,1)^{-k}.
Complex f_eval(long k, long d, const Complex& z);
/// The same sum restricted to the class of P.
Complex f_class_eval(long k, const QForm& P, const Complex& z);
/// Truncated direct summation over forms with p_Q(z) <= bound; a slow low-accuracy reference.
Complex f_direct(long k, long d, const Complex& z, long bound);

struct PoleInfo {
  Real s;  ///< log parameter on the geodesic, in [0, 2 log eps)
  QForm form;
  long d;
};

/// CM points of discriminant d on one period of S_A (a > 0): Q with (A, Q) = 0, one per Gamma_A-orbit.
std::vector<PoleInfo> pole_scan(const QForm& A, long d);

struct QuadConfig {
  Real tol = Real(0);  ///< 0 selects 2^(-P/3)
  long min_nodes = 16;
  long max_nodes = 1L << 14;
};

struct CycleConfig {
  QuadConfig quad;
  /// integrate through poles on the cycle as a principal value (average of the contours Im s = +-h)
  bool pv = false;
  Int den_bound = 1000000;
  /// relative tolerance for recognizing a rational
  double rel_tol = 1e-12;
};

struct CycleResult {
  Complex value;
  Real error;
  long nodes = 0;
  std::vector<PoleInfo> poles;
  std::string mode;  ///< "real-line", "pv-contour" or "pv-exclusion"
  std::optional<Rat> recognized;
  bool ambiguous = false;
  std::optional<Rat> closed_form;
  bool experimental = false;
};

/// Trapezoid rule for a periodic vector function on [0, L) along Im s = shift, doubling the nodes until
/// successive estimates agree to tol. Returns (values, error, nodes).
struct PeriodicQuad {
  std::vector<Complex> value;
  Real error;
  long nodes = 0;
};
PeriodicQuad periodic_trapezoid(const std::function<std::vector<Complex>(const Complex&)>& f, const Real& L,
                                const Real& shift, const QuadConfig& cfg);

/// C_A(R_0 Theta_L(tau, .)) over one period, components over L'/L. a < 0 is handled as -C_{-A}.
std::map<Key, Complex> cycle_siegel(const QForm& A, const Complex& tau, const Real& theta_tol,
                                    const QuadConfig& cfg = {}, Real* err = nullptr);
/// C_A(Theta*_I(tau, .)), components over I'/I.
std::map<Key, Complex> cycle_theta_I_star(const QForm& A, const Complex& tau, const Real& theta_tol,
                                          const QuadConfig& cfg = {}, Real* err = nullptr);
/// -(4 pi / sqrt D) v^{3/2} (theta_I (x) conj(Theta_{3/2,N}))^L (tau), from exact expansions of the given order.
std::map<Key, Complex> thm32_rhs(const QForm& A, const Complex& tau, const Rat& order);
/// The same from given expansions of theta_I (Hecke) and Theta_{3/2,N}.
std::map<Key, Complex> thm32_rhs(const Split& s, const Complex& tau, const VVQSeries<Rat>& hecke,
                                 const VVQSeries<Rat>& unary);

/// C_A(sum_d coeffs[d] f_{k,d}); k >= 2.
CycleResult cycle_merom(const QForm& A, long k, const std::map<long, Rat>& coeffs, const CycleConfig& cfg = {});
/// C_A(f_{k,P}).
CycleResult cycle_class(const QForm& A, long k, const QForm& P, const CycleConfig& cfg = {});

/// -(4D)^{(k-1)/2} CT(g_{I+N} [theta_I, mock]_{(k-1)/2}); g is indexed by L'/L.
Rat closed_form_thm41(const QForm& A, long k, const VVQSeries<Rat>& g, const MockPart& mock);
/// The same with the Hecke theta and the mock built here (mock at default settings).
Rat closed_form_thm41(const QForm& A, long k, const VVQSeries<Rat>& g);

/// sum over A in class_reps(Dtr) of C_A(f_{k,P}).
CycleResult trace_cycle(long Dtr, long k, const QForm& P, const CycleConfig& cfg = {});

/// Symmetric exclusion (s* - delta, s* + delta) around each pole, fitted in delta to remove the divergent
/// odd powers; experimental. Empty deltas picks min(gap/8, theta/4) * 2^-j, j < k/2 + 8.
CycleResult pv_cycle(const QForm& A, long k, const std::map<long, Rat>& coeffs, const std::vector<Real>& deltas,
                     const CycleConfig& cfg = {});

/// Nodes and weights of n-point Gauss-Legendre on [-1, 1] at the current precision.
std::pair<std::vector<Real>, std::vector<Real>> gauss_legendre(long n);

/// Coefficients a_g(d) for d < 0 with nonzero value, as a map d -> a_g(d).
std::map<long, Rat> principal_coefficients(const VVQSeries<Rat>& g);

}  // namespace qcyc
