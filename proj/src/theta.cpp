#include "qcyc/theta.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>

namespace qcyc {

std::vector<std::vector<long>> short_vectors(const std::vector<std::vector<double>>& G, double R) {
  const int n = static_cast<int>(G.size());
  std::vector<std::vector<double>> qm(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    double s = G[i][i];
    for (int k = 0; k < i; ++k) s -= qm[k][k] * qm[k][i] * qm[k][i];
    if (!(s > 0)) throw DomainError("short_vectors: matrix is not positive definite");
    qm[i][i] = s;
    for (int j = i + 1; j < n; ++j) {
      double t = G[i][j];
      for (int k = 0; k < i; ++k) t -= qm[k][k] * qm[k][i] * qm[k][j];
      qm[i][j] = t / s;
    }
  }
  std::vector<std::vector<long>> out;
  std::vector<long> x(n, 0);
  std::function<void(int, double)> rec = [&](int i, double budget) {
    double c = 0;
    for (int j = i + 1; j < n; ++j) c -= qm[i][j] * x[j];
    double r = std::sqrt(std::max(0.0, budget) / qm[i][i]);
    long lo = static_cast<long>(std::ceil(c - r - 1e-9)), hi = static_cast<long>(std::floor(c + r + 1e-9));
    for (long t = lo; t <= hi; ++t) {
      x[i] = t;
      double d = t - c;
      double rem = budget - qm[i][i] * d * d;
      if (rem < -1e-9 * (1 + R)) continue;
      if (i == 0)
        out.push_back(x);
      else
        rec(i - 1, rem);
    }
    x[i] = 0;
  };
  rec(n - 1, R);
  return out;
}

namespace {

enum class Kind { Plain, Raised, IStar, IPlain };

struct Prepared {
  std::vector<RVec3> dual;
  std::vector<std::vector<double>> G;
  std::vector<double> ginv_diag;
};

Prepared prepare(const Sublattice& M, const Complex& z) {
  Prepared p;
  const int r = M.rank();
  for (const auto& d : M.dual_basis()) p.dual.push_back(to_real(d));
  auto S = majorant_matrix(z);
  p.G.assign(r, std::vector<double>(r, 0.0));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      double acc = 0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          acc += M.dual_basis()[i][a].get_d() * S[a][b] * M.dual_basis()[j][b].get_d();
      p.G[i][j] = acc;
    }
  Eigen::MatrixXd E(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) E(i, j) = p.G[i][j];
  Eigen::MatrixXd Ei = E.inverse();
  for (int i = 0; i < r; ++i) p.ginv_diag.push_back(Ei(i, i));
  return p;
}

// weight bound as a function of the majorant value m
double weight_bound(Kind kind, double v, double y, double m) {
  switch (kind) {
    case Kind::Plain:
      return v;
    case Kind::Raised:
      return 2 * M_PI * v * v * 4 * m / y;
    case Kind::IStar:
      return std::pow(v, 1.5) * 4 * m / y;
    case Kind::IPlain:
      return std::sqrt(v) * 2 * std::sqrt(m);
  }
  return 1;
}

double count_bound(const Prepared& p, double r) {
  double n = 1;
  for (double g : p.ginv_diag) n *= 2 * std::sqrt(r * g) + 1;
  return n;
}

// sum over k >= 0 of N(R+k+1) wb(R+k+1) exp(-2 pi v (R+k)), in log scale
double log_tail(const Prepared& p, Kind kind, double v, double y, double R) {
  double acc = 0;
  double lead = -2 * M_PI * v * R;
  for (int k = 0; k < 100000; ++k) {
    double r = R + k + 1;
    double t = count_bound(p, r) * weight_bound(kind, v, y, r) * std::exp(-2 * M_PI * v * k);
    acc += t;
    if (t < 1e-20 * acc) break;
  }
  return std::log(acc) + lead;
}

ThetaValue lattice_sum(const Sublattice& M, Kind kind, const Complex& tau, const Complex& z, const Real& tol) {
  if (!(tau.im > 0)) throw DomainError("theta: Im tau must be positive");
  if (!(z.im > 0)) throw DomainError("theta: Im z must be positive");
  const double v = static_cast<double>(tau.im), y = static_cast<double>(z.im);
  Prepared p = prepare(M, z);
  const double ltol = static_cast<double>(boost::multiprecision::log(tol));
  if (!std::isfinite(ltol)) throw DomainError("theta: tolerance must be positive");
  double R = std::max(1.0, -ltol / (2 * M_PI * v));
  for (int it = 0; it < 200 && log_tail(p, kind, v, y, R) > ltol - std::log(2.0); ++it) R *= 1.1;
  const double lt = log_tail(p, kind, v, y, R);
  if (lt > ltol) throw std::runtime_error("theta: tolerance unreachable");
  auto pts = short_vectors(p.G, R * (1 + 1e-12) + 1e-12);

  ThetaValue out;
  out.tail_bound = boost::multiprecision::exp(Real(lt));
  const Real twopi = 2 * pi();
  const Real vv = tau.im, uu = tau.re;
  const bool trig = uu != 0;
  Real pre;
  switch (kind) {
    case Kind::Plain:
      pre = vv;
      break;
    case Kind::Raised:
      pre = twopi * vv * vv;
      break;
    case Kind::IStar:
      pre = vv * boost::multiprecision::sqrt(vv);
      break;
    case Kind::IPlain:
      pre = boost::multiprecision::sqrt(vv);
      break;
  }
  const Real y2 = z.im * z.im;
  for (const auto& x : pts) {
    RVec3 X{Real(0), Real(0), Real(0)};
    Vec3 Xr{Rat(0), Rat(0), Rat(0)};
    bool zero = true;
    for (int i = 0; i < M.rank(); ++i) {
      if (x[i] == 0) continue;
      zero = false;
      for (int a = 0; a < 3; ++a) X[a] += x[i] * p.dual[i][a];
      Xr = Xr + Rat(x[i]) * M.dual_basis()[i];
    }
    if (zero && kind != Kind::Plain) continue;
    const Real pX = polyP(X, z);
    const Complex QX = polyQ(X, z);
    const Real maj = pX * pX / 4 + norm2(QX) / (4 * y2);
    Complex term(boost::multiprecision::exp(-twopi * vv * maj));
    if (trig) term *= expi2pi(uu * to_real(q(Xr)));
    switch (kind) {
      case Kind::Plain:
        break;
      case Kind::Raised:
      case Kind::IStar:
        term *= Complex(pX / y2) * conj(QX);
        break;
      case Kind::IPlain:
        term *= pX;
        break;
    }
    out.comp[M.key(Xr)] += term;
    ++out.terms;
  }
  for (auto& [k, c] : out.comp) c *= pre;
  for (const auto& g : M.disc_group()) out.comp[g];
  return out;
}

void require_on_geodesic(const Split& s, const Complex& z) {
  Real pA = polyP(to_real(s.Avec), z);
  if (boost::multiprecision::abs(pA) > pow2(-static_cast<long>(precision_bits()) / 3))
    throw DomainError("theta_I: z is not on the geodesic S_A");
}

}  // namespace

ThetaValue siegel_eval(const Complex& tau, const Complex& z, const Real& tol, const Sublattice& M) {
  return lattice_sum(M, Kind::Plain, tau, z, tol);
}

ThetaValue raised_siegel_eval(const Complex& tau, const Complex& z, const Real& tol, const Sublattice& M) {
  return lattice_sum(M, Kind::Raised, tau, z, tol);
}

ThetaValue theta_I_star_eval(const Split& s, const Complex& tau, const Complex& z, const Real& tol) {
  require_on_geodesic(s, z);
  return lattice_sum(s.I, Kind::IStar, tau, z, tol);
}

ThetaValue theta_I_eval(const Split& s, const Complex& tau, const Complex& z, const Real& tol) {
  require_on_geodesic(s, z);
  return lattice_sum(s.I, Kind::IPlain, tau, z, tol);
}

VVQSeries<Rat> unary_theta_series(const Split& s, int twice_weight, const Rat& order) {
  if (s.N.rank() != 1) throw DomainError("unary_theta_series: N must have rank 1");
  if (twice_weight != 1 && twice_weight != 3) throw DomainError("unary_theta_series: weight must be 1/2 or 3/2");
  VVQSeries<Rat> out{rat(twice_weight, 2), order, {}};
  const Vec3 d = s.N.dual_basis()[0];
  for (long x = 0;; ++x) {
    Vec3 W = Rat(x) * d;
    Rat e = -q(W);
    if (e >= order) break;
    for (long sg : {1L, -1L}) {
      if (x == 0 && sg < 0) continue;
      Vec3 Ws = Rat(sg) * W;
      Rat c = twice_weight == 3 ? bilinear(Ws, s.Avec) : Rat(1);
      out.add(s.N.key(Ws), e, c);
    }
  }
  for (const auto& g : s.N.disc_group()) out.comp[g];
  return out;
}

QuadElem lambda_of(const QForm& A, const Vec3& Y) {
  const Int D(A.disc());
  const Rat a(A.a), b(A.b);
  QuadElem w(-b / (2 * a), -1 / (2 * a), D);
  QuadElem inner = w * w * Y[0] + w * Y[1] + QuadElem(Y[2], Rat(0), D);
  return inner * QuadElem(Rat(0), a / Rat(D), D);
}

std::vector<WindowVector> windowed_vectors(const std::vector<Vec3>& basis, const QForm& A, const Rat& qmax,
                                           long window_start) {
  if (basis.size() != 2) throw DomainError("windowed_vectors: rank-2 lattice expected");
  Automorph aut = automorph(A);
  const QuadElem& eps = aut.eps;
  auto eps_pow = [&](long e) {
    QuadElem r(Rat(1), Rat(0), eps.D());
    QuadElem b = e >= 0 ? eps : eps.conj();
    for (long i = 0; i < std::labs(e); ++i) r = r * b;
    return r;
  };
  const QuadElem lo = eps_pow(window_start), hi = eps_pow(window_start + 4);
  const QuadElem l1 = lambda_of(A, basis[0]), l2 = lambda_of(A, basis[1]);
  for (const auto& bv : basis)
    if (bilinear(bv, vec(A)) != 0) throw DomainError("windowed_vectors: basis not orthogonal to A");
  auto [a1, a1p] = l1.embed();
  auto [a2, a2p] = l2.embed();
  const double m00 = static_cast<double>(a1), m01 = static_cast<double>(a2);
  const double m10 = static_cast<double>(a1p), m11 = static_cast<double>(a2p);
  const double det = m00 * m11 - m01 * m10;
  const double e = static_cast<double>(eps.value());
  const double qm = qmax.get_d();
  const double bl = std::sqrt(qm * std::pow(e, static_cast<double>(window_start + 4))) * (1 + 1e-9) + 1e-9;
  const double blp = std::sqrt(qm * std::pow(e, -static_cast<double>(window_start))) * (1 + 1e-9) + 1e-9;
  const long B1 = static_cast<long>(std::ceil((std::fabs(m11) * bl + std::fabs(m01) * blp) / std::fabs(det))) + 1;
  const long B2 = static_cast<long>(std::ceil((std::fabs(m10) * bl + std::fabs(m00) * blp) / std::fabs(det))) + 1;
  std::vector<WindowVector> out;
  const double q00 = q(basis[0]).get_d(), q11 = q(basis[1]).get_d(), q01 = bilinear(basis[0], basis[1]).get_d();
  for (long y1 = -B1; y1 <= B1; ++y1)
    for (long y2 = -B2; y2 <= B2; ++y2) {
      double qd = q00 * y1 * y1 + q01 * y1 * y2 + q11 * y2 * y2;
      if (qd <= -1e-6 || qd > qm + 1e-6) continue;
      Vec3 Y = Rat(y1) * basis[0] + Rat(y2) * basis[1];
      Rat qY = q(Y);
      if (qY <= 0 || qY > qmax) continue;
      QuadElem lam = l1 * Rat(y1) + l2 * Rat(y2);
      QuadElem lamp = lam.conj();
      QuadElem x = lam.sign() < 0 ? -lam : lam;
      QuadElem xp = lamp.sign() < 0 ? -lamp : lamp;
      // eps^e |lambda'| <= |lambda| < eps^(e+4) |lambda'|
      if ((x - lo * xp).sign() < 0) continue;
      if ((x - hi * xp).sign() >= 0) continue;
      out.push_back({Y, lam, qY});
    }
  return out;
}

VVQSeries<Rat> hecke_theta_series(const Split& s, const Rat& order, long window_start) {
  VVQSeries<Rat> out{Rat(1), order, {}};
  Automorph aut = automorph(s.A);
  Rat qmax = order;
  auto vs = windowed_vectors(s.I.dual_basis(), s.A, qmax, window_start);
  for (const auto& wv : vs) {
    if (wv.qY >= order) continue;
    if (act(aut.M, wv.Y) == wv.Y) throw std::logic_error("hecke_theta_series: automorph fixes a nonzero vector");
    out.add(s.I.key(wv.Y), wv.qY, Rat(wv.lambda.sign()));
  }
  for (const auto& g : s.I.disc_group()) out.comp[g];
  return out;
}

}  // namespace qcyc
