#include "qcyc/cycles.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <tuple>

namespace qcyc {

namespace {

using std::abs;

Real real_abs(const Real& x) { return boost::multiprecision::abs(x); }

struct QCoeffs {
  unsigned prec = 0;
  long terms = 0;
  std::vector<Real> e4, e6, delta;
};

const QCoeffs& qcoeffs() {
  static std::mutex mu;
  static std::map<unsigned, QCoeffs> cache;
  std::lock_guard<std::mutex> lock(mu);
  const unsigned P = precision_bits();
  auto it = cache.find(P);
  if (it != cache.end()) return it->second;
  QCoeffs c;
  c.prec = P;
  // |q| <= exp(-pi sqrt 3) on the fundamental domain
  c.terms = static_cast<long>(P / 7) + 40;
  Laurent E4 = eisenstein(4, c.terms), E6 = eisenstein(6, c.terms), Dl = delta(c.terms);
  for (long n = 0; n < c.terms; ++n) {
    c.e4.push_back(to_real(E4[n]));
    c.e6.push_back(to_real(E6[n]));
    c.delta.push_back(to_real(Dl[n]));
  }
  return cache.emplace(P, std::move(c)).first->second;
}

Complex horner(const std::vector<Real>& c, const Complex& q) {
  Complex acc;
  for (size_t n = c.size(); n-- > 0;) acc = acc * q + Complex(c[n]);
  return acc;
}

// Taylor coefficients (1/m!) d^m/dz^m of sum c_n q^n at z, m < len.
std::vector<Complex> taylor(const std::vector<Real>& c, const Complex& z, long len) {
  std::vector<Complex> out(len);
  const Complex q = e2pi(z);
  const Complex twopii(Real(0), 2 * pi());
  Complex qn(1);
  for (size_t n = 0; n < c.size(); ++n) {
    if (c[n] != 0) {
      Complex fac = Complex(c[n]) * qn;
      Complex d(1);
      Real mf = 1;
      for (long m = 0; m < len; ++m) {
        out[m] += fac * d * (1 / mf);
        d = d * twopii * Complex(Real(static_cast<long>(n)));
        mf *= m + 1;
      }
    }
    qn = qn * q;
  }
  return out;
}

std::vector<Complex> tmul(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  std::vector<Complex> r(a.size());
  for (size_t m = 0; m < a.size(); ++m)
    for (size_t i = 0; i <= m; ++i) r[m] += a[i] * b[m - i];
  return r;
}

std::vector<Complex> tpow(const std::vector<Complex>& a, long e) {
  std::vector<Complex> r(a.size());
  r[0] = Complex(1);
  for (long i = 0; i < e; ++i) r = tmul(r, a);
  return r;
}

Complex cpow(const Complex& z, long n) { return pow(z, n); }

bool cusp_space_zero(long k) { return k == 2 || k == 3 || k == 4 || k == 5 || k == 7; }

}  // namespace

std::pair<Complex, Mat2> reduce_point(const Complex& z0) {
  if (!(z0.im > 0)) throw DomainError("reduce_point: Im z must be positive");
  Complex z = z0;
  Mat2 g;
  const Real slack = pow2(-static_cast<long>(precision_bits()) / 2);
  for (int it = 0; it < 100000; ++it) {
    Real n = boost::multiprecision::floor(z.re + Real(0.5));
    long nl = n.convert_to<long>();
    if (nl != 0) {
      z.re -= n;
      g = mat_T(-nl) * g;
    }
    if (norm2(z) < 1 - slack) {
      z = -(Complex(1) / z);
      g = mat_S() * g;
    } else {
      return {z, g};
    }
  }
  throw std::runtime_error("reduce_point: no convergence");
}

EisensteinValues eisenstein_values(const Complex& z) {
  const QCoeffs& c = qcoeffs();
  Complex q = e2pi(z);
  return {horner(c.e4, q), horner(c.e6, q), horner(c.delta, q)};
}

FKEvaluator::FKEvaluator(long k, std::vector<QForm> forms) : k_(k), forms_(std::move(forms)) {
  if (k < 2) throw DomainError("f: k must be >= 2");
  if (!cusp_space_zero(k))
    throw DomainError("f: weight 2k = " + std::to_string(2 * k) +
                      " carries cusp forms; the principal parts do not determine f");
  if (forms_.empty()) throw DomainError("f: empty set of forms");
  d_ = forms_.front().disc();
  for (const auto& Q : forms_) {
    if (!Q.posdef() || !is_reduced_posdef(Q)) throw DomainError("f: reduced positive definite forms expected");
    if (Q.disc() != d_) throw DomainError("f: forms of different discriminants");
  }
  prec_ = precision_bits();
  const QCoeffs& qc = qcoeffs();
  long w = 0;
  for (const auto& Q : forms_) {
    Factor f{2, Complex(), Q};
    if (Q.b == 0 && Q.a == Q.c) {
      f.kind = 0;
      w += 6 * k;
    } else if (Q.a == Q.b && Q.b == Q.c) {
      f.kind = 1;
      w += 4 * k;
    } else {
      auto v = eisenstein_values(cm_point(Q));
      f.j = pow(v.e4, 3) / v.delta;
      w += 12 * k;
    }
    factors_.push_back(f);
  }
  const long r = 2 * k + w - 12;
  for (long a = 0; 4 * a <= r; ++a)
    if ((r - 4 * a) % 6 == 0) basis_.emplace_back(a, (r - 4 * a) / 6);
  if (basis_.empty()) throw std::logic_error("f: empty space for the numerator");

  const long len = 2 * k;
  std::vector<std::vector<Complex>> rows;
  std::vector<Complex> rhs;
  const Real C = boost::multiprecision::pow(Real(-d_), Real(k) - Real(0.5)) / pi();
  for (const auto& fac : factors_) {
    const Complex zq = cm_point(fac.form);
    auto e4 = taylor(qc.e4, zq, len), e6 = taylor(qc.e6, zq, len), dl = taylor(qc.delta, zq, len);
    std::vector<Complex> H(len);
    H[0] = Complex(1);
    for (const auto& g : factors_) {
      std::vector<Complex> t;
      if (g.kind == 0) {
        t = e6;
      } else if (g.kind == 1) {
        t = e4;
      } else {
        t = tpow(e4, 3);
        for (long m = 0; m < len; ++m) t[m] -= g.j * dl[m];
      }
      H = tmul(H, tpow(t, k));
    }
    // C a^-k sum_m binom(-k, m) (zq - conj zq)^{-k-m} h^{m-k}
    const Complex diff = zq - conj(zq);
    std::vector<Complex> lau(k);
    for (long m = 0; m < k; ++m)
      lau[m] = Complex(C / boost::multiprecision::pow(Real(fac.form.a), k)) * Complex(to_real(binom(Rat(-k), m))) *
               pow(diff, -k - m);
    std::vector<std::vector<Complex>> bt;
    for (const auto& [a, b] : basis_) bt.push_back(tmul(tmul(dl, tpow(e4, a)), tpow(e6, b)));
    for (long ord = 0; ord < k; ++ord) {
      Complex val;
      for (long m = 0; m < k; ++m) {
        long e = m - k;  // exponent of h
        long idx = ord - e;
        if (idx >= 0 && idx < len) val += lau[m] * H[idx];
      }
      std::vector<Complex> row;
      for (const auto& b : bt) row.push_back(b[ord]);
      rows.push_back(row);
      rhs.push_back(val);
    }
  }
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using VecR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  const long nr = static_cast<long>(rows.size()), nc = static_cast<long>(basis_.size());
  Mat M(2 * nr, 2 * nc);
  VecR B(2 * nr);
  for (long i = 0; i < nr; ++i) {
    for (long j = 0; j < nc; ++j) {
      M(i, j) = rows[i][j].re;
      M(i, nc + j) = -rows[i][j].im;
      M(nr + i, j) = rows[i][j].im;
      M(nr + i, nc + j) = rows[i][j].re;
    }
    B(i) = rhs[i].re;
    B(nr + i) = rhs[i].im;
  }
  VecR x = M.colPivHouseholderQr().solve(B);
  VecR res = M * x - B;
  Real bn = 0, rn = 0;
  for (long i = 0; i < 2 * nr; ++i) {
    bn = std::max(bn, real_abs(B(i)));
    rn = std::max(rn, real_abs(res(i)));
  }
  residual_ = bn > 0 ? Real(rn / bn) : rn;
  if (residual_ > pow2(-static_cast<long>(prec_) / 4))
    throw std::runtime_error("f: principal parts are inconsistent (residual " + to_string(residual_, 5) + ")");
  for (long j = 0; j < nc; ++j) coef_.emplace_back(x(j), x(nc + j));
}

Complex FKEvaluator::operator()(const Complex& z) const {
  if (precision_bits() != prec_) throw std::logic_error("f: evaluator built at a different precision");
  auto [zr, g] = reduce_point(z);
  auto v = eisenstein_values(zr);
  Complex G;
  for (size_t i = 0; i < basis_.size(); ++i)
    G += coef_[i] * v.delta * cpow(v.e4, basis_[i].first) * cpow(v.e6, basis_[i].second);
  Complex H(1);
  const Real near = pow2(-static_cast<long>(prec_) / 8);
  const Complex e43 = pow(v.e4, 3);
  for (const auto& f : factors_) {
    Complex t;
    Real scale = 1;
    if (f.kind == 0) {
      t = v.e6;
    } else if (f.kind == 1) {
      t = v.e4;
    } else {
      t = e43 - f.j * v.delta;
      scale = abs(e43) + abs(f.j * v.delta);
    }
    if (abs(t) < near * scale) throw PoleError("f: z is a pole (CM point of " + f.form.str() + ")", f.form);
    H *= pow(t, k_);
  }
  const Complex czd = Complex(Real(g.c)) * z + Complex(Real(g.d));
  return G / H * pow(czd, -2 * k_);
}

std::shared_ptr<const FKEvaluator> fk_evaluator(long k, const std::vector<QForm>& forms) {
  static std::mutex mu;
  static std::map<std::tuple<long, std::vector<QForm>, unsigned>, std::shared_ptr<const FKEvaluator>> cache;
  auto key = std::make_tuple(k, forms, precision_bits());
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto ev = std::make_shared<const FKEvaluator>(k, forms);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, ev).first->second;
}

Complex f_eval(long k, long d, const Complex& z) {
  if (d >= 0) throw DomainError("f: d must be negative");
  if (!valid_disc(d)) throw DomainError("f: no forms of discriminant " + std::to_string(d));
  return (*fk_evaluator(k, class_reps(d)))(z);
}

Complex f_class_eval(long k, const QForm& P, const Complex& z) {
  if (!P.posdef()) throw DomainError("f: P must be positive definite");
  return (*fk_evaluator(k, {reduce_posdef(P).form}))(z);
}

Complex f_direct(long k, long d, const Complex& z, long bound) {
  if (d >= 0 || !valid_disc(d)) throw DomainError("f_direct: bad discriminant");
  const Real x = z.re, y = z.im;
  Complex s;
  for (long a = 1; Real(a) * y <= bound; ++a) {
    Real r = 2 * boost::multiprecision::sqrt(Real(a) * bound * y);
    long lo = boost::multiprecision::floor(-2 * a * x - r).convert_to<long>() - 1;
    long hi = boost::multiprecision::ceil(-2 * a * x + r).convert_to<long>() + 1;
    for (long b = lo; b <= hi; ++b) {
      long num = b * b - d;
      if (num % (4 * a)) continue;
      long c = num / (4 * a);
      Real p = (Real(a) * (x * x + y * y) + Real(b) * x + Real(c)) / y;
      if (p > bound) continue;
      s += pow(eval_form(QForm{a, b, c}, z), -k);
    }
  }
  return s * (boost::multiprecision::pow(Real(-d), Real(k) - Real(0.5)) / pi());
}

std::vector<PoleInfo> pole_scan(const QForm& A, long d) {
  if (A.a <= 0) throw DomainError("pole_scan: a must be positive");
  if (d >= 0 || !valid_disc(d)) throw DomainError("pole_scan: bad discriminant");
  auto ker = integer_kernel({Int(2 * A.c), Int(-A.b), Int(2 * A.a)});
  std::vector<Vec3> basis;
  for (const auto& v : ker) basis.push_back({Rat(v[0]), Rat(v[1]), Rat(v[2])});
  const Rat target = rat(-d, 4);
  Geodesic G = geodesic(A);
  std::vector<PoleInfo> out;
  for (const auto& wv : windowed_vectors(basis, A, target, 0)) {
    if (wv.qY != target || wv.Y[0] <= 0) continue;
    QForm Q{wv.Y[0].get_num().get_si(), wv.Y[1].get_num().get_si(), wv.Y[2].get_num().get_si()};
    auto [l, lp] = wv.lambda.embed();
    Real s = (boost::multiprecision::log(real_abs(l)) - boost::multiprecision::log(real_abs(lp))) / 2;
    auto zp = geodesic_point(G, Complex(s));
    if (abs(zp.first - cm_point(Q)) > pow2(-static_cast<long>(precision_bits()) / 3) * (1 + abs(zp.first)))
      throw std::logic_error("pole_scan: CM point of " + Q.str() + " is not at the predicted parameter");
    out.push_back({s, Q, d});
  }
  std::sort(out.begin(), out.end(), [](const PoleInfo& x, const PoleInfo& y) { return x.s < y.s; });
  return out;
}

PeriodicQuad periodic_trapezoid(const std::function<std::vector<Complex>(const Complex&)>& f, const Real& L,
                                const Real& shift, const QuadConfig& cfg) {
  const Real tol = cfg.tol > 0 ? cfg.tol : pow2(-static_cast<long>(precision_bits()) / 3);
  long n = std::max<long>(cfg.min_nodes, 2);
  std::vector<Complex> sum;
  auto add = [&](const std::vector<Complex>& v) {
    if (sum.empty()) sum.assign(v.size(), Complex());
    for (size_t i = 0; i < v.size(); ++i) sum[i] += v[i];
  };
  for (long j = 0; j < n; ++j) add(f(Complex(L * j / n, shift)));
  std::vector<Complex> prev(sum.size());
  for (size_t i = 0; i < sum.size(); ++i) prev[i] = sum[i] * (L / n);
  while (2 * n <= cfg.max_nodes) {
    for (long j = 0; j < n; ++j) add(f(Complex(L * (2 * j + 1) / (2 * n), shift)));
    n *= 2;
    std::vector<Complex> cur(sum.size());
    Real diff = 0, mag = 0;
    for (size_t i = 0; i < sum.size(); ++i) {
      cur[i] = sum[i] * (L / n);
      diff = std::max(diff, abs(cur[i] - prev[i]));
      mag = std::max(mag, abs(cur[i]));
    }
    if (diff <= tol * (1 + mag)) return {cur, diff, n};
    prev = cur;
  }
  throw QuadratureError("quadrature: no convergence with " + std::to_string(n) + " nodes");
}

namespace {

std::vector<Complex> flatten(const std::map<Key, Complex>& m, const std::vector<Key>& keys) {
  std::vector<Complex> out;
  for (const auto& k : keys) {
    auto it = m.find(k);
    out.push_back(it == m.end() ? Complex() : it->second);
  }
  return out;
}

std::map<Key, Complex> unflatten(const std::vector<Complex>& v, const std::vector<Key>& keys) {
  std::map<Key, Complex> out;
  for (size_t i = 0; i < keys.size(); ++i) out[keys[i]] = v[i];
  return out;
}

}  // namespace

std::map<Key, Complex> cycle_siegel(const QForm& A, const Complex& tau, const Real& theta_tol, const QuadConfig& cfg,
                                    Real* err) {
  if (A.a < 0) {
    auto r = cycle_siegel(-A, tau, theta_tol, cfg, err);
    for (auto& [k, v] : r) v = -v;
    return r;
  }
  Geodesic G = geodesic(A);
  const auto& keys = lattice_L().disc_group();
  auto f = [&](const Complex& s) {
    auto [z, dz] = geodesic_point(G, s);
    auto th = raised_siegel_eval(tau, z, theta_tol);
    auto v = flatten(th.comp, keys);
    for (auto& x : v) x = -(x * dz);
    return v;
  };
  auto q = periodic_trapezoid(f, 2 * G.log_eps, Real(0), cfg);
  if (err) *err = q.error;
  return unflatten(q.value, keys);
}

std::map<Key, Complex> cycle_theta_I_star(const QForm& A, const Complex& tau, const Real& theta_tol,
                                          const QuadConfig& cfg, Real* err) {
  if (A.a < 0) {
    auto r = cycle_theta_I_star(-A, tau, theta_tol, cfg, err);
    for (auto& [k, v] : r) v = -v;
    return r;
  }
  Geodesic G = geodesic(A);
  Split sp = split(A);
  const auto& keys = sp.I.disc_group();
  auto f = [&](const Complex& s) {
    auto [z, dz] = geodesic_point(G, s);
    auto th = theta_I_star_eval(sp, tau, z, theta_tol);
    auto v = flatten(th.comp, keys);
    for (auto& x : v) x = -(x * dz);
    return v;
  };
  auto q = periodic_trapezoid(f, 2 * G.log_eps, Real(0), cfg);
  if (err) *err = q.error;
  return unflatten(q.value, keys);
}

std::map<Key, Complex> thm32_rhs(const QForm& A, const Complex& tau, const Rat& order) {
  Split sp = split(A);
  return thm32_rhs(sp, tau, hecke_theta_series(sp, order), unary_theta_series(sp, 3, order));
}

std::map<Key, Complex> thm32_rhs(const Split& sp, const Complex& tau, const VVQSeries<Rat>& hecke,
                                 const VVQSeries<Rat>& unary) {
  auto th = evaluate(hecke, tau);
  auto un = evaluate(unary, tau);
  std::map<Key, Complex> t;
  for (const auto& kI : sp.I.disc_group())
    for (const auto& kN : sp.N.disc_group()) t[sp.join(kI, kN)] = th[kI] * conj(un[kN]);
  auto up = up_map(t, lattice_L(), sp.M);
  const Real v = tau.im;
  const Real c = -4 * pi() / boost::multiprecision::sqrt(Real(sp.D)) * v * boost::multiprecision::sqrt(v);
  for (auto& [k, x] : up) x *= c;
  for (const auto& k : lattice_L().disc_group()) up[k];
  return up;
}

namespace {

struct Term {
  Rat coef;
  std::shared_ptr<const FKEvaluator> f;
  long d;
  std::optional<QForm> cls;  // restrict poles to this class
};

std::vector<PoleInfo> scan_terms(const QForm& A, const std::vector<Term>& terms) {
  std::vector<PoleInfo> out;
  for (const auto& t : terms) {
    if (t.coef == 0) continue;
    for (const auto& p : pole_scan(A, t.d))
      if (!t.cls || equivalent(p.form, *t.cls)) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const PoleInfo& x, const PoleInfo& y) { return x.s < y.s; });
  return out;
}

Complex integrand(const Geodesic& G, long k, const std::vector<Term>& terms, const Complex& s) {
  auto [z, dz] = geodesic_point(G, s);
  Complex f;
  for (const auto& t : terms)
    if (t.coef != 0) f += Complex(to_real(t.coef)) * (*t.f)(z);
  return -(f * pow(eval_form(G.A, z), k - 1) * dz);
}

void recognize(CycleResult& r, const CycleConfig& cfg) {
  const Real mag = std::max(Real(1), abs(r.value));
  const Real tol = Real(cfg.rel_tol) * mag;
  if (r.error > tol || real_abs(r.value.im) > tol) return;
  auto rec = rational_reconstruct(r.value.re, cfg.den_bound, tol);
  r.recognized = rec.value;
  r.ambiguous = rec.ambiguous;
}

CycleResult cycle_terms(const QForm& A, long k, const std::vector<Term>& terms, const CycleConfig& cfg) {
  if (A.a < 0) {
    CycleResult r = cycle_terms(-A, k, terms, cfg);
    if (k % 2) {
      r.value = -r.value;
      if (r.recognized) r.recognized = -*r.recognized;
    }
    return r;
  }
  Geodesic G = geodesic(A);
  CycleResult r;
  r.poles = scan_terms(A, terms);
  const Real L = 2 * G.log_eps;
  auto f = [&](const Complex& s) { return std::vector<Complex>{integrand(G, k, terms, s)}; };
  if (r.poles.empty()) {
    auto q = periodic_trapezoid(f, L, Real(0), cfg.quad);
    r.value = q.value[0];
    r.error = q.error;
    r.nodes = q.nodes;
    r.mode = "real-line";
  } else {
    if (!cfg.pv) {
      std::string msg = "cycle: poles on the cycle at CM points of";
      for (const auto& p : r.poles) msg += " " + p.form.str();
      msg += "; enable the principal value";
      throw PoleError(msg, r.poles.front().form);
    }
    // off-line CM points of discriminant d satisfy |tan Im s| >= 1/sqrt(|d| D)
    long dmax = 0;
    for (const auto& t : terms)
      if (t.coef != 0) dmax = std::max(dmax, -t.d);
    const Real theta = boost::multiprecision::atan(1 / boost::multiprecision::sqrt(Real(dmax) * Real(G.D)));
    auto up = periodic_trapezoid(f, L, theta / 2, cfg.quad);
    auto lo = periodic_trapezoid(f, L, -theta / 2, cfg.quad);
    r.value = (up.value[0] + lo.value[0]) * Real(0.5);
    r.error = up.error + lo.error;
    r.nodes = up.nodes + lo.nodes;
    r.mode = "pv-contour";
  }
  recognize(r, cfg);
  return r;
}

std::vector<Term> terms_for(long k, const std::map<long, Rat>& coeffs) {
  std::vector<Term> terms;
  for (const auto& [d, c] : coeffs) {
    if (d >= 0 || !valid_disc(d)) throw DomainError("cycle: coefficient at invalid discriminant " + std::to_string(d));
    if (c == 0) continue;
    terms.push_back({c, fk_evaluator(k, class_reps(d)), d, std::nullopt});
  }
  return terms;
}

}  // namespace

CycleResult cycle_merom(const QForm& A, long k, const std::map<long, Rat>& coeffs, const CycleConfig& cfg) {
  if (k < 2) throw DomainError("cycle_merom: k must be >= 2");
  return cycle_terms(A, k, terms_for(k, coeffs), cfg);
}

CycleResult cycle_class(const QForm& A, long k, const QForm& P, const CycleConfig& cfg) {
  if (!P.posdef()) throw DomainError("cycle_class: P must be positive definite");
  QForm R = reduce_posdef(P).form;
  std::vector<Term> terms{{Rat(1), fk_evaluator(k, {R}), P.disc(), R}};
  return cycle_terms(A, k, terms, cfg);
}

Rat closed_form_thm41(const QForm& A, long k, const VVQSeries<Rat>& g, const MockPart& mock) {
  if (k < 3 || k % 2 == 0) throw DomainError("closed_form_thm41: k must be odd and >= 3");
  Split sp = split(A);
  const long n = (k - 1) / 2;
  auto gM = down_map(g, lattice_L(), sp.M);
  // the bracket is needed up to -min exponent of g
  Rat need = -gM.min_exponent() + 1;
  auto th = hecke_theta_series(sp, std::max(need, Rat(1)));
  auto br = rankin_cohen(th, Rat(1), mock.holo, Rat(1, 2), n);
  Rat ct = ct_pair(gM, br);
  Rat pre = 1;
  for (long i = 0; i < n; ++i) pre *= 4 * sp.D;
  return -pre * ct;
}

Rat closed_form_thm41(const QForm& A, long k, const VVQSeries<Rat>& g) {
  return closed_form_thm41(A, k, g, solve_mock(split(A)));
}

CycleResult trace_cycle(long Dtr, long k, const QForm& P, const CycleConfig& cfg) {
  if (Dtr <= 0) throw DomainError("trace_cycle: D must be positive");
  CycleResult tot;
  tot.mode = "trace";
  for (const auto& A : class_reps(Dtr)) {
    CycleResult r = cycle_class(A, k, P, cfg);
    tot.value += r.value;
    tot.error += r.error;
    tot.nodes += r.nodes;
    tot.poles.insert(tot.poles.end(), r.poles.begin(), r.poles.end());
    if (r.mode != "real-line") tot.mode = "trace (" + r.mode + ")";
  }
  recognize(tot, cfg);
  return tot;
}

std::pair<std::vector<Real>, std::vector<Real>> gauss_legendre(long n) {
  static std::mutex mu;
  static std::map<std::pair<long, unsigned>, std::pair<std::vector<Real>, std::vector<Real>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, precision_bits());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  std::vector<Real> x(n), w(n);
  const Real eps = pow2(-static_cast<long>(precision_bits()) + 8);
  for (long i = 0; i < n; ++i) {
    Real r = boost::multiprecision::cos(pi() * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
    Real dp = 0;
    for (int it = 0; it < 200; ++it) {
      Real p0 = 1, p1 = r;
      for (long j = 2; j <= n; ++j) {
        Real p2 = ((2 * j - 1) * r * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (r * p1 - p0) / (r * r - 1);
      Real dx = p1 / dp;
      r -= dx;
      if (real_abs(dx) < eps) break;
    }
    x[i] = r;
    w[i] = 2 / ((1 - r * r) * dp * dp);
  }
  return cache.emplace(key, std::make_pair(x, w)).first->second;
}

CycleResult pv_cycle(const QForm& A, long k, const std::map<long, Rat>& coeffs, const std::vector<Real>& deltas_in,
                     const CycleConfig& cfg) {
  if (A.a < 0) {
    CycleResult r = pv_cycle(-A, k, coeffs, deltas_in, cfg);
    if (k % 2) {
      r.value = -r.value;
      if (r.recognized) r.recognized = -*r.recognized;
    }
    return r;
  }
  auto terms = terms_for(k, coeffs);
  auto poles = scan_terms(A, terms);
  if (poles.empty()) {
    CycleConfig c = cfg;
    c.pv = false;
    return cycle_merom(A, k, coeffs, c);
  }
  const long nneg = k / 2;
  Geodesic G = geodesic(A);
  const Real L = 2 * G.log_eps;
  // start the period in the middle of the widest gap between poles
  std::vector<Real> ps;
  for (const auto& p : poles) ps.push_back(p.s);
  ps.erase(std::unique(ps.begin(), ps.end(), [](const Real& x, const Real& y) { return real_abs(x - y) < 1e-30; }),
           ps.end());
  Real best = -1, start = 0, mingap = L;
  for (size_t i = 0; i < ps.size(); ++i) {
    Real nxt = i + 1 < ps.size() ? ps[i + 1] : ps[0] + L;
    Real gap = nxt - ps[i];
    mingap = std::min(mingap, gap);
    if (gap > best) {
      best = gap;
      start = (ps[i] + nxt) / 2;
    }
  }
  std::vector<Real> deltas = deltas_in;
  if (deltas.empty()) {
    // the regular part expands in delta up to the nearest off-line pole
    long dmax = 0;
    for (const auto& t : terms) dmax = std::max(dmax, -t.d);
    const Real theta = boost::multiprecision::atan(1 / boost::multiprecision::sqrt(Real(dmax) * Real(G.D)));
    const Real d0 = std::min(Real(mingap / 8), Real(theta / 4));
    for (long j = 0; j < nneg + 8; ++j) deltas.push_back(d0 / pow2(j));
  }
  if (static_cast<long>(deltas.size()) < nneg + 2) throw DomainError("pv_cycle: too few deltas");
  for (size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1]) || !(deltas[i] > 0)) throw DomainError("pv_cycle: deltas must decrease");
  if (!(deltas.front() < mingap / 4)) throw DomainError("pv_cycle: largest delta must be below a quarter of the pole gap");
  std::vector<Real> inner;  // poles inside [start, start + L)
  for (auto p : ps) inner.push_back(p < start ? p + L : p);
  std::sort(inner.begin(), inner.end());

  auto [gx, gw] = gauss_legendre(48);
  auto f = [&](const Real& s) { return integrand(G, k, terms, Complex(s)); };
  auto panel = [&](const Real& a, const Real& b) {
    Complex acc;
    const Real h = (b - a) / 2, c = (a + b) / 2;
    for (size_t i = 0; i < gx.size(); ++i) acc += f(c + h * gx[i]) * (gw[i] * h);
    return acc;
  };
  // [a, b] with a singularity at distance delta beyond a (left) and/or b (right): geometric panels
  auto segment = [&](const Real& a, const Real& b, const Real& delta, bool left, bool right) {
    std::vector<Real> cuts{a, b};
    const Real mid = (a + b) / 2;
    if (left)
      for (Real t = 2 * delta; a + t - delta < mid; t *= 2) cuts.push_back(a + t - delta);
    if (right)
      for (Real t = 2 * delta; b - t + delta > mid; t *= 2) cuts.push_back(b - t + delta);
    cuts.push_back(mid);
    std::sort(cuts.begin(), cuts.end());
    Complex acc;
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i]) acc += panel(cuts[i], cuts[i + 1]);
    return acc;
  };
  std::vector<Complex> vals;
  for (const auto& delta : deltas) {
    Complex tot;
    Real a = start;
    for (size_t i = 0; i < inner.size(); ++i) {
      tot += segment(a, inner[i] - delta, delta, i > 0, true);
      a = inner[i] + delta;
    }
    tot += segment(a, start + L, delta, true, false);
    vals.push_back(tot);
  }
  // fit I(delta) = c0 + sum_j a_j delta^{-(2j-1)} + sum_j b_j delta^{2j-1}
  auto fit = [&](size_t count) {
    const long npos = static_cast<long>(count) - 1 - nneg;
    using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
    using VecR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
    Mat M(count, count);
    VecR br(count), bi(count);
    for (size_t r = 0; r < count; ++r) {
      const Real& dl = deltas[deltas.size() - count + r];
      long c = 0;
      M(r, c++) = 1;
      for (long j = 1; j <= nneg; ++j) M(r, c++) = boost::multiprecision::pow(dl, -(2 * j - 1));
      for (long j = 1; j <= npos; ++j) M(r, c++) = boost::multiprecision::pow(dl, 2 * j - 1);
      br(r) = vals[deltas.size() - count + r].re;
      bi(r) = vals[deltas.size() - count + r].im;
    }
    auto qr = M.colPivHouseholderQr();
    VecR xr = qr.solve(br), xi = qr.solve(bi);
    return Complex(xr(0), xi(0));
  };
  CycleResult r;
  r.poles = poles;
  r.mode = "pv-exclusion";
  r.experimental = true;
  r.value = fit(deltas.size());
  Complex prev = fit(deltas.size() - 1);
  r.error = abs(r.value - prev);
  r.nodes = static_cast<long>(deltas.size());
  const Real target = cfg.quad.tol > 0 ? cfg.quad.tol : pow2(-static_cast<long>(precision_bits()) / 8);
  if (r.error > 10 * target * (1 + abs(r.value)))
    throw QuadratureError("pv_cycle: extrapolation did not settle (last change " + to_string(r.error, 5) + ")");
  recognize(r, cfg);
  return r;
}

std::map<long, Rat> principal_coefficients(const VVQSeries<Rat>& g) {
  std::map<long, Rat> out;
  for (const auto& [k, s] : g.comp)
    for (const auto& [e, c] : s.terms) {
      if (e >= 0) break;
      Rat d = 4 * e;
      if (d.get_den() != 1) throw DomainError("principal_coefficients: exponent not in Z/4");
      if (c != 0) out[d.get_num().get_si()] += c;
    }
  return out;
}

}  // namespace qcyc
