#include "qcyc/maass.hpp"

#include "qcyc/theta.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace qcyc {

namespace {

struct Slot {
  long j;
  Rat e;
  bool principal;
};

Key nkey(long j, long twom) { return Key{frac(rat(j, twom))}; }

// Indexing of N'/N by j mod 2m.
struct NData {
  long m, twom;
  std::vector<std::vector<Complex>> rho;  // rho_N(S)[l][j]
};

NData ndata(long m) {
  NData d;
  d.m = m;
  d.twom = 2 * d.m;
  const Real c = 1 / boost::multiprecision::sqrt(Real(d.twom));
  const Complex e8 = expi2pi(Real(1) / 8);
  d.rho.assign(d.twom, std::vector<Complex>(d.twom));
  for (long l = 0; l < d.twom; ++l)
    for (long j = 0; j < d.twom; ++j) d.rho[l][j] = e8 * expi2pi(Real(j * l % d.twom) / d.twom) * c;
  return d;
}

NData ndata(const Split& s) {
  if (s.m.get_den() != 1) throw std::logic_error("solve_mock: q(n0) must be integral");
  const long m = s.m.get_num().get_si();
  // check the key convention on the generator of N'
  if (s.N.key(Rat(1, 2 * m) * s.n0) != nkey(1, 2 * m)) throw std::logic_error("solve_mock: unexpected N' keys");
  return ndata(m);
}

long key_to_j(const Key& k, long twom) {
  Rat x = k.at(0) * twom;
  if (x.get_den() != 1) throw std::logic_error("solve_mock: component is not in N'/N");
  return x.get_num().get_si();
}

std::vector<Complex> fminus(const VVQSeries<Rat>& shadow, const Real& scale, const Complex& tau, long twom) {
  std::vector<Complex> out(twom);
  const Real fourpi = 4 * pi();
  for (const auto& [k, ser] : shadow.comp) {
    long l = key_to_j(k, twom);
    Complex acc;
    for (const auto& [n, b] : ser.terms) {
      if (n <= 0) throw DomainError("completion_eval: shadow must have positive exponents only");
      const Real nr = to_real(n);
      const Real x = fourpi * nr * tau.im;
      Real coef = -scale * to_real(b) / boost::multiprecision::sqrt(fourpi * nr) * upper_incomplete_gamma_half(x);
      acc += e2pi(Complex(-nr) * tau) * coef;
    }
    out[l] = acc;
  }
  return out;
}

std::vector<Complex> holo_values(const VVQSeries<Real>& holo, const Complex& tau, long twom) {
  std::vector<Complex> out(twom);
  for (const auto& [k, c] : evaluate(holo, tau)) out[key_to_j(k, twom)] = c;
  return out;
}

struct System {
  std::vector<Slot> cols;
  std::vector<std::vector<Real>> a;  // a[col][row]
  std::vector<Real> b;
};

// Rows: real and imaginary parts of F(-1/tau)_l - sqrt(tau) sum_j rho[l][j] F(tau)_j = 0 for l = 1..m-1.
System build(const NData& nd, const std::vector<Slot>& cols, const std::vector<Complex>& taus,
             const std::function<std::vector<Complex>(const Complex&)>& known) {
  System sys;
  sys.cols = cols;
  const size_t rows = 2 * taus.size() * (nd.m - 1);
  sys.a.assign(cols.size(), std::vector<Real>(rows));
  sys.b.assign(rows, Real(0));
  size_t r = 0;
  for (const auto& tau : taus) {
    const Complex tS = -(Complex(1) / tau);
    const Complex st = sqrt(tau);
    std::vector<Complex> kn = known(tau), knS = known(tS);
    for (long l = 1; l < nd.m; ++l) {
      for (size_t c = 0; c < cols.size(); ++c) {
        const Slot& sl = cols[c];
        const Complex en = e2pi(Complex(to_real(sl.e)) * tau);
        Complex v = st * (nd.rho[l][sl.j] - nd.rho[l][nd.twom - sl.j]) * en;
        v = -v;
        if (l == sl.j) v += e2pi(Complex(to_real(sl.e)) * tS);
        sys.a[c][r] = v.re;
        sys.a[c][r + 1] = v.im;
      }
      Complex acc = knS[l];
      for (long j = 0; j < nd.twom; ++j) acc -= st * nd.rho[l][j] * kn[j];
      sys.b[r] = -acc.re;
      sys.b[r + 1] = -acc.im;
      r += 2;
    }
  }
  return sys;
}

Real dot(const std::vector<Real>& x, const std::vector<Real>& y) {
  Real s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

struct LSResult {
  std::vector<std::optional<Real>> x;  // none for dropped columns
  Real residual;
  long dropped = 0;
};

// Greedy modified Gram-Schmidt in column order (two passes); a column whose relative residual falls
// below drop_tol is dropped and its coefficient fixed to zero.
LSResult greedy_lstsq(const System& sys, const Real& drop_tol) {
  const size_t nc = sys.a.size();
  std::vector<std::vector<Real>> Q;
  std::vector<size_t> kept;
  std::vector<std::vector<Real>> R;  // R[k] holds coefficients against Q[0..k]
  std::vector<Real> scale(nc);
  LSResult out;
  out.x.assign(nc, std::nullopt);
  for (size_t c = 0; c < nc; ++c) {
    std::vector<Real> v = sys.a[c];
    Real nv = boost::multiprecision::sqrt(dot(v, v));
    if (nv == 0) {
      ++out.dropped;
      continue;
    }
    scale[c] = nv;
    for (auto& t : v) t /= nv;
    std::vector<Real> rc(Q.size() + 1, Real(0));
    for (int pass = 0; pass < 2; ++pass)
      for (size_t k = 0; k < Q.size(); ++k) {
        Real h = dot(Q[k], v);
        rc[k] += h;
        for (size_t i = 0; i < v.size(); ++i) v[i] -= h * Q[k][i];
      }
    Real rn = boost::multiprecision::sqrt(dot(v, v));
    if (rn < drop_tol) {
      ++out.dropped;
      continue;
    }
    for (auto& t : v) t /= rn;
    rc[Q.size()] = rn;
    Q.push_back(std::move(v));
    R.push_back(std::move(rc));
    kept.push_back(c);
  }
  std::vector<Real> rhs = sys.b;
  std::vector<Real> qb(Q.size());
  for (size_t k = 0; k < Q.size(); ++k) {
    qb[k] = dot(Q[k], rhs);
    for (size_t i = 0; i < rhs.size(); ++i) rhs[i] -= qb[k] * Q[k][i];
  }
  Real res = 0;
  for (const auto& t : rhs) res = std::max(res, Real(boost::multiprecision::abs(t)));
  out.residual = res;
  std::vector<Real> y(Q.size());
  for (size_t k = Q.size(); k-- > 0;) {
    Real t = qb[k];
    for (size_t l = k + 1; l < Q.size(); ++l) t -= R[l][k] * y[l];
    y[k] = t / R[k][k];
  }
  for (size_t k = 0; k < kept.size(); ++k) out.x[kept[k]] = y[k] / scale[kept[k]];
  return out;
}

Real system_residual(const System& sys, const std::vector<Real>& x) {
  Real res = 0;
  for (size_t r = 0; r < sys.b.size(); ++r) {
    Real t = sys.b[r];
    for (size_t c = 0; c < x.size(); ++c) t -= sys.a[c][r] * x[c];
    res = std::max(res, Real(boost::multiprecision::abs(t)));
  }
  return res;
}

std::vector<Slot> slots(const NData& nd, long order, long depth, bool regular, bool principal) {
  std::vector<Slot> reg, pr;
  for (long j = 1; j < nd.m; ++j) {
    Rat e0 = rat(-j * j, 4 * nd.m);
    Rat e = e0 - Rat(floor_rat(e0));  // in [0, 1)
    for (Rat n = e; n < order; n += 1) reg.push_back({j, n, false});
    for (Rat n = e - 1; n > -depth; n -= 1) pr.push_back({j, n, true});
  }
  auto by_exp = [](const Slot& x, const Slot& y) { return x.e != y.e ? x.e < y.e : x.j < y.j; };
  std::sort(reg.begin(), reg.end(), by_exp);
  // shallow first
  std::sort(pr.begin(), pr.end(), [](const Slot& x, const Slot& y) { return x.e != y.e ? x.e > y.e : x.j < y.j; });
  std::vector<Slot> out;
  if (regular) out.insert(out.end(), reg.begin(), reg.end());
  if (principal) out.insert(out.end(), pr.begin(), pr.end());
  return out;
}

long default_points(size_t ncols, long m) {
  return static_cast<long>(std::ceil(1.5 * static_cast<double>(ncols) / static_cast<double>(m - 1))) + 2;
}

Rat shadow_order(long order) {
  // completion terms at Im tau >= 1/2 decay like exp(-pi n)
  long need = static_cast<long>(std::ceil(precision_bits() * std::log(2.0) / M_PI)) + 3;
  return Rat(std::max(order, need));
}

void put_odd(VVQSeries<Rat>& f, long j, long twom, const Rat& e, const Rat& c) {
  f.add(nkey(j, twom), e, c);
  f.add(nkey(twom - j, twom), e, -c);
}

void put_odd(VVQSeries<Real>& f, long j, long twom, const Rat& e, const Real& c) {
  f.add(nkey(j, twom), e, c);
  f.add(nkey(twom - j, twom), e, -c);
}

}  // namespace

std::vector<Complex> arc_points(long n) {
  std::vector<Complex> out;
  for (long k = 0; k < n; ++k) {
    Real phi = pi() / 6 + (2 * pi() / 3) * (Real(k) + Real(1) / 2) / n;
    out.emplace_back(boost::multiprecision::cos(phi), boost::multiprecision::sin(phi));
  }
  return out;
}

std::map<Key, Complex> completion_eval(const VVQSeries<Real>& holo, const VVQSeries<Rat>& shadow, const Real& scale,
                                       const Complex& tau) {
  if (!(tau.im > 0)) throw DomainError("completion_eval: Im tau must be positive");
  std::map<Key, Complex> out = evaluate(holo, tau);
  const Real fourpi = 4 * pi();
  for (const auto& [k, ser] : shadow.comp) {
    Complex acc;
    for (const auto& [n, b] : ser.terms) {
      if (n <= 0) throw DomainError("completion_eval: shadow must have positive exponents only");
      const Real nr = to_real(n);
      Real coef = -scale * to_real(b) / boost::multiprecision::sqrt(fourpi * nr) *
                  upper_incomplete_gamma_half(fourpi * nr * tau.im);
      acc += e2pi(Complex(-nr) * tau) * coef;
    }
    out[k] += acc;
  }
  return out;
}

std::map<Key, Complex> completion_eval(const MockPart& mp, const Complex& tau) {
  return completion_eval(mp.holo_numeric, mp.shadow, mp.scale, tau);
}

std::map<Key, Complex> xi_numeric(const VVFunction& F, const Rat& weight, const Complex& tau, const Real& h) {
  auto fxp = F(tau + Complex(h)), fxm = F(tau - Complex(h));
  auto fyp = F(tau + Complex(Real(0), h)), fym = F(tau - Complex(Real(0), h));
  const Real vk = boost::multiprecision::pow(tau.im, to_real(weight));
  std::map<Key, Complex> out;
  for (const auto& [k, _] : fxp) {
    Complex dx = (fxp[k] - fxm[k]) * (1 / (2 * h));
    Complex dy = (fyp[k] - fym[k]) * (1 / (2 * h));
    Complex dbar = (dx + i_unit() * dy) * Real(0.5);
    out[k] = Complex(Real(0), 2 * vk) * conj(dbar);
  }
  return out;
}

std::map<Key, Complex> laplacian_numeric(const VVFunction& F, const Rat& weight, const Complex& tau, const Real& h) {
  auto f0 = F(tau);
  auto fxp = F(tau + Complex(h)), fxm = F(tau - Complex(h));
  auto fyp = F(tau + Complex(Real(0), h)), fym = F(tau - Complex(Real(0), h));
  const Real v = tau.im, k = to_real(weight);
  std::map<Key, Complex> out;
  for (const auto& [key, c0] : f0) {
    Complex fxx = (fxp[key] - c0 * Real(2) + fxm[key]) * (1 / (h * h));
    Complex fyy = (fyp[key] - c0 * Real(2) + fym[key]) * (1 / (h * h));
    Complex fx = (fxp[key] - fxm[key]) * (1 / (2 * h));
    Complex fy = (fyp[key] - fym[key]) * (1 / (2 * h));
    out[key] = (fxx + fyy) * (-v * v) + Complex(Real(0), k * v) * (fx + i_unit() * fy);
  }
  return out;
}

MockPart solve_mock(const Split& s, const MockConfig& cfg) {
  if (cfg.order < 2) throw DomainError("solve_mock: order must be at least 2");
  if (cfg.principal_depth < 0) throw DomainError("solve_mock: principal_depth must be nonnegative");
  if (cfg.den_bound < 1) throw DomainError("solve_mock: den_bound must be positive");
  NData nd = ndata(s);
  MockPart out;
  out.config = cfg;
  out.den_bound_used = cfg.den_bound;
  out.scale = 1 / boost::multiprecision::sqrt(Real(s.D));
  out.shadow = unary_theta_series(s, 3, shadow_order(cfg.order));
  out.holo_numeric = VVQSeries<Real>{Rat(1, 2), Rat(cfg.order), {}};
  for (long j = 0; j < nd.twom; ++j) out.holo_numeric.comp[nkey(j, nd.twom)];
  if (nd.m == 1) {
    out.holo = VVQSeries<Rat>{Rat(1, 2), Rat(cfg.order), {}};
    for (long j = 0; j < nd.twom; ++j) out.holo.comp[nkey(j, nd.twom)];
    out.residual = out.exact_residual = 0;
    return out;
  }

  auto cols = slots(nd, cfg.order, cfg.principal_depth, true, true);
  out.columns = static_cast<long>(cols.size());
  out.points = cfg.points > 0 ? cfg.points : default_points(cols.size(), nd.m);
  auto taus = arc_points(out.points);
  auto known = [&](const Complex& t) { return fminus(out.shadow, out.scale, t, nd.twom); };
  System sys = build(nd, cols, taus, known);
  const Real tol = pow2(-static_cast<long>(precision_bits()) / 4);
  LSResult ls = greedy_lstsq(sys, tol);
  out.residual = ls.residual;
  out.dropped = ls.dropped;
  if (ls.residual > tol)
    throw std::runtime_error("solve_mock: solver failed (residual " + to_string(ls.residual, 6) +
                             "), increase order/principal_depth");

  std::vector<Real> xf(cols.size()), xe(cols.size());
  for (size_t c = 0; c < cols.size(); ++c) xf[c] = ls.x[c] ? *ls.x[c] : Real(0);
  for (size_t c = 0; c < cols.size(); ++c)
    if (xf[c] != 0) put_odd(out.holo_numeric, cols[c].j, nd.twom, cols[c].e, xf[c]);

  // reconstruct in increasing exponent; the exact series is complete below the first failure
  std::vector<size_t> idx(cols.size());
  for (size_t c = 0; c < idx.size(); ++c) idx[c] = c;
  std::stable_sort(idx.begin(), idx.end(), [&](size_t x, size_t y) { return cols[x].e < cols[y].e; });
  const Real rtol = pow2(-static_cast<long>(precision_bits()) / 5);
  Rat exact_order = rat(cfg.order, 2);
  std::vector<std::optional<Rat>> xr(cols.size());
  for (size_t c : idx) {
    if (cols[c].e >= exact_order) break;
    if (!ls.x[c]) {
      xr[c] = Rat(0);
      continue;
    }
    auto rec = rational_reconstruct(xf[c], cfg.den_bound, rtol * (1 + boost::multiprecision::abs(xf[c])));
    if (rec.value && !rec.ambiguous) {
      xr[c] = *rec.value;
    } else {
      out.unrecognized.emplace_back(nkey(cols[c].j, nd.twom), cols[c].e);
      exact_order = cols[c].e;
      break;
    }
  }
  for (size_t c = 0; c < cols.size(); ++c)
    if (cols[c].e >= exact_order) xr[c].reset();
  out.holo = VVQSeries<Rat>{Rat(1, 2), exact_order, {}};
  for (long j = 0; j < nd.twom; ++j) out.holo.comp[nkey(j, nd.twom)];
  for (size_t c = 0; c < cols.size(); ++c) {
    xe[c] = xr[c] ? to_real(*xr[c]) : xf[c];
    if (xr[c] && cols[c].e < exact_order && *xr[c] != 0) put_odd(out.holo, cols[c].j, nd.twom, cols[c].e, *xr[c]);
  }
  out.exact_residual = system_residual(sys, xe);
  return out;
}

Real modularity_residual(const VVQSeries<Real>& holo, const MockPart& mp, const std::vector<Complex>& taus) {
  const long twom = static_cast<long>(mp.shadow.comp.size());
  if (twom < 2 || twom % 2) throw DomainError("modularity_residual: shadow is not indexed by N'/N");
  NData nd = ndata(twom / 2);
  Real res = 0;
  for (const auto& tau : taus) {
    const Complex tS = -(Complex(1) / tau);
    auto f = holo_values(holo, tau, twom), fS = holo_values(holo, tS, twom);
    auto g = fminus(mp.shadow, mp.scale, tau, twom), gS = fminus(mp.shadow, mp.scale, tS, twom);
    const Complex st = sqrt(tau);
    for (long l = 0; l < twom; ++l) {
      Complex acc = fS[l] + gS[l];
      for (long j = 0; j < twom; ++j) acc -= st * nd.rho[l][j] * (f[j] + g[j]);
      res = std::max(res, abs(acc));
    }
  }
  return res;
}

VVQSeries<Rat> odd_weakly_holomorphic(const Split& s, long j, const Rat& e, const MockConfig& cfg) {
  NData nd = ndata(s);
  if (j <= 0 || j >= nd.m) throw DomainError("odd_weakly_holomorphic: component must lie in 1..m-1");
  if (e >= 0 || frac(e + rat(j * j, 4 * nd.m)) != 0) throw DomainError("odd_weakly_holomorphic: bad exponent");
  long depth = std::max<long>(cfg.principal_depth, 0);
  std::vector<Slot> cols;
  for (const auto& sl : slots(nd, cfg.order, std::max<long>(depth, Int(ceil_rat(-e)).get_si() + 1), true, true))
    if (!sl.principal || sl.e > e) cols.push_back(sl);
  const long pts = cfg.points > 0 ? cfg.points : default_points(cols.size(), nd.m);
  auto taus = arc_points(pts);
  const Slot forced{j, e, true};
  auto known = [&](const Complex& t) {
    std::vector<Complex> v(nd.twom);
    v[j] = e2pi(Complex(to_real(e)) * t);
    v[nd.twom - j] = -v[j];
    return v;
  };
  System sys = build(nd, cols, taus, known);
  const Real tol = pow2(-static_cast<long>(precision_bits()) / 4);
  LSResult ls = greedy_lstsq(sys, tol);
  if (ls.residual > tol) throw std::runtime_error("odd_weakly_holomorphic: no form with this principal part found");
  VVQSeries<Rat> out{Rat(1, 2), Rat(cfg.order), {}};
  for (long t = 0; t < nd.twom; ++t) out.comp[nkey(t, nd.twom)];
  put_odd(out, forced.j, nd.twom, forced.e, Rat(1));
  std::vector<size_t> idx(cols.size());
  for (size_t c = 0; c < idx.size(); ++c) idx[c] = c;
  std::stable_sort(idx.begin(), idx.end(), [&](size_t x, size_t y) { return cols[x].e < cols[y].e; });
  const Real rtol = pow2(-static_cast<long>(precision_bits()) / 5);
  for (size_t c : idx) {
    if (!ls.x[c]) continue;
    auto rec = rational_reconstruct(*ls.x[c], cfg.den_bound, rtol * (1 + boost::multiprecision::abs(*ls.x[c])));
    if (!rec.value || rec.ambiguous) {
      out = out.truncated(cols[c].e);
      break;
    }
    if (*rec.value != 0) put_odd(out, cols[c].j, nd.twom, cols[c].e, *rec.value);
  }
  return out;
}

}  // namespace qcyc
