#pragma once

#include "qcyc/lattice.hpp"
#include "qcyc/numerics.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcyc {

/// Raised when a truncated expansion cannot certify a requested coefficient.
class InsufficientOrder : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Complex to_complex(const Rat& x) { return Complex(to_real(x)); }
inline Complex to_complex(const Real& x) { return Complex(x); }
inline Complex to_complex(const Complex& x) { return x; }
inline bool is_zero(const Rat& x) { return x == 0; }
inline bool is_zero(const Real& x) { return x == 0; }
inline bool is_zero(const Complex& x) { return x.re == 0 && x.im == 0; }

template <class To>
To coeff_cast(const Rat& x) {
  if constexpr (std::is_same_v<To, Rat>) {
    return x;
  } else if constexpr (std::is_same_v<To, Real>) {
    return to_real(x);
  } else {
    return to_complex(x);
  }
}

/// One component: exponent -> coefficient.
template <class C>
struct Series {
  std::map<Rat, C> terms;

  Series& operator+=(const Series& o) {
    for (const auto& [e, c] : o.terms) add(e, c);
    return *this;
  }
  void add(const Rat& e, const C& c) {
    auto it = terms.find(e);
    if (it == terms.end()) {
      if (!is_zero(c)) terms.emplace(e, c);
    } else {
      it->second += c;
      if (is_zero(it->second)) terms.erase(it);
    }
  }
};

/// Vector-valued q-series with components indexed by discriminant-group keys.
/// Every exponent below `order` is known; absent terms are zero.
template <class C>
struct VVQSeries {
  Rat weight;
  Rat order;
  std::map<Key, Series<C>> comp;

  C coeff(const Key& k, const Rat& e) const {
    if (e >= order) throw InsufficientOrder("coefficient at exponent " + to_string(e) + " beyond order " + to_string(order));
    auto it = comp.find(k);
    if (it == comp.end()) return C(0);
    auto jt = it->second.terms.find(e);
    return jt == it->second.terms.end() ? C(0) : jt->second;
  }
  void add(const Key& k, const Rat& e, const C& c) {
    if (e >= order) return;
    comp[k].add(e, c);
  }
  /// Smallest exponent with a nonzero coefficient (order if none).
  Rat min_exponent() const {
    Rat m = order;
    for (const auto& [k, s] : comp)
      if (!s.terms.empty() && s.terms.begin()->first < m) m = s.terms.begin()->first;
    return m;
  }
  VVQSeries truncated(const Rat& new_order) const {
    VVQSeries out{weight, std::min(order, new_order), {}};
    for (const auto& [k, s] : comp)
      for (const auto& [e, c] : s.terms)
        if (e < out.order) out.comp[k].terms.emplace(e, c);
    return out;
  }
  VVQSeries& operator+=(const VVQSeries& o) {
    order = std::min(order, o.order);
    for (const auto& [k, s] : o.comp)
      for (const auto& [e, c] : s.terms) add(k, e, c);
    for (auto& [k, s] : comp)
      for (auto it = s.terms.begin(); it != s.terms.end();) it = it->first >= order ? s.terms.erase(it) : std::next(it);
    return *this;
  }
  VVQSeries scaled(const C& s) const {
    VVQSeries out{weight, order, {}};
    for (const auto& [k, ser] : comp)
      for (const auto& [e, c] : ser.terms) out.add(k, e, c * s);
    return out;
  }
};

template <class To, class From>
VVQSeries<To> convert(const VVQSeries<From>& f) {
  VVQSeries<To> out{f.weight, f.order, {}};
  for (const auto& [k, s] : f.comp)
    for (const auto& [e, c] : s.terms) {
      if constexpr (std::is_same_v<From, To>) {
        out.comp[k].terms.emplace(e, c);
      } else if constexpr (std::is_same_v<From, Rat>) {
        out.comp[k].terms.emplace(e, coeff_cast<To>(c));
      } else if constexpr (std::is_same_v<To, Complex>) {
        out.comp[k].terms.emplace(e, to_complex(c));
      } else {
        static_assert(std::is_same_v<From, To>, "unsupported conversion");
      }
    }
  return out;
}

/// Value of every component at tau (terms below the truncation order).
template <class C>
std::map<Key, Complex> evaluate(const VVQSeries<C>& f, const Complex& tau) {
  std::map<Key, Complex> out;
  for (const auto& [k, s] : f.comp) {
    Complex acc;
    for (const auto& [e, c] : s.terms) acc += to_complex(c) * e2pi(Complex(to_real(e)) * tau);
    out[k] = acc;
  }
  return out;
}

/// binom(x, s) for rational x via the falling factorial.
Rat binom(const Rat& x, long s);

/// [f, g]_n = sum_s (-1)^s binom(kappa+n-1, s) binom(ell+n-1, n-s) f^(n-s) g^(s), with f^(s) the
/// s-th power of the exponent times the coefficient. Components are tensor keys (f key followed by g key).
/// Only exponents below max_exp are produced when given.
template <class C>
VVQSeries<C> rankin_cohen(const VVQSeries<C>& f, const Rat& kappa, const VVQSeries<C>& g, const Rat& ell, long n,
                          std::optional<Rat> max_exp = std::nullopt) {
  if (n < 0) throw DomainError("rankin_cohen: n must be nonnegative");
  std::vector<Rat> w(n + 1);
  for (long s = 0; s <= n; ++s) {
    w[s] = binom(kappa + n - 1, s) * binom(ell + n - 1, n - s);
    if (s % 2) w[s] = -w[s];
  }
  Rat ord = std::min(f.order + g.min_exponent(), g.order + f.min_exponent());
  if (max_exp) ord = std::min(ord, *max_exp);
  VVQSeries<C> out{f.weight + g.weight + 2 * n, ord, {}};
  for (const auto& [kf, sf] : f.comp)
    for (const auto& [kg, sg] : g.comp) {
      if (sf.terms.empty() || sg.terms.empty()) continue;
      Key k = kf;
      k.insert(k.end(), kg.begin(), kg.end());
      Series<C>& dst = out.comp[k];
      for (const auto& [e1, c1] : sf.terms) {
        if (e1 + sg.terms.begin()->first >= ord) break;
        for (const auto& [e2, c2] : sg.terms) {
          Rat e = e1 + e2;
          if (e >= ord) break;
          Rat coef = 0;
          Rat p1 = 1, p2 = 1;
          std::vector<Rat> pw1(n + 1), pw2(n + 1);
          for (long s = 0; s <= n; ++s) {
            pw1[s] = p1;
            pw2[s] = p2;
            p1 *= e1;
            p2 *= e2;
          }
          for (long s = 0; s <= n; ++s) coef += w[s] * pw1[n - s] * pw2[s];
          if (coef == 0) continue;
          dst.add(e, c1 * c2 * coeff_cast<C>(coef));
        }
      }
      if (dst.terms.empty()) out.comp.erase(k);
    }
  return out;
}

/// Sum over components of the q^0 coefficient of g_gamma * h_gamma.
template <class C>
C ct_pair(const VVQSeries<C>& g, const VVQSeries<C>& h) {
  C acc(0);
  const Rat hmin = h.min_exponent(), gmin = g.min_exponent();
  if (-gmin >= h.order)
    throw InsufficientOrder("ct_pair: need the second series below exponent " + to_string(-gmin) +
                            ", known only below " + to_string(h.order));
  if (-hmin >= g.order)
    throw InsufficientOrder("ct_pair: need the first series below exponent " + to_string(-hmin) +
                            ", known only below " + to_string(g.order));
  for (const auto& [k, sg] : g.comp) {
    auto it = h.comp.find(k);
    if (it == h.comp.end()) continue;
    for (const auto& [e, c] : sg.terms) {
      auto jt = it->second.terms.find(-e);
      if (jt != it->second.terms.end()) acc += c * jt->second;
    }
  }
  return acc;
}

template <class C>
VVQSeries<C> down_map(const VVQSeries<C>& f, const Sublattice& L, const Sublattice& M) {
  return {f.weight, f.order, down_map(f.comp, L, M)};
}

template <class C>
VVQSeries<C> up_map(const VVQSeries<C>& g, const Sublattice& L, const Sublattice& M) {
  return {g.weight, g.order, up_map(g.comp, L, M)};
}

/// Scalar Laurent series in q with rational coefficients; coefficients known for exponents < order().
struct Laurent {
  long val = 0;
  std::vector<Rat> c;

  long order() const { return val + static_cast<long>(c.size()); }
  Rat operator[](long e) const;
  Laurent truncated(long order) const;
  /// Drop leading zeros.
  Laurent normalized() const;
};

Laurent operator*(const Laurent& a, const Laurent& b);
Laurent operator+(const Laurent& a, const Laurent& b);
Laurent operator*(const Rat& s, const Laurent& a);
Laurent inverse(const Laurent& a);
Laurent pow(const Laurent& a, long n);

/// k-th Bernoulli number.
Rat bernoulli(long k);
/// E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n, exponents < order.
Laurent eisenstein(long k, long order);
Laurent delta(long order);
Laurent jfunc(long order);

/// Component keys of L'/L: b even and b odd.
Key key_even();
Key key_odd();

/// theta(tau) = sum_n q^{n^2/4} e_{n mod 2}, weight 1/2.
VVQSeries<Rat> unary_theta_half(const Rat& order);
/// Theta of E7 written on the same two components (q = 3/4 on the odd one), weight 7/2.
VVQSeries<Rat> e7_theta(const Rat& order);
/// Multiply every component by a scalar series of the given weight.
VVQSeries<Rat> mul_scalar(const VVQSeries<Rat>& f, const Laurent& h, const Rat& h_weight);
/// A scalar series as a one-component series with empty key.
VVQSeries<Rat> as_vv(const Laurent& h, const Rat& weight);

/// Coefficient a_g(d): exponent d/4 on the component of parity d mod 2.
Rat coeff_disc(const VVQSeries<Rat>& g, long d);

/// Weakly holomorphic forms of weight 3/2 - k for the dual Weil representation of L (k odd >= 3), one for
/// each depth M with -4M >= dmin, normalized so a(-4M) = 1 and a(-4M') = 0 for the other depths.
std::vector<VVQSeries<Rat>> plus_basis(long k, long dmin, const Rat& order);

/// Parse a product recipe such as "theta*E4*E6/Delta", "theta*E4^2/Delta*j" or "e7theta*E4^2/Delta".
VVQSeries<Rat> g_recipe(const std::string& recipe, const Rat& order);

/// A weight -1/2 form for the Weil representation of L with principal part supported on discriminants
/// 5 and 8 (coefficients at the squares 1 and 4 vanish), normalized by a(-5) = 1.
VVQSeries<Rat> plus_form_even_58(const Rat& order);

/// Weil S matrix rho(S)[delta][gamma] = e(-sig/8)/sqrt|G| e(-(gamma, delta)), in disc_group order; conjugated if dual.
std::vector<std::vector<Complex>> weil_S(const Sublattice& M, bool dual);
/// Weil S matrix for L'/L on (key_even, key_odd).
std::vector<std::vector<Complex>> weil_S_L(bool dual);

}  // namespace qcyc
