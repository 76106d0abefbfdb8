#include "qcyc/qseries.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace qcyc {

Rat binom(const Rat& x, long s) {
  if (s < 0) return 0;
  Rat r = 1;
  for (long i = 0; i < s; ++i) r *= (x - i);
  for (long i = 2; i <= s; ++i) r /= i;
  return r;
}

Rat Laurent::operator[](long e) const {
  if (e >= order()) throw InsufficientOrder("Laurent: exponent " + std::to_string(e) + " beyond order");
  if (e < val) return 0;
  return c[e - val];
}

Laurent Laurent::truncated(long ord) const {
  Laurent out = *this;
  if (ord < out.order()) out.c.resize(std::max(0L, ord - val));
  return out;
}

Laurent Laurent::normalized() const {
  Laurent out = *this;
  size_t z = 0;
  while (z < out.c.size() && out.c[z] == 0) ++z;
  out.c.erase(out.c.begin(), out.c.begin() + static_cast<long>(z));
  out.val += static_cast<long>(z);
  return out;
}

Laurent operator*(const Laurent& a, const Laurent& b) {
  Laurent out;
  out.val = a.val + b.val;
  long ord = std::min(a.order() + b.val, b.order() + a.val);
  long n = std::max(0L, ord - out.val);
  out.c.assign(n, Rat(0));
  for (long i = 0; i < static_cast<long>(a.c.size()) && i < n; ++i) {
    if (a.c[i] == 0) continue;
    for (long j = 0; i + j < n && j < static_cast<long>(b.c.size()); ++j) out.c[i + j] += a.c[i] * b.c[j];
  }
  return out;
}

Laurent operator+(const Laurent& a, const Laurent& b) {
  Laurent out;
  out.val = std::min(a.val, b.val);
  long ord = std::min(a.order(), b.order());
  out.c.assign(std::max(0L, ord - out.val), Rat(0));
  for (long e = out.val; e < ord; ++e) out.c[e - out.val] = a[e] + b[e];
  return out;
}

Laurent operator*(const Rat& s, const Laurent& a) {
  Laurent out = a;
  for (auto& x : out.c) x *= s;
  return out;
}

Laurent inverse(const Laurent& a0) {
  Laurent a = a0.normalized();
  if (a.c.empty()) throw DomainError("inverse: zero series");
  Laurent out;
  out.val = -a.val;
  const long n = static_cast<long>(a.c.size());
  out.c.assign(n, Rat(0));
  out.c[0] = 1 / a.c[0];
  for (long i = 1; i < n; ++i) {
    Rat s = 0;
    for (long j = 1; j <= i; ++j) s += a.c[j] * out.c[i - j];
    out.c[i] = -s / a.c[0];
  }
  return out;
}

Laurent pow(const Laurent& a, long n) {
  if (n < 0) return pow(inverse(a), -n);
  Laurent an = a.normalized();
  Laurent r;
  r.c.assign(std::max<size_t>(1, an.c.size()), Rat(0));
  r.c[0] = 1;
  Laurent base = an;
  while (n > 0) {
    if (n & 1) r = r * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return r;
}

Rat bernoulli(long k) {
  std::vector<Rat> B(k + 1);
  B[0] = 1;
  for (long m = 1; m <= k; ++m) {
    Rat s = 0;
    for (long j = 0; j < m; ++j) s += binom(Rat(m + 1), j) * B[j];
    B[m] = -s / (m + 1);
  }
  return B[k];
}

Laurent eisenstein(long k, long order) {
  if (k < 4 || k % 2) throw DomainError("eisenstein: weight must be even and >= 4");
  if (order < 1) throw DomainError("eisenstein: order must be >= 1");
  const Rat factor = -Rat(2 * k) / bernoulli(k);
  Laurent E;
  E.val = 0;
  E.c.assign(order, Rat(0));
  E.c[0] = 1;
  for (long n = 1; n < order; ++n) {
    Int s = 0;
    for (long d = 1; d <= n; ++d)
      if (n % d == 0) {
        Int p;
        mpz_ui_pow_ui(p.get_mpz_t(), d, k - 1);
        s += p;
      }
    E.c[n] = factor * Rat(s);
  }
  return E;
}

Laurent delta(long order) {
  if (order < 1) throw DomainError("delta: order must be >= 1");
  Laurent E4 = eisenstein(4, order), E6 = eisenstein(6, order);
  Laurent d = Rat(1, 1728) * (pow(E4, 3) + Rat(-1) * pow(E6, 2));
  d = d.truncated(order);
  return d.normalized();
}

Laurent jfunc(long order) {
  Laurent E4 = eisenstein(4, order + 2);
  Laurent j = pow(E4, 3) * inverse(delta(order + 2));
  return j.truncated(order);
}

Key key_even() { return lattice_L().key(vec(0, 0, 0)); }
Key key_odd() { return lattice_L().key(vec(0, 1, 0)); }

VVQSeries<Rat> unary_theta_half(const Rat& order) {
  VVQSeries<Rat> th{Rat(1, 2), order, {}};
  const Key k0 = key_even(), k1 = key_odd();
  for (long n = 0; rat(n * n, 4) < order; ++n) th.add(n % 2 ? k1 : k0, rat(n * n, 4), Rat(n == 0 ? 1 : 2));
  return th;
}

namespace {
// theta components in the variable x = q^(1/4)
Laurent theta_x(int parity, long xorder) {
  Laurent t;
  t.val = 0;
  t.c.assign(xorder, Rat(0));
  for (long n = parity; n * n < xorder; n += 2) t.c[n * n] += (n == 0 ? 1 : 2);
  return t;
}

VVQSeries<Rat> from_x_series(const Laurent& c0, const Laurent& c1, const Rat& weight, const Rat& order) {
  VVQSeries<Rat> out{weight, order, {}};
  for (long e = c0.val; e < c0.order(); ++e)
    if (c0[e] != 0) out.add(key_even(), rat(e, 4), c0[e]);
  for (long e = c1.val; e < c1.order(); ++e)
    if (c1[e] != 0) out.add(key_odd(), rat(e, 4), c1[e]);
  return out;
}
}  // namespace

VVQSeries<Rat> e7_theta(const Rat& order) {
  const long xorder = Int(4 * ceil_rat(order)).get_si() + 4;
  Laurent t0 = theta_x(0, xorder), t1 = theta_x(1, xorder);
  Laurent c0 = pow(t0, 7) + Rat(7) * (pow(t0, 3) * pow(t1, 4));
  Laurent c1 = Rat(7) * (pow(t0, 4) * pow(t1, 3)) + pow(t1, 7);
  return from_x_series(c0, c1, Rat(7, 2), order);
}

VVQSeries<Rat> mul_scalar(const VVQSeries<Rat>& f, const Laurent& h0, const Rat& h_weight) {
  Laurent h = h0.normalized();
  Rat ord = f.order + Rat(h.val);
  ord = std::min(ord, Rat(Rat(h.order()) + f.min_exponent()));
  VVQSeries<Rat> out{f.weight + h_weight, ord, {}};
  for (const auto& [k, s] : f.comp)
    for (const auto& [e, c] : s.terms)
      for (long i = 0; i < static_cast<long>(h.c.size()); ++i) {
        Rat ee = e + Rat(h.val + i);
        if (ee >= ord) break;
        if (h.c[i] != 0) out.add(k, ee, c * h.c[i]);
      }
  return out;
}

VVQSeries<Rat> as_vv(const Laurent& h, const Rat& weight) {
  VVQSeries<Rat> out{weight, Rat(h.order()), {}};
  for (long e = h.val; e < h.order(); ++e)
    if (h[e] != 0) out.add(Key{}, Rat(e), h[e]);
  return out;
}

Rat coeff_disc(const VVQSeries<Rat>& g, long d) {
  long r = ((d % 2) + 2) % 2;
  return g.coeff(r ? key_odd() : key_even(), rat(d, 4));
}

namespace {
// scalar length needed so a product with theta is known below `order`
long scalar_len(const Rat& order, long depth) { return ceil_rat(order).get_si() + depth + 3; }
}  // namespace

std::vector<VVQSeries<Rat>> plus_basis(long k, long dmin, const Rat& order) {
  if (k < 3 || k % 2 == 0) throw DomainError("plus_basis: k must be odd and >= 3");
  if (!valid_disc(dmin) || dmin >= 0) throw DomainError("plus_basis: dmin must be a negative discriminant");
  long alpha = -1, beta = -1, m = 0;
  for (m = 1; m < 100 && alpha < 0; ++m) {
    long w = 12 * m + 1 - k;
    if (w < 0 || w == 2) continue;
    for (long b = 0; 6 * b <= w; ++b)
      if ((w - 6 * b) % 4 == 0) {
        alpha = (w - 6 * b) / 4;
        beta = b;
        break;
      }
    if (alpha >= 0) break;
  }
  if (alpha < 0) throw std::logic_error("plus_basis: no weight solution");
  const long Mmax = (-dmin) / 4;
  if (Mmax < m) throw DomainError("plus_basis: dmin=" + std::to_string(dmin) + " is shallower than the minimal depth -" +
                                  std::to_string(4 * m));
  const long len = scalar_len(order, Mmax + 1);
  Laurent h0 = pow(eisenstein(4, len), alpha) * pow(eisenstein(6, len), beta) * pow(inverse(delta(len + m)), m);
  Laurent j = jfunc(len);
  const Rat wt = Rat(3, 2) - k;
  VVQSeries<Rat> th = unary_theta_half(order + Mmax + 2);
  std::vector<VVQSeries<Rat>> F;
  Laurent h = h0;
  for (long i = 0; m + i <= Mmax; ++i) {
    F.push_back(mul_scalar(th, h, wt - Rat(1, 2)).truncated(order));
    h = h * j;
  }
  // triangular elimination on the coefficients at exponents -M (even component)
  const size_t n = F.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t r = 0; r < n; ++r) {
      if (r == i) continue;
      Rat c = F[r].coeff(key_even(), Rat(-(m + static_cast<long>(i))));
      if (c != 0) {
        auto t = F[i].scaled(-c);
        F[r] += t;
      }
    }
  }
  for (auto& f : F) f.weight = wt;
  return F;
}

VVQSeries<Rat> g_recipe(const std::string& recipe, const Rat& order) {
  std::string s;
  for (char ch : recipe)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw DomainError("g_recipe: empty recipe");
  struct Factor {
    std::string base;
    long exp;
  };
  std::vector<Factor> fs;
  size_t i = 0;
  int sign = 1;
  while (i < s.size()) {
    if (s[i] == '*') {
      sign = 1;
      ++i;
      continue;
    }
    if (s[i] == '/') {
      sign = -1;
      ++i;
      continue;
    }
    size_t j = i;
    while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])))) ++j;
    if (j == i) throw DomainError("g_recipe: cannot parse '" + recipe + "'");
    std::string base = s.substr(i, j - i);
    long e = 1;
    if (j < s.size() && s[j] == '^') {
      size_t k = j + 1;
      while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
      if (k == j + 1) throw DomainError("g_recipe: missing exponent in '" + recipe + "'");
      e = std::stol(s.substr(j + 1, k - j - 1));
      j = k;
    }
    fs.push_back({base, sign * e});
    i = j;
  }
  int nvec = 0;
  VVQSeries<Rat> vv;
  long depth = 0;
  for (const auto& f : fs) {
    if (f.base == "theta" || f.base == "e7theta") {
      if (f.exp != 1) throw DomainError("g_recipe: the theta factor must appear to the first power");
      ++nvec;
    } else if (f.base == "Delta" && f.exp < 0) {
      depth += -f.exp;
    } else if (f.base == "j" && f.exp > 0) {
      depth += f.exp;
    } else if (f.base != "E4" && f.base != "E6" && f.base != "Delta" && f.base != "j") {
      throw DomainError("g_recipe: unknown factor " + f.base);
    } else if (f.exp < 0) {
      throw DomainError("g_recipe: only Delta may appear in a denominator");
    }
  }
  if (nvec != 1) throw DomainError("g_recipe: exactly one theta or e7theta factor required");
  const long len = scalar_len(order, depth);
  Laurent h;
  h.val = 0;
  h.c.assign(len + depth + 2, Rat(0));
  h.c[0] = 1;
  Rat hw = 0;
  for (const auto& f : fs) {
    if (f.base == "theta") {
      vv = unary_theta_half(order + depth + 2);
    } else if (f.base == "e7theta") {
      vv = e7_theta(order + depth + 2);
    } else if (f.base == "E4") {
      h = h * pow(eisenstein(4, len + depth + 2), f.exp);
      hw += 4 * f.exp;
    } else if (f.base == "E6") {
      h = h * pow(eisenstein(6, len + depth + 2), f.exp);
      hw += 6 * f.exp;
    } else if (f.base == "Delta") {
      h = h * pow(delta(len + depth + 2), f.exp);
      hw += 12 * f.exp;
    } else if (f.base == "j") {
      h = h * pow(jfunc(len + depth + 2), f.exp);
    }
  }
  return mul_scalar(vv, h, hw).truncated(order);
}

VVQSeries<Rat> plus_form_even_58(const Rat& order) {
  const long len = scalar_len(order, 3) + 2;
  const Rat big = order + 4;
  VVQSeries<Rat> th = e7_theta(big);
  Laurent E4 = eisenstein(4, len), E6 = eisenstein(6, len);
  Laurent invD = inverse(delta(len + 2));
  // G1 = th E4^2/Delta, G1 j, G2 = [th, E4]_1 E4^2 E6 / Delta^2
  VVQSeries<Rat> G1 = mul_scalar(th, pow(E4, 2) * invD, Rat(-4));
  VVQSeries<Rat> G1j = mul_scalar(G1, jfunc(len), Rat(0));
  VVQSeries<Rat> br = rankin_cohen(th, Rat(7, 2), as_vv(E4, Rat(4)), Rat(4), 1);
  VVQSeries<Rat> G2 = mul_scalar(br, pow(E4, 2) * E6 * pow(invD, 2), Rat(-10));
  std::vector<VVQSeries<Rat>> F{G1.truncated(order), G1j.truncated(order), G2.truncated(order)};
  // solve x0 F0 + x1 F1 + x2 F2 with a(-1) = a(-4) = 0 and a(-5) = 1
  auto a = [&](const VVQSeries<Rat>& f, long D) { return coeff_disc(f, -D); };
  RatMatrix M(3, std::vector<Rat>(3));
  std::vector<Rat> rhs{Rat(0), Rat(0), Rat(1)};
  const long Ds[3] = {1, 4, 5};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) M[r][c] = a(F[c], Ds[r]);
  // Gaussian elimination
  for (int c = 0; c < 3; ++c) {
    int p = c;
    while (p < 3 && M[p][c] == 0) ++p;
    if (p == 3) throw std::logic_error("plus_form_even_58: singular system");
    std::swap(M[p], M[c]);
    std::swap(rhs[p], rhs[c]);
    for (int r = 0; r < 3; ++r) {
      if (r == c || M[r][c] == 0) continue;
      Rat f = M[r][c] / M[c][c];
      for (int k = 0; k < 3; ++k) M[r][k] -= f * M[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  VVQSeries<Rat> g = F[0].scaled(rhs[0] / M[0][0]);
  g += F[1].scaled(rhs[1] / M[1][1]);
  g += F[2].scaled(rhs[2] / M[2][2]);
  g.weight = Rat(-1, 2);
  return g;
}

std::vector<std::vector<Complex>> weil_S(const Sublattice& M, bool dual) {
  const auto& G = M.disc_group();
  const auto [pos, neg] = M.signature();
  const Real norm = 1 / boost::multiprecision::sqrt(Real(static_cast<long>(G.size())));
  const Complex phase = expi2pi(-Real(pos - neg) / 8);
  std::vector<std::vector<Complex>> S(G.size(), std::vector<Complex>(G.size()));
  for (size_t d = 0; d < G.size(); ++d)
    for (size_t g = 0; g < G.size(); ++g) {
      Rat b = bilinear(M.rep(G[g]), M.rep(G[d]));
      Complex v = phase * expi2pi(-to_real(frac(b))) * norm;
      S[d][g] = dual ? conj(v) : v;
    }
  return S;
}

std::vector<std::vector<Complex>> weil_S_L(bool dual) {
  // disc_group of L is ordered (key_even, key_odd) since keys sort lexicographically
  return weil_S(lattice_L(), dual);
}

}  // namespace qcyc
