#pragma once

#include "qcyc/cycles.hpp"

#include <random>

namespace qcyc::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240601);
  return g;
}

inline long uniform(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng()); }

inline Real uniform_real(double lo, double hi) {
  return Real(std::uniform_real_distribution<double>(lo, hi)(rng()));
}

/// A word in T^n and S of the given length.
inline Mat2 random_sl2(int len = 4) {
  Mat2 g;
  for (int i = 0; i < len; ++i) g = g * mat_T(uniform(-3, 3)) * mat_S();
  return g;
}

inline Complex random_upper(double ymin = 0.3, double ymax = 2.0) {
  return Complex(uniform_real(-1.0, 1.0), uniform_real(ymin, ymax));
}

inline Real max_dev(const std::map<Key, Complex>& a, const std::map<Key, Complex>& b) {
  Real m = 0;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    m = std::max(m, abs(v - (it == b.end() ? Complex() : it->second)));
  }
  for (const auto& [k, v] : b)
    if (!a.count(k)) m = std::max(m, abs(v));
  return m;
}

/// max_d |lhs_d - fac * sum_g S[d][g] rhs_g| over the group in order.
inline Real transform_residual(const std::map<Key, Complex>& lhs, const std::map<Key, Complex>& rhs,
                               const std::vector<Key>& group, const std::vector<std::vector<Complex>>& S,
                               const Complex& fac) {
  auto get = [](const std::map<Key, Complex>& m, const Key& k) {
    auto it = m.find(k);
    return it == m.end() ? Complex() : it->second;
  };
  Real r = 0;
  for (size_t d = 0; d < group.size(); ++d) {
    Complex s;
    for (size_t g = 0; g < group.size(); ++g) s += S[d][g] * get(rhs, group[g]);
    r = std::max(r, abs(get(lhs, group[d]) - fac * s));
  }
  return r;
}

}  // namespace qcyc::testing
