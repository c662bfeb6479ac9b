#pragma once

// Reference computations written independently of the library: integer
// arithmetic for coefficient sums, hand-expanded 2×2 algebra and scalar
// recurrences for the harmonic oscillator q' = p, p' = −ω²q.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

using i64 = std::int64_t;

inline i64 ipow(i64 base, int exponent) {
  i64 r = 1;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

/// Numerators of C_0..C_L when α and β share the denominator d.
inline std::vector<i64> defects_scaled(const std::vector<i64>& a, const std::vector<i64>& b, int horizon) {
  std::vector<i64> c;
  i64 c0 = 0;
  for (auto v : a) c0 += v;
  c.push_back(c0);
  for (int l = 1; l <= horizon; ++l) {
    i64 s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      s += a[j] * ipow(static_cast<i64>(j), l);
      s -= l * b[j] * ipow(static_cast<i64>(j), l - 1);
    }
    c.push_back(s);
  }
  return c;
}

/// Numerators of λ_ij (i, j = 1..k) over dα·dβ.
inline std::vector<std::vector<i64>> lambda_scaled(const std::vector<i64>& a, const std::vector<i64>& b) {
  const int k = static_cast<int>(a.size()) - 1;
  std::vector<std::vector<i64>> out(k, std::vector<i64>(k, 0));
  for (int i = 1; i <= k; ++i) {
    for (int j = 1; j <= k; ++j) {
      i64 s = 0;
      for (int m = 0; i + m <= k && j + m <= k; ++m) s += a[i + m] * b[j + m] + a[j + m] * b[i + m];
      out[i - 1][j - 1] = s;
    }
  }
  return out;
}

struct Qp {
  double q;
  double p;
};

inline Qp rotate(double w, Qp y, double t) {
  return {y.q * std::cos(w * t) + y.p / w * std::sin(w * t), y.p * std::cos(w * t) - w * y.q * std::sin(w * t)};
}

inline double energy(double w, Qp y) { return 0.5 * (y.p * y.p + w * w * y.q * y.q); }

/// Row-major 2×2 matrices.
using M2 = std::array<double, 4>;

inline Qp apply(const M2& m, Qp y) { return {m[0] * y.q + m[1] * y.p, m[2] * y.q + m[3] * y.p}; }

inline double det(const M2& m) { return m[0] * m[3] - m[1] * m[2]; }

inline M2 explicit_euler(double w, double h) { return {1.0, h, -h * w * w, 1.0}; }

/// (I − hA)⁻¹ expanded by hand.
inline M2 implicit_euler(double w, double h) {
  const double d = 1.0 + h * h * w * w;
  return {1.0 / d, h / d, -h * w * w / d, 1.0 / d};
}

/// (I − (h/2)A)⁻¹(I + (h/2)A) expanded by hand.
inline M2 cayley(double w, double h) {
  const double a = 0.25 * h * h * w * w;
  const double d = 1.0 + a;
  return {(1.0 - a) / d, h / d, -h * w * w / d, (1.0 - a) / d};
}

/// q_{n+3} = q_n − q_{n+1} + q_{n+2} + h(p_{n+1} + p_{n+2}) with
/// p_{n+3} = p_{n+1} − 2hω²(q_{n+1} + q_{n+2}).
inline Qp m3_printed_step(double w, double h, const std::array<Qp, 3>& y) {
  const double q = y[0].q - y[1].q + y[2].q + h * (y[1].p + y[2].p);
  const double p = y[1].p - 2.0 * h * w * w * (y[1].q + y[2].q);
  return {q, p};
}

/// Same q update with p_{n+3} = p_{n+1} − 2hω² q_{n+2}.
inline Qp m3_corrected_step(double w, double h, const std::array<Qp, 3>& y) {
  const double q = y[0].q - y[1].q + y[2].q + h * (y[1].p + y[2].p);
  const double p = y[1].p - 2.0 * h * w * w * y[2].q;
  return {q, p};
}

/// Adams–Bashforth 4 predictor, Adams–Moulton corrector, one correction.
inline Qp abm4_pece_step(double w, double h, const std::array<Qp, 4>& y) {
  const auto f = [w](Qp s) { return Qp{s.p, -w * w * s.q}; };
  const Qp f0 = f(y[0]), f1 = f(y[1]), f2 = f(y[2]), f3 = f(y[3]);
  const Qp pred{y[3].q + h / 24.0 * (55 * f3.q - 59 * f2.q + 37 * f1.q - 9 * f0.q),
                y[3].p + h / 24.0 * (55 * f3.p - 59 * f2.p + 37 * f1.p - 9 * f0.p)};
  const Qp fs = f(pred);
  return {y[3].q + h / 24.0 * (9 * fs.q + 19 * f3.q - 5 * f2.q + f1.q),
          y[3].p + h / 24.0 * (9 * fs.p + 19 * f3.p - 5 * f2.p + f1.p)};
}

/// Leap-frog q_{n+2} = q_n + 2h p_{n+1}, p_{n+2} = p_n − 2hω² q_{n+1}.
inline Qp leapfrog_step(double w, double h, Qp y0, Qp y1) {
  return {y0.q + 2.0 * h * y1.p, y0.p - 2.0 * h * w * w * y1.q};
}

}  // namespace oracle
