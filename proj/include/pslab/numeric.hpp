#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

// Low-level numeric helpers: error-free transformations, a minimal
// double-double type for phase reduction, and deterministic summation.

namespace pslab {

struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DD two_prod(double a, double b) {
  double p = a * b;
  double err = std::fma(a, b, -p);
  return {p, err};
}

inline DD dd_from_quad(__float128 q) {
  double hi = static_cast<double>(q);
  double lo = static_cast<double>(q - static_cast<__float128>(hi));
  return {hi, lo};
}

// x * v reduced mod 1 into [-0.5, 0.5).  Keeps ~1e-17 absolute accuracy
// for |x * v| up to 2^50, which naive doubles cannot do.
inline double frac_mul(double x, DD v) {
  DD p = two_prod(x, v.hi);
  double lo = std::fma(x, v.lo, p.lo);
  double k = std::nearbyint(p.hi);
  double f = (p.hi - k) + lo;
  return f - std::nearbyint(f);
}

// e(t) = exp(2 pi i t) for t already reduced to [-0.5, 0.5).
inline std::complex<double> unit_phase(double t) {
  double a = 2.0 * M_PI * t;
  return {std::cos(a), std::sin(a)};
}

// e(x * v) with double-double phase reduction.
inline std::complex<double> osc(double x, DD v) {
  return unit_phase(frac_mul(x, v));
}

// Fixed-order pairwise reduction.  The tree shape depends only on the
// length, so results are identical no matter how the work was produced.
template <typename T>
T pairwise_sum(std::span<const T> v) {
  const std::size_t n = v.size();
  if (n == 0) return T{};
  if (n <= 16) {
    T s = v[0];
    for (std::size_t i = 1; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(std::span<const T>(v.data(), v.size()));
}

// Compensated (Kahan-Neumaier) accumulator for long serial sums.
struct Accum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace pslab
