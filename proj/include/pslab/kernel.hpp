#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pslab/quadrature.hpp"

// The compactly supported smoothing bump: plateau on [-(a-d), a-d],
// support [-(a+d), a+d], built as the indicator of [-a, a] convolved
// with the r-fold self-convolution of a uniform density.  Its transform
// is a sinc product with the rapid-decay envelope used to cut Fourier
// integrals.

namespace pslab {

namespace detail {

// Cardinal B-spline of degree d (density of d+1 iid uniforms on [0,1])
// evaluated by the all-positive Cox-de Boor recursion; stable for any d.
inline double cardinal_bspline(int degree, double t) {
  if (t <= 0.0 || t >= degree + 1.0) return 0.0;
  int j = static_cast<int>(std::floor(t));
  double u = t - j;
  std::vector<double> b(degree + 1, 0.0);
  b[0] = 1.0;
  for (int k = 1; k <= degree; ++k) {
    for (int m = k; m >= 0; --m) {
      double prev = (m > 0) ? b[m - 1] : 0.0;
      b[m] = ((u + m) * b[m] + (k + 1.0 - m - u) * prev) / k;
    }
  }
  return (j <= degree) ? b[j] : 0.0;
}

// CDF of the sum of r iid uniforms on [0,1] via the telescoping identity
// F_r(t) = sum_j pdf_{r+1}(t - j); every term is a stable B-spline value.
inline double irwin_hall_cdf(int r, double t) {
  if (t <= 0.0) return 0.0;
  if (t >= static_cast<double>(r)) return 1.0;
  double s = 0.0;
  for (int j = 0; j <= static_cast<int>(std::floor(t)); ++j)
    s += cardinal_bspline(r, t - j);
  return s;
}

inline double sinc(double u) {
  double au = std::abs(u);
  if (au < 1e-4) {
    double u2 = u * u;
    return 1.0 - u2 / 6.0 * (1.0 - u2 / 20.0);
  }
  return std::sin(u) / u;
}

}  // namespace detail

struct SmoothingKernel {
  double half_width = 0.0;  // a
  double margin = 0.0;      // d_k, the smoothing half-margin
  int order = 0;            // r >= 1

  double support() const { return half_width + margin; }
  double plateau() const { return half_width - margin; }
};

inline SmoothingKernel build_kernel(double a, double d_k, int r) {
  if (!(d_k > 0.0 && d_k < a / 4.0))
    throw std::invalid_argument("build_kernel: need 0 < d_k < a/4");
  if (r < 1 || r > 64)
    throw std::invalid_argument("build_kernel: need 1 <= r <= 64");
  return {a, d_k, r};
}

// theta(y): 1 on the plateau, 0 outside the support, a piecewise
// polynomial CDF difference in between.
inline double theta(const SmoothingKernel& k, double y) {
  double ay = std::abs(y);
  if (ay <= k.plateau()) return 1.0;
  if (ay >= k.support()) return 0.0;
  // Phi(s): CDF of the sum of r uniforms on [-b, b], b = d_k / r.
  double b = k.margin / k.order;
  auto cdf = [&](double s) {
    return detail::irwin_hall_cdf(k.order, s / (2.0 * b) + 0.5 * k.order);
  };
  return cdf(y + k.half_width) - cdf(y - k.half_width);
}

// Closed-form transform: Theta(x) = sin(2 pi a x)/(pi x) *
// sinc(2 pi d_k x / r)^r, real since theta is even; Theta(0) = 2a.
inline double theta_hat(const SmoothingKernel& k, double x) {
  if (x == 0.0) return 2.0 * k.half_width;
  double box = std::sin(2.0 * M_PI * k.half_width * x) / (M_PI * x);
  double u = 2.0 * M_PI * k.margin * x / k.order;
  double factor = detail::sinc(u);
  double prod = 1.0;
  for (int j = 0; j < k.order; ++j) prod *= factor;
  return box * prod;
}

// Envelope of Lemma-1 type: min(2a, (1/|x|) (r / (|x| d_k))^r),
// computed through logs to dodge overflow for small |x|.
inline double theta_hat_bound(const SmoothingKernel& k, double x) {
  double cap = 2.0 * k.half_width;
  double ax = std::abs(x);
  if (ax == 0.0) return cap;
  double logb = -std::log(ax) +
                k.order * (std::log((double)k.order) - std::log(ax) -
                           std::log(k.margin));
  if (logb >= std::log(cap)) return cap;
  return std::exp(logb);
}

struct Lemma1Report {
  bool ratio_defined = false;
  double max_ratio = 0.0;        // max |Theta(x)| / bound(x) over the grid
  double worst_x = 0.0;
  double quadrature_gap = 0.0;   // | int theta - Theta(0) |
};

inline Lemma1Report verify_lemma1(const SmoothingKernel& k,
                                  const std::vector<double>& grid) {
  Lemma1Report rep;
  for (double x : grid) {
    double ratio = std::abs(theta_hat(k, x)) / theta_hat_bound(k, x);
    if (!rep.ratio_defined || ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.worst_x = x;
    }
    rep.ratio_defined = true;
  }
  double s = k.support();
  double quad = adaptive_simpson([&](double y) { return theta(k, y); }, -s, s,
                                 1e-12 * s);
  rep.quadrature_gap = std::abs(quad - theta_hat(k, 0.0));
  return rep;
}

}  // namespace pslab
