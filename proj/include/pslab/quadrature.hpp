#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pslab/numeric.hpp"

// Quadrature building blocks: adaptive Simpson for smooth one-off
// integrals, Clenshaw-Curtis panel rules with an embedded error estimate
// for the oscillatory sweeps, and a Filon-type rule for int e(x t^c) dt.

namespace pslab {

namespace detail {

template <typename F, typename R>
R adaptive_simpson_rec(const F& f, double a, double b, R fa, R fm, R fb, R whole,
                       double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  R flm = f(lm), frm = f(rm);
  R left = (fa + 4.0 * flm + fm) * ((m - a) / 6.0);
  R right = (fm + 4.0 * frm + fb) * ((b - m) / 6.0);
  R sum = left + right;
  if (depth <= 0 || std::abs(sum - whole) <= 15.0 * tol) {
    return sum + (sum - whole) / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <typename F>
auto adaptive_simpson(const F& f, double a, double b, double tol,
                      int max_depth = 48) {
  using R = decltype(f(a));
  R fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  R whole = (fa + 4.0 * fm + fb) * ((b - a) / 6.0);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol,
                                      max_depth);
}

// Clenshaw-Curtis nodes/weights for n+1 points on [0, 1], n even.
// Even-index nodes of the (n+1)-rule are exactly the (n/2+1)-rule nodes,
// which gives an embedded error estimate for free.
struct ClenshawCurtis {
  int n = 0;                     // number of intervals (points = n + 1)
  std::vector<double> nodes;     // ascending in [0, 1]
  std::vector<double> weights;   // sum to 1
  std::vector<double> coarse_weights;  // for the embedded (n/2+1)-rule

  explicit ClenshawCurtis(int n_) : n(n_) {
    if (n < 4 || n % 4 != 0)
      throw std::invalid_argument("ClenshawCurtis: n must be multiple of 4");
    nodes.resize(n + 1);
    for (int j = 0; j <= n; ++j)
      nodes[j] = 0.5 * (1.0 - std::cos(M_PI * j / n));
    weights = cc_weights(n);
    coarse_weights = cc_weights(n / 2);
  }

  static std::vector<double> cc_weights(int n) {
    std::vector<double> w(n + 1);
    for (int j = 0; j <= n; ++j) {
      double s = 0.0;
      for (int k = 1; k <= n / 2; ++k) {
        double b = (k == n / 2) ? 1.0 : 2.0;
        s += b / (4.0 * k * k - 1.0) * std::cos(2.0 * M_PI * k * j / n);
      }
      double c = (j == 0 || j == n) ? 1.0 : 2.0;
      // weight on [-1,1] is (c/n)(1-s); halved for [0,1]
      w[j] = 0.5 * (c / n) * (1.0 - s);
    }
    return w;
  }
};

// Filon-type evaluation of I(x) = int_{lo}^{hi} e(x t^c) dt.
// Substituting u = t^c turns the integrand into A(u) e(x u) with the
// smooth amplitude A(u) = u^{1/c-1} / c, which is approximated once by
// Chebyshev polynomials on a fixed panelization; each evaluation then
// costs O(panels * degree) regardless of how fast the phase oscillates.
class OscillatoryLineIntegral {
 public:
  static constexpr int kDegree = 7;

  OscillatoryLineIntegral(double lo, double hi, double c, int panels = 16)
      : c_(c) {
    if (!(hi > lo && lo > 0.0))
      throw std::invalid_argument("OscillatoryLineIntegral: need 0 < lo < hi");
    u0_ = std::pow(lo, c);
    u1_ = std::pow(hi, c);
    build(panels);
  }

  // Value of the integral for frequency x.
  std::complex<double> eval(double x) const {
    const double a = 2.0 * M_PI * x;
    std::complex<double> total = 0.0;
    for (const auto& p : panels_) {
      if (std::abs(a) * p.len < 6.0) {
        total += gauss_panel(p, x);
      } else {
        total += parts_panel(p, x, a);
      }
    }
    return total;
  }

  double lower_u() const { return u0_; }
  double upper_u() const { return u1_; }

  // Panel boundaries in u; a caller sweeping many x values can maintain
  // e(x u_m) by recurrence and use eval_with_phases below.
  std::vector<double> boundaries() const {
    std::vector<double> b;
    b.reserve(panels_.size() + 1);
    for (const auto& p : panels_) b.push_back(p.ua);
    b.push_back(panels_.back().ub);
    return b;
  }

  // Same value as eval(x), with the boundary phases bp[m] = e(x u_m)
  // supplied by the caller (panels are uniform, so a single oscillation
  // test covers all of them).
  std::complex<double> eval_with_phases(double x,
                                        const std::complex<double>* bp) const {
    const double a = 2.0 * M_PI * x;
    if (std::abs(a) * panels_.front().len < 6.0) return eval(x);
    const std::complex<double> inv_ia = 1.0 / std::complex<double>(0.0, a);
    std::complex<double> total = 0.0;
    for (std::size_t m = 0; m < panels_.size(); ++m) {
      const Panel& p = panels_[m];
      total += bp[m + 1] * parts_tail(p.db, inv_ia) -
               bp[m] * parts_tail(p.da, inv_ia);
    }
    return total;
  }

 private:
  struct Panel {
    double ua = 0.0, ub = 0.0, len = 0.0;
    // P and derivatives at both endpoints: derivs[m] = P^(m)(u).
    std::array<double, kDegree + 1> da{}, db{};
    // Chebyshev-sampled amplitude for the non-oscillatory fallback.
    std::array<double, kDegree + 1> coeff{};  // monomial, local var s in [0,1]
  };

  double amplitude(double u) const { return std::pow(u, 1.0 / c_ - 1.0) / c_; }

  void build(int panels) {
    panels_.resize(panels);
    double len = (u1_ - u0_) / panels;
    for (int i = 0; i < panels; ++i) {
      Panel& p = panels_[i];
      p.ua = u0_ + i * len;
      p.ub = (i + 1 == panels) ? u1_ : p.ua + len;
      p.len = p.ub - p.ua;
      // Chebyshev interpolation of the amplitude on the panel.
      constexpr int m = kDegree + 1;
      std::array<double, m> fv{};
      std::array<double, m> xv{};
      for (int j = 0; j < m; ++j) {
        double t = std::cos(M_PI * (j + 0.5) / m);  // in (-1, 1)
        xv[j] = 0.5 * (t + 1.0);                    // local s in (0, 1)
        fv[j] = amplitude(p.ua + xv[j] * p.len);
      }
      p.coeff = newton_to_monomial(xv, fv);
      fill_derivatives(p);
    }
  }

  // Divided-difference interpolation converted to monomial coefficients
  // in the local variable s = (u - ua)/len.
  static std::array<double, kDegree + 1> newton_to_monomial(
      const std::array<double, kDegree + 1>& xs,
      std::array<double, kDegree + 1> fs) {
    constexpr int m = kDegree + 1;
    for (int k = 1; k < m; ++k)
      for (int j = m - 1; j >= k; --j)
        fs[j] = (fs[j] - fs[j - 1]) / (xs[j] - xs[j - k]);
    // Horner expansion of the Newton form.
    std::array<double, m> c{};
    for (int j = m - 1; j >= 0; --j) {
      for (int k = m - 1; k >= 1; --k) c[k] = c[k - 1] - xs[j] * c[k];
      c[0] = fs[j] - xs[j] * c[0];
    }
    return c;
  }

  void fill_derivatives(Panel& p) const {
    // P(s) in local coordinates; derivatives w.r.t. u carry 1/len powers.
    auto derivs_at = [&](double s, std::array<double, kDegree + 1>& out) {
      std::array<double, kDegree + 1> c = p.coeff;
      double scale = 1.0;
      for (int m = 0; m <= kDegree; ++m) {
        // Horner evaluation of the m-th derivative (in s) / m!
        double v = 0.0;
        for (int k = kDegree - m; k >= 0; --k) v = v * s + c[k + m] * binom(k + m, m);
        out[m] = v * factorial(m) * scale;
        scale /= p.len;
      }
      // restore: out[m] currently P^{(m)}_s(s) * len^{-m} ... handled above
    };
    derivs_at(0.0, p.da);
    derivs_at(1.0, p.db);
  }

  static double factorial(int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
  }
  static double binom(int n, int k) {
    double b = 1.0;
    for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
    return b;
  }

  // Integration by parts, exact for the interpolating polynomial:
  //   int P(u) e^{iau} du = [e^{iau} sum_m (-1)^m P^(m)(u) / (ia)^{m+1}]
  static std::complex<double> parts_tail(const std::array<double, kDegree + 1>& d,
                                         std::complex<double> inv_ia) {
    std::complex<double> t = 0.0;
    for (int m = kDegree; m >= 0; --m) t = (d[m] - t) * inv_ia;
    return t;  // sum_m (-1)^m d[m] (inv_ia)^{m+1}
  }

  std::complex<double> parts_panel(const Panel& p, double x, double a) const {
    const std::complex<double> inv_ia = 1.0 / std::complex<double>(0.0, a);
    std::complex<double> ea = unit_phase(frac_mul(x, {p.ua, 0.0}));
    std::complex<double> eb = unit_phase(frac_mul(x, {p.ub, 0.0}));
    return eb * parts_tail(p.db, inv_ia) - ea * parts_tail(p.da, inv_ia);
  }

  std::complex<double> gauss_panel(const Panel& p, double x) const {
    // 12-point Gauss-Legendre on the panel; at most one oscillation here.
    static const std::array<double, 6> gx = {
        0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
        0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
    static const std::array<double, 6> gw = {
        0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
        0.1600783285433462, 0.1069393259953184, 0.0471753363865118};
    std::complex<double> s = 0.0;
    double mid = 0.5 * (p.ua + p.ub), half = 0.5 * p.len;
    for (int j = 0; j < 6; ++j) {
      for (double sign : {-1.0, 1.0}) {
        double u = mid + sign * half * gx[j];
        double s_local = (u - p.ua) / p.len;
        double amp = 0.0;
        for (int k = kDegree; k >= 0; --k) amp = amp * s_local + p.coeff[k];
        s += gw[j] * amp * unit_phase(frac_mul(x, {u, 0.0}));
      }
    }
    return s * half;
  }

  double c_ = 0.0;
  double u0_ = 0.0, u1_ = 0.0;
  std::vector<Panel> panels_;
};

}  // namespace pslab
