#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "pslab/kernel.hpp"
#include "pslab/quadrature.hpp"

using namespace pslab;

namespace {

// Independent Irwin-Hall CDF via the classical alternating sum
// F_r(t) = (1/r!) sum_k (-1)^k C(r,k) (t-k)_+^r; fine in long double
// for the small r used here.
long double ih_cdf_ref(int r, long double t) {
  if (t <= 0.0L) return 0.0L;
  if (t >= (long double)r) return 1.0L;
  long double fact = 1.0L;
  for (int i = 2; i <= r; ++i) fact *= i;
  long double s = 0.0L, binom = 1.0L;
  for (int k = 0; k <= (int)std::floor((double)t); ++k) {
    long double term = binom;
    for (int i = 0; i < r; ++i) term *= (t - k);
    s += ((k % 2) ? -term : term);
    binom = binom * (r - k) / (k + 1);
  }
  return s / fact;
}

double theta_ref(const SmoothingKernel& k, double y) {
  long double b = (long double)k.margin / k.order;
  auto cdf = [&](long double s) {
    return ih_cdf_ref(k.order, s / (2.0L * b) + 0.5L * k.order);
  };
  return (double)(cdf(y + k.half_width) - cdf(y - k.half_width));
}

}  // namespace

TEST_CASE("build_kernel validates its shape parameters") {
  auto k = build_kernel(7.0 / 8.0, 1.0 / 8.0, 3);
  CHECK(k.support() == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(k.plateau() == Catch::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(build_kernel(1.0, 0.3, 3), std::invalid_argument);  // d_k >= a/4
  CHECK_THROWS_AS(build_kernel(1.0, 0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_kernel(1.0, 0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_kernel(1.0, 0.1, 65), std::invalid_argument);
}

TEST_CASE("theta: plateau, support, midpoint, symmetry") {
  for (int r = 1; r <= 8; ++r) {
    auto k = build_kernel(7.0 / 8.0, 1.0 / 8.0, r);
    CHECK(theta(k, 0.0) == 1.0);
    CHECK(theta(k, 0.75) == 1.0);
    CHECK(theta(k, -0.75) == 1.0);
    CHECK(theta(k, 1.0) == 0.0);
    CHECK(theta(k, -1.0) == 0.0);
    CHECK(theta(k, 3.0) == 0.0);
    // theta(a) = 1/2 for every r: the ramp is antisymmetric about a
    CHECK(theta(k, k.half_width) == Catch::Approx(0.5).margin(1e-12));
    CHECK(theta(k, -k.half_width) == Catch::Approx(0.5).margin(1e-12));
    for (int i = 0; i <= 200; ++i) {
      double y = -1.1 + 2.2 * i / 200.0;
      double v = theta(k, y);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(theta(k, -y) == Catch::Approx(v).margin(1e-14));
      CHECK(v == Catch::Approx(theta_ref(k, y)).margin(1e-12));
    }
  }
}

TEST_CASE("theta r=1 is the trapezoid") {
  auto k = build_kernel(0.875, 0.125, 1);
  // linear ramp from (0.75, 1) to (1.0, 0)
  for (int i = 0; i <= 50; ++i) {
    double y = 0.75 + 0.25 * i / 50.0;
    CHECK(theta(k, y) == Catch::Approx((1.0 - y) / 0.25).margin(1e-13));
  }
}

namespace {

// Oscillation-safe quadrature: panels no longer than a quarter period,
// adaptive Simpson inside each, so the oracle cannot alias at large x.
template <typename F>
double quad_osc(const F& f, double lo, double hi, double x) {
  int panels = std::max(8, (int)std::ceil(8.0 * std::abs(x) * (hi - lo)));
  double total = 0.0, h = (hi - lo) / panels;
  for (int i = 0; i < panels; ++i)
    total += adaptive_simpson(f, lo + i * h, lo + (i + 1) * h, 1e-13 / panels);
  return total;
}

}  // namespace

TEST_CASE("theta_hat closed form vs quadrature of theta") {
  for (int r = 1; r <= 6; ++r) {
    auto k = build_kernel(0.875, 0.125, r);
    CHECK(theta_hat(k, 0.0) == 2.0 * k.half_width);
    for (double x : {0.0, 0.01, 0.3, 1.0, 3.7, 17.0, 240.0}) {
      double direct = quad_osc(
          [&](double y) { return theta(k, y) * std::cos(2.0 * M_PI * x * y); },
          -k.support(), k.support(), x);
      CHECK(theta_hat(k, x) == Catch::Approx(direct).margin(1e-8));
      CHECK(theta_hat(k, -x) == theta_hat(k, x));  // even, real transform
      // the imaginary part of the transform vanishes by symmetry
      double imag = quad_osc(
          [&](double y) { return theta(k, y) * std::sin(2.0 * M_PI * x * y); },
          -k.support(), k.support(), x);
      CHECK(imag == Catch::Approx(0.0).margin(1e-8));
    }
  }
}

TEST_CASE("theta_hat_bound is a true envelope") {
  for (int r : {1, 2, 3, 6, 12, 40, 64}) {
    auto k = build_kernel(0.875, 0.125, r);
    for (int i = 0; i < 10000; ++i) {
      double x = std::pow(10.0, -3.0 + 9.0 * i / 9999.0);
      double b = theta_hat_bound(k, x);
      CHECK(std::abs(theta_hat(k, x)) <= b * (1.0 + 1e-12));
      CHECK(b <= 2.0 * k.half_width * (1.0 + 1e-15));
    }
    CHECK(theta_hat_bound(k, 0.0) == 2.0 * k.half_width);
  }
}

TEST_CASE("theta_hat_bound matches its formula at moderate x") {
  auto k = build_kernel(0.875, 0.125, 3);
  double x = 50.0;
  double direct = (1.0 / x) * std::pow(3.0 / (x * 0.125), 3);
  CHECK(theta_hat_bound(k, x) == Catch::Approx(direct).epsilon(1e-12));
  // small x: the min with 2a kicks in, no overflow through the log path
  CHECK(theta_hat_bound(k, 1e-300) == 2.0 * k.half_width);
}

TEST_CASE("verify_lemma1 report") {
  auto k = build_kernel(0.875, 0.125, 4);
  std::vector<double> grid;
  for (int i = 0; i < 2000; ++i)
    grid.push_back(std::pow(10.0, -3.0 + 9.0 * i / 1999.0));
  auto rep = verify_lemma1(k, grid);
  CHECK(rep.ratio_defined);
  CHECK(rep.max_ratio <= 1.0 + 1e-12);
  CHECK(rep.quadrature_gap <= 1e-8);

  auto empty = verify_lemma1(k, {});
  CHECK_FALSE(empty.ratio_defined);
}

TEST_CASE("scaled kernels keep the closed form") {
  // desk shape: a = 7 Delta / 8, d_k = Delta / 8
  double width = 0.1;
  auto k = build_kernel(0.875 * width, 0.125 * width, 5);
  CHECK(theta(k, 0.0) == 1.0);
  CHECK(theta(k, width) == 0.0);
  CHECK(theta(k, k.half_width) == Catch::Approx(0.5).margin(1e-12));
  double x = 7.3;
  double direct = quad_osc(
      [&](double y) { return theta(k, y) * std::cos(2.0 * M_PI * x * y); },
      -k.support(), k.support(), x);
  CHECK(theta_hat(k, x) == Catch::Approx(direct).margin(1e-9));
}
