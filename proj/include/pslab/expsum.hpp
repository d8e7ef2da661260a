#pragma once

#include <quadmath.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "pslab/numeric.hpp"
#include "pslab/params.hpp"
#include "pslab/primes.hpp"
#include "pslab/quadrature.hpp"
#include "pslab/rosser.hpp"

// Exponential sums over primes and the oscillatory integral I(x),
// Vaughan's identity decomposition, and the van der Corput inequality
// harness.

namespace pslab {

using cdouble = std::complex<double>;

// n^c as a double-double, accurate enough that x * n^c mod 1 keeps
// ~1e-17 absolute error for phases up to 2^50.
inline DD power_dd(std::uint64_t n, double c) {
  __float128 v = powq(static_cast<__float128>(n), static_cast<__float128>(c));
  return dd_from_quad(v);
}

inline std::vector<DD> power_phases(const PrimeTable& t, double c) {
  std::vector<DD> out;
  out.reserve(t.size());
  for (auto p : t.primes) out.push_back(power_dd(p, c));
  return out;
}

enum class WeightMode { plus, minus, moebius, unsieved };

struct SumSpec {
  const ProblemInstance* instance = nullptr;
  const PrimeTable* table = nullptr;
  WeightMode weight_mode = WeightMode::unsieved;
  double x = 0.0;
};

inline double table_weight(const PrimeTable& t, std::size_t i, WeightMode m) {
  switch (m) {
    case WeightMode::plus:
      return static_cast<double>(t.w_plus[i]);
    case WeightMode::minus:
      return static_cast<double>(t.w_minus[i]);
    case WeightMode::moebius:
      return table_passes_sieve(t, i) ? 1.0 : 0.0;
    case WeightMode::unsieved:
      return 1.0;
  }
  return 0.0;
}

// L(x) = sum over primes of log p * w(p) * e(x p^c), with w per mode.
inline cdouble L_sum(const SumSpec& s, const std::vector<DD>& phases) {
  const PrimeTable& t = *s.table;
  if ((s.weight_mode == WeightMode::plus ||
       s.weight_mode == WeightMode::minus) &&
      t.w_plus.size() != t.size())
    throw std::logic_error("L_sum: collapsed weights not filled");
  std::vector<cdouble> terms(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    double w = table_weight(t, i, s.weight_mode);
    terms[i] = (w == 0.0) ? cdouble{}
                          : w * t.logp[i] * osc(s.x, phases[i]);
  }
  return pairwise_sum(terms);
}

inline cdouble L_sum(const SumSpec& s) {
  auto phases = power_phases(*s.table, s.instance->c);
  return L_sum(s, phases);
}

// Prime powers n in (lo, hi] with Lambda(n) = log p, ascending in n.
inline std::vector<std::pair<std::uint64_t, double>> mangoldt_support(
    double lo, double hi) {
  std::vector<std::pair<std::uint64_t, double>> out;
  auto ps = primes_below(std::floor(hi) + 1);
  for (auto p : ps) {
    double lp = std::log((double)p);
    for (double nk = (double)p; nk <= hi; nk *= (double)p) {
      if (nk > lo) out.emplace_back(static_cast<std::uint64_t>(nk + 0.5), lp);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// S(x, d) = sum over n in (mu X, X], d | n+2, of Lambda(n) e(x n^c).
inline cdouble S_xd(double x, std::uint64_t d, const ProblemInstance& inst) {
  if (d < 1) throw std::invalid_argument("S_xd: d >= 1");
  auto support = mangoldt_support(inst.mu * inst.x, inst.x);
  std::vector<cdouble> terms;
  terms.reserve(support.size());
  for (const auto& [n, lam] : support) {
    if ((n + 2) % d != 0) continue;
    terms.push_back(lam * osc(x, power_dd(n, inst.c)));
  }
  return pairwise_sum(terms);
}

// Y(X) = S(x, 1): the full von Mangoldt exponential sum.
inline cdouble Y_X(const ProblemInstance& inst, double x) {
  return S_xd(x, 1, inst);
}

struct IntegralResult {
  cdouble value{};
  double error_estimate = 0.0;
  bool converged = true;
  int panels = 0;
};

// I(x) = int_{mu X}^{X} e(x t^c) dt via the Filon-type rule; panel count
// is doubled until the two finest results agree within tol * (X - mu X).
inline IntegralResult I_integral(const ProblemInstance& inst, double x,
                                 double tol = 1e-10) {
  if (!(tol > 0.0)) throw std::invalid_argument("I_integral: tol > 0");
  const double lo = inst.mu * inst.x, hi = inst.x;
  double target = tol * (hi - lo);
  int panels = 16;
  OscillatoryLineIntegral coarse(lo, hi, inst.c, panels);
  cdouble prev = coarse.eval(x);
  for (; panels <= 1024; panels *= 2) {
    OscillatoryLineIntegral fine(lo, hi, inst.c, panels * 2);
    cdouble cur = fine.eval(x);
    double err = std::abs(cur - prev);
    if (err <= target)
      return {cur, err, true, panels * 2};
    prev = cur;
  }
  return {prev, std::abs(prev) * 1e-3, false, panels};
}

// ---------------------------------------------------------------------------
// Vaughan's identity

struct VaughanParts {
  cdouble s1{}, s2{}, s2_prime{}, s2_doubleprime{}, s3{};
  cdouble lambda_sum{};  // sum of Lambda(n) f(n), computed directly
  double residual = 0.0;  // |S1 - S2 - S3 - lambda_sum|
  std::uint64_t cutoff = 0;  // v = floor(X^{1/3})
  std::vector<double> a_coeff;  // a(k), indexed from 0; zero for k <= v
  std::vector<double> c_coeff;  // c(k), indexed from 0
  double a(std::uint64_t k) const {
    return k < a_coeff.size() ? a_coeff[k] : 0.0;
  }
  double c(std::uint64_t k) const {
    return k < c_coeff.size() ? c_coeff[k] : 0.0;
  }
};

// Moebius values 0..n by sieving.
inline std::vector<int> moebius_table(std::uint64_t n) {
  std::vector<int> mu(n + 1, 1);
  std::vector<std::uint64_t> spf(n + 1, 0);
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (spf[i] == 0)
      for (std::uint64_t j = i; j <= n; j += i)
        if (spf[j] == 0) spf[j] = i;
  }
  mu[0] = 0;
  for (std::uint64_t i = 2; i <= n; ++i) {
    std::uint64_t p = spf[i], q = i / p;
    mu[i] = (q % p == 0) ? 0 : -mu[q];
  }
  return mu;
}

// Exact decomposition  sum Lambda(n) f(n) = S1 - S2 - S3  over (mu X, X],
// with the standard u = v = X^{1/3} arrangement.  Requires mu X > X^{1/3}.
inline VaughanParts vaughan_decompose(
    const ProblemInstance& inst, const std::function<cdouble(std::uint64_t)>& f) {
  const double X = inst.x, lo = inst.mu * inst.x;
  const std::uint64_t v = static_cast<std::uint64_t>(std::cbrt(X));
  const std::uint64_t v2 = static_cast<std::uint64_t>(std::floor(
      std::pow(X, 2.0 / 3.0) + 1e-9));
  if (!(lo > static_cast<double>(v)))
    throw std::invalid_argument("vaughan_decompose: need mu X > X^{1/3}");

  VaughanParts out;
  out.cutoff = v;
  auto mu_tab = moebius_table(v2);

  // Lambda(l) for l <= X / v (bounded by v2 + slack).
  std::uint64_t lam_limit = static_cast<std::uint64_t>(X / 2) + 2;
  lam_limit = std::min<std::uint64_t>(lam_limit,
                                      static_cast<std::uint64_t>(X) + 2);
  auto lam_support = mangoldt_support(0.5, static_cast<double>(lam_limit));
  std::vector<double> lam(lam_limit + 1, 0.0);
  for (auto& [n, lp] : lam_support)
    if (n <= lam_limit) lam[n] = lp;

  // c(k) = sum over d m = k, d <= v, m <= v of mu(d) Lambda(m).
  out.c_coeff.assign(v2 + 1, 0.0);
  for (std::uint64_t d = 1; d <= v; ++d) {
    if (mu_tab[d] == 0) continue;
    for (std::uint64_t m = 2; m <= v; ++m) {
      if (lam[m] == 0.0) continue;
      std::uint64_t k = d * m;
      if (k <= v2) out.c_coeff[k] += mu_tab[d] * lam[m];
    }
  }
  // a(k) = sum over b | k, b <= v of mu(b); only needed for v < k <= v2.
  out.a_coeff.assign(v2 + 1, 0.0);
  for (std::uint64_t b = 1; b <= v; ++b) {
    if (mu_tab[b] == 0) continue;
    for (std::uint64_t k = b; k <= v2; k += b) out.a_coeff[k] += mu_tab[b];
  }

  auto inner_range = [&](std::uint64_t k, std::uint64_t& l_lo,
                         std::uint64_t& l_hi) {
    l_lo = static_cast<std::uint64_t>(std::floor(lo / k)) + 1;
    l_hi = static_cast<std::uint64_t>(std::floor(X / k));
  };

  std::vector<cdouble> t1, t2, t2p, t2pp, t3;
  for (std::uint64_t k = 1; k <= v; ++k) {
    if (mu_tab[k] == 0) continue;
    std::uint64_t a, b;
    inner_range(k, a, b);
    for (std::uint64_t l = a; l <= b; ++l)
      t1.push_back(static_cast<double>(mu_tab[k]) * std::log((double)l) *
                   f(k * l));
  }
  for (std::uint64_t k = 2; k <= v2; ++k) {
    double ck = out.c_coeff[k];
    if (ck == 0.0) continue;
    std::uint64_t a, b;
    inner_range(k, a, b);
    for (std::uint64_t l = a; l <= b; ++l) {
      cdouble term = ck * f(k * l);
      t2.push_back(term);
      (k <= v ? t2p : t2pp).push_back(term);
    }
  }
  for (std::uint64_t k = v + 1; k <= v2; ++k) {
    double ak = out.a_coeff[k];
    if (ak == 0.0) continue;
    std::uint64_t a, b;
    inner_range(k, a, b);
    for (std::uint64_t l = std::max(a, v + 1); l <= b; ++l) {
      if (lam[l] == 0.0) continue;
      t3.push_back(ak * lam[l] * f(k * l));
    }
  }
  out.s1 = pairwise_sum(t1);
  out.s2 = pairwise_sum(t2);
  out.s2_prime = pairwise_sum(t2p);
  out.s2_doubleprime = pairwise_sum(t2pp);
  out.s3 = pairwise_sum(t3);

  std::vector<cdouble> direct;
  for (auto& [n, lp] : mangoldt_support(lo, X)) direct.push_back(lp * f(n));
  out.lambda_sum = pairwise_sum(direct);
  out.residual = std::abs(out.s1 - out.s2 - out.s3 - out.lambda_sum);
  return out;
}

// ---------------------------------------------------------------------------
// Lemma-10 style empirical residual report

struct ResidualReport {
  cdouble l_value{};
  double weight_sum_over_phi = 0.0;  // sum lambda(d)/phi(d)
  cdouble i_value{};
  double i_error = 0.0;
  double residual = 0.0;  // |L(x) - (sum lambda/phi) I(x)|
  std::map<int, double> ratio_by_a;  // residual / (X (log X)^{-A})
};

inline ResidualReport lemma10_residual(const ProblemInstance& inst,
                                       const RosserWeights& w,
                                       const PrimeTable& t, WeightMode mode,
                                       double x,
                                       const std::vector<int>& a_values = {1, 2,
                                                                           3}) {
  if (!(std::abs(x) < inst.tau))
    throw std::invalid_argument("lemma10_residual: need |x| < tau");
  SumSpec s{&inst, &t, mode, x};
  cdouble L = L_sum(s);

  Accum sum;
  for (const auto& e : w.entries) {
    int lam = 0;
    switch (mode) {
      case WeightMode::plus: lam = e.lam_plus; break;
      case WeightMode::minus: lam = e.lam_minus; break;
      case WeightMode::moebius: lam = e.mu; break;
      case WeightMode::unsieved: lam = (e.d == 1) ? 1 : 0; break;
    }
    if (lam == 0) continue;
    double phi = 1.0;
    for (auto p : e.factors) phi *= p - 1.0;
    sum.add(lam / phi);
  }

  auto I = I_integral(inst, x);
  ResidualReport rep;
  rep.l_value = L;
  rep.weight_sum_over_phi = sum.value();
  rep.i_value = I.value;
  rep.i_error = I.error_estimate;
  rep.residual = std::abs(L - rep.weight_sum_over_phi * I.value);
  double log_x = std::log(inst.x);
  for (int a : a_values)
    rep.ratio_by_a[a] = rep.residual / (inst.x * std::pow(log_x, -a));
  return rep;
}

// ---------------------------------------------------------------------------
// van der Corput inequality check (the N + H - 1 form)

struct VdcResult {
  double lhs = 0.0;
  double rhs = 0.0;
};

inline VdcResult vdc_check(const std::vector<cdouble>& seq, std::size_t H) {
  const std::size_t n = seq.size();
  if (H < 1 || H > n) throw std::invalid_argument("vdc_check: 1 <= H <= n");
  cdouble total = pairwise_sum(seq);
  VdcResult r;
  r.lhs = std::norm(total);

  double acc = 0.0;
  for (std::size_t h = 0; h < H; ++h) {
    cdouble corr = 0.0;
    for (std::size_t l = 0; l + h < n; ++l) corr += seq[l + h] * std::conj(seq[l]);
    double weight = 1.0 - static_cast<double>(h) / H;
    // h and -h contribute conjugate correlation sums
    acc += weight * ((h == 0) ? corr.real() : 2.0 * corr.real());
  }
  r.rhs = (static_cast<double>(n) - 1.0 + H) / H * acc;
  return r;
}

}  // namespace pslab
