#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "pslab/numeric.hpp"
#include "pslab/primes.hpp"

// Rosser-Iwaniec linear-sieve weights of level D over the odd primes
// below z, the summary quantities (frak P, frak N+-, f, F), and the
// collapse of the divisor double sum into per-prime integer weights.

namespace pslab {

constexpr double kEulerGamma = 0.57721566490153286;

struct RosserWeights {
  double level = 0.0;  // D
  double z = 0.0;
  std::vector<std::uint32_t> sieve_primes;  // odd primes < z, ascending
  // Supported squarefree odd d | P(z), d <= D, with factors descending.
  struct Entry {
    std::uint64_t d = 1;
    std::vector<std::uint32_t> factors;  // descending
    int mu = 1;
    int lam_plus = 0;
    int lam_minus = 0;
  };
  std::vector<Entry> entries;  // sorted by d
  std::unordered_map<std::uint64_t, std::int8_t> plus;   // d -> lambda+
  std::unordered_map<std::uint64_t, std::int8_t> minus;  // d -> lambda-

  int lam(std::uint64_t d, bool upper) const {
    const auto& m = upper ? plus : minus;
    auto it = m.find(d);
    return it == m.end() ? 0 : it->second;
  }
};

namespace detail {

// beta = 2 combinatorial support conditions, factors descending.
inline bool rosser_plus_ok(const std::vector<std::uint32_t>& f, double D) {
  double prod = 1.0;
  for (std::size_t i = 0; i < f.size(); i += 2) {
    // i = 2l: check p_1...p_{2l} * p_{2l+1}^3 <= D
    double p = f[i];
    if (prod * p * p * p > D) return false;
    prod *= p;
    if (i + 1 < f.size()) prod *= f[i + 1];
  }
  return true;
}

inline bool rosser_minus_ok(const std::vector<std::uint32_t>& f, double D) {
  double prod = 1.0;
  for (std::size_t i = 1; i < f.size(); i += 2) {
    // i = 2l - 1: check p_1...p_{2l-1} * p_{2l}^3 <= D
    prod *= f[i - 1];
    double p = f[i];
    if (prod * p * p * p > D) return false;
    prod *= p;
  }
  return true;
}

}  // namespace detail

inline RosserWeights build_rosser(double D, double z) {
  if (!(z >= 2.0)) throw std::invalid_argument("build_rosser: need z >= 2");
  if (z > 200.0)
    throw std::length_error("build_rosser: z > 200 exceeds divisor budget");
  RosserWeights w;
  w.level = D;
  w.z = z;
  for (auto p : primes_below(static_cast<std::uint64_t>(std::ceil(z))))
    if (p > 2 && static_cast<double>(p) < z)
      w.sieve_primes.push_back(static_cast<std::uint32_t>(p));

  // DFS over squarefree products of descending odd primes < z, pruned at D.
  std::vector<std::uint32_t> stack;
  auto emit = [&](std::uint64_t d) {
    RosserWeights::Entry e;
    e.d = d;
    e.factors = stack;
    e.mu = (stack.size() % 2 == 0) ? 1 : -1;
    e.lam_plus = detail::rosser_plus_ok(stack, D) ? e.mu : 0;
    e.lam_minus = detail::rosser_minus_ok(stack, D) ? e.mu : 0;
    w.entries.push_back(std::move(e));
  };
  // descending index DFS: extend with primes smaller than the last factor
  std::function<void(std::size_t, std::uint64_t)> dfs =
      [&](std::size_t max_idx, std::uint64_t d) {
        emit(d);
        for (std::size_t i = max_idx; i-- > 0;) {
          std::uint64_t nd = d * w.sieve_primes[i];
          if (static_cast<double>(nd) > D) continue;
          stack.push_back(w.sieve_primes[i]);
          dfs(i, nd);
          stack.pop_back();
        }
      };
  dfs(w.sieve_primes.size(), 1);

  std::sort(w.entries.begin(), w.entries.end(),
            [](const auto& a, const auto& b) { return a.d < b.d; });
  for (const auto& e : w.entries) {
    if (e.lam_plus) w.plus[e.d] = static_cast<std::int8_t>(e.lam_plus);
    if (e.lam_minus) w.minus[e.d] = static_cast<std::int8_t>(e.lam_minus);
  }
  return w;
}

// The three divisor sums of the sandwich property for squarefree n | P(z).
struct SandwichTriple {
  long long lower = 0, middle = 0, upper = 0;
};

inline SandwichTriple sandwich_check(const RosserWeights& w, std::uint64_t n) {
  // factor n over the sieve primes; reject anything else
  std::vector<std::uint32_t> factors;
  std::uint64_t m = n;
  for (auto p : w.sieve_primes) {
    if (m % p == 0) {
      m /= p;
      if (m % p == 0)
        throw std::domain_error("sandwich_check: n not squarefree");
      factors.push_back(p);
    }
  }
  if (m != 1) throw std::domain_error("sandwich_check: n does not divide P(z)");

  SandwichTriple t;
  std::size_t k = factors.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << k); ++mask) {
    std::uint64_t d = 1;
    int bits = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1) {
        d *= factors[i];
        ++bits;
      }
    t.lower += w.lam(d, false);
    t.middle += (bits % 2 == 0) ? 1 : -1;
    t.upper += w.lam(d, true);
  }
  return t;
}

struct SieveSummary {
  double frak_p = 0.0;       // product over 2 < p < z of (1 - 1/(p-1))
  double frak_n_plus = 0.0;  // sum lambda+(d)/phi(d)
  double frak_n_minus = 0.0;
  double s0 = 0.0;
  double f_s0 = 0.0;  // NaN when s0 outside [2, 3]
  double big_f_s0 = 0.0;
  bool fs_defined = false;
};

// Linear-sieve functions, defined on 2 <= s <= 3 only.
inline double linear_sieve_f(double s) {
  if (!(s >= 2.0 && s <= 3.0))
    throw std::domain_error("linear_sieve_f: s outside [2, 3]");
  return 2.0 * std::exp(kEulerGamma) / s * std::log(s - 1.0);
}

inline double linear_sieve_F(double s) {
  if (!(s >= 2.0 && s <= 3.0))
    throw std::domain_error("linear_sieve_F: s outside [2, 3]");
  return 2.0 * std::exp(kEulerGamma) / s;
}

inline SieveSummary frak_values(const RosserWeights& w) {
  SieveSummary s;
  s.frak_p = 1.0;
  for (auto p : w.sieve_primes) s.frak_p *= 1.0 - 1.0 / (p - 1.0);

  Accum np, nm;
  for (const auto& e : w.entries) {
    double phi = 1.0;
    for (auto p : e.factors) phi *= p - 1.0;
    if (e.lam_plus) np.add(e.lam_plus / phi);
    if (e.lam_minus) nm.add(e.lam_minus / phi);
  }
  s.frak_n_plus = np.value();
  s.frak_n_minus = nm.value();
  s.s0 = std::log(w.level) / std::log(w.z);
  if (s.s0 >= 2.0 && s.s0 <= 3.0) {
    s.f_s0 = linear_sieve_f(s.s0);
    s.big_f_s0 = linear_sieve_F(s.s0);
    s.fs_defined = true;
  } else {
    s.f_s0 = s.big_f_s0 = std::nan("");
  }
  return s;
}

// Collapsed per-prime weights: w+-(p) = sum of lambda+-(d) over
// d | gcd(p+2, P(z)), d <= D.  Exact integers.
inline void collapse_weights(const RosserWeights& w, PrimeTable& t) {
  t.w_plus.assign(t.size(), 0);
  t.w_minus.assign(t.size(), 0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& fs = t.small_factors_p2[i];
    int wp = 0, wm = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << fs.size());
         ++mask) {
      std::uint64_t d = 1;
      for (std::size_t j = 0; j < fs.size(); ++j)
        if (mask >> j & 1) d *= fs[j];
      if (static_cast<double>(d) > w.level) continue;
      wp += w.lam(d, true);
      wm += w.lam(d, false);
    }
    t.w_plus[i] = wp;
    t.w_minus[i] = wm;
  }
}

// Right side of the triple-product lower bound:
// L1-L2+L3+ + L1+L2-L3+ + L1+L2+L3- - 2 L1+L2+L3+.
inline double lemma3_lower(const std::array<double, 3>& lm,
                           const std::array<double, 3>& lp) {
  return lm[0] * lp[1] * lp[2] + lp[0] * lm[1] * lp[2] +
         lp[0] * lp[1] * lm[2] - 2.0 * lp[0] * lp[1] * lp[2];
}

}  // namespace pslab
