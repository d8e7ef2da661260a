#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pslab/numeric.hpp"

// Prime enumeration and von Mangoldt machinery: segmented sieve,
// Omega(p+2) via shifted smallest-prime-factor sieving, the sieve
// condition (n, P(z)) = 1, Chebyshev functions and the
// arithmetic-progression error terms feeding the Bombieri-Vinogradov sum.

namespace pslab {

// Simple primes up to n (odd-only Eratosthenes), for base primes and oracles.
inline std::vector<std::uint64_t> primes_below(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  if (n <= 2) return out;
  out.push_back(2);
  std::uint64_t m = (n - 1) / 2;  // odd candidates 3, 5, ..., <= n-1
  std::vector<char> composite(m + 1, 0);
  for (std::uint64_t i = 1; i <= m; ++i) {
    std::uint64_t p = 2 * i + 1;
    if (composite[i]) continue;
    if (p * p < n)
      for (std::uint64_t j = (p * p - 1) / 2; j <= m; j += p) composite[j] = 1;
  }
  for (std::uint64_t i = 1; i <= m; ++i)
    if (!composite[i] && 2 * i + 1 < n) out.push_back(2 * i + 1);
  return out;
}

// Exact primes in (lo, hi], segmented with odd-only bit storage.
inline std::vector<std::uint64_t> sieve_range(double lo_d, double hi_d) {
  if (!(lo_d >= 2.0 && lo_d < hi_d && hi_d <= 9007199254740992.0 /* 2^53 */))
    throw std::invalid_argument("sieve_range: need 2 <= lo < hi <= 2^53");
  std::uint64_t lo = static_cast<std::uint64_t>(std::floor(lo_d));
  std::uint64_t hi = static_cast<std::uint64_t>(std::floor(hi_d));
  if (hi - lo > (std::uint64_t(1) << 33))
    throw std::length_error("sieve_range: range exceeds memory budget");

  std::vector<std::uint64_t> out;
  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt((double)hi)) + 2;
  auto base = primes_below(root + 1);

  if (2 > lo_d && 2 <= hi_d) out.push_back(2);

  constexpr std::uint64_t kSegment = 1 << 18;  // odd numbers per segment
  std::uint64_t first = lo + 1;  // range is (lo, hi]
  if (first % 2 == 0) ++first;
  if (first < 3) first = 3;

  for (std::uint64_t seg_lo = first; seg_lo <= hi; seg_lo += 2 * kSegment) {
    std::uint64_t seg_hi = std::min(hi, seg_lo + 2 * kSegment - 2);
    std::uint64_t count = (seg_hi - seg_lo) / 2 + 1;
    std::vector<char> sieve(count, 1);
    for (std::size_t i = 1; i < base.size(); ++i) {  // skip 2
      std::uint64_t p = base[i];
      if (p * p > seg_hi) break;
      std::uint64_t start = std::max(p * p, ((seg_lo + p - 1) / p) * p);
      if (start % 2 == 0) start += p;
      for (std::uint64_t j = start; j <= seg_hi; j += 2 * p)
        sieve[(j - seg_lo) / 2] = 0;
    }
    for (std::uint64_t i = 0; i < count; ++i)
      if (sieve[i]) out.push_back(seg_lo + 2 * i);
  }
  return out;
}

// Omega(n): number of prime factors with multiplicity.
inline int omega_multiplicity(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("omega_multiplicity: n >= 1");
  int count = 0;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2))
    while (n % p == 0) {
      n /= p;
      ++count;
    }
  if (n > 1) ++count;
  return count;
}

// True iff n has no odd prime factor below z (2 is permitted: P(z) is odd).
inline bool coprime_to_pz(std::uint64_t n, double z) {
  if (n == 0 || !(z >= 3.0))
    throw std::invalid_argument("coprime_to_pz: need n >= 1, z >= 3");
  while (n % 2 == 0) n /= 2;
  for (std::uint64_t p = 3; static_cast<double>(p) < z && p * p <= n; p += 2) {
    if (n % p == 0) return false;
  }
  // A remaining prime factor itself may still lie below z.
  if (n > 1 && static_cast<double>(n) < z) return false;
  return true;
}

// Prime table over (lo, hi] with log weights, Omega(p+2), and the odd
// prime factors of p+2 below z (the divisor support of gcd(p+2, P(z))).
struct PrimeTable {
  double lo = 0.0, hi = 0.0;
  double spf_bound = 0.0;  // the z used for the shifted factor sieve
  std::vector<std::uint64_t> primes;
  std::vector<double> logp;
  std::vector<int> omega_p2;
  std::vector<std::vector<std::uint32_t>> small_factors_p2;  // odd, < z
  // Collapsed sieve weights, filled by rosser::collapse_weights.
  std::vector<int> w_plus;
  std::vector<int> w_minus;

  std::size_t size() const { return primes.size(); }
};

inline PrimeTable build_prime_table(double lo, double hi, double z) {
  PrimeTable t;
  t.lo = lo;
  t.hi = hi;
  t.spf_bound = z;
  t.primes = sieve_range(lo, hi);
  t.logp.reserve(t.primes.size());
  for (auto p : t.primes) t.logp.push_back(std::log((double)p));
  t.small_factors_p2.assign(t.primes.size(), {});
  t.omega_p2.assign(t.primes.size(), 0);
  if (t.primes.empty()) return t;

  // Factor p+2 for every p in the table by sieving the shifted range.
  std::uint64_t shift_lo = t.primes.front() + 2;
  std::uint64_t shift_hi = t.primes.back() + 2;
  std::vector<std::uint64_t> residue(t.primes.size());
  for (std::size_t i = 0; i < t.primes.size(); ++i)
    residue[i] = t.primes[i] + 2;

  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt((double)shift_hi)) + 2;
  auto base = primes_below(root + 1);
  // Index of table entries by shifted value for the strided walk.
  // Shifted values are sparse; walk primes q over the range directly.
  for (auto q : base) {
    // Locate table entries with q | p+2 via binary search on p = kq - 2.
    std::uint64_t start = ((shift_lo + q - 1) / q) * q;
    for (std::uint64_t m = start; m <= shift_hi; m += q) {
      std::uint64_t p = m - 2;
      auto it = std::lower_bound(t.primes.begin(), t.primes.end(), p);
      if (it == t.primes.end() || *it != p) continue;
      std::size_t idx = static_cast<std::size_t>(it - t.primes.begin());
      int mult = 0;
      while (residue[idx] % q == 0) {
        residue[idx] /= q;
        ++mult;
      }
      t.omega_p2[idx] += mult;
      if (q % 2 == 1 && static_cast<double>(q) < z)
        t.small_factors_p2[idx].push_back(static_cast<std::uint32_t>(q));
    }
  }
  for (std::size_t i = 0; i < t.primes.size(); ++i) {
    if (residue[i] > 1) {
      t.omega_p2[i] += 1;  // one prime factor above sqrt(hi+2)
      if (residue[i] % 2 == 1 && static_cast<double>(residue[i]) < z)
        t.small_factors_p2[i].push_back(
            static_cast<std::uint32_t>(residue[i]));
    }
  }
  return t;
}

inline bool table_passes_sieve(const PrimeTable& t, std::size_t i) {
  return t.small_factors_p2[i].empty();
}

struct ChebyshevQuery {
  double y = 0.0;
  std::uint64_t k = 1;
  std::uint64_t l = 0;
};

// psi(y) = sum of Lambda(n) over n <= y.
inline double chebyshev_psi(double y) {
  if (!(y >= 2.0)) throw std::invalid_argument("chebyshev_psi: y >= 2");
  auto ps = primes_below(std::floor(y) + 1);
  Accum acc;
  for (auto p : ps) {
    double lp = std::log((double)p);
    for (double pk = (double)p; pk <= y; pk *= (double)p) acc.add(lp);
  }
  return acc.value();
}

inline double chebyshev_psi_mod(const ChebyshevQuery& q) {
  if (!(q.y >= 2.0) || q.k < 1 || q.l >= q.k)
    throw std::invalid_argument("chebyshev_psi_mod: bad query");
  auto ps = primes_below(std::floor(q.y) + 1);
  Accum acc;
  for (auto p : ps) {
    double lp = std::log((double)p);
    std::uint64_t pk = p;
    for (;;) {
      if (pk % q.k == q.l) acc.add(lp);
      if ((double)pk * (double)p > q.y) break;
      pk *= p;
    }
  }
  return acc.value();
}

inline std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t result = n;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2))
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  if (n > 1) result -= result / n;
  return result;
}

// Delta(y, k, l) = psi(y, k, l) - y / phi(k), for gcd(l, k) = 1.
inline double delta_error(const ChebyshevQuery& q) {
  if (std::gcd(q.k, q.l) != 1)
    throw std::domain_error("delta_error: gcd(l, k) must be 1");
  return chebyshev_psi_mod(q) - q.y / (double)euler_phi(q.k);
}

// Bombieri-Vinogradov style sum: sum over d <= Q of
// max_{y <= x} max_{(l,d)=1} |Delta(y, d, l)|.  Exact finite computation;
// the sup over y is realized at prime-power jump points and at y = x.
inline double bv_sum(double x, double Q) {
  if (!(x >= 10.0 && Q >= 2.0))
    throw std::invalid_argument("bv_sum: need x >= 10, Q >= 2");
  auto ps = primes_below(std::floor(x) + 1);
  // Jump points (prime powers <= x) with their Lambda values, sorted.
  std::vector<std::pair<std::uint64_t, double>> jumps;
  for (auto p : ps) {
    double lp = std::log((double)p);
    for (std::uint64_t pk = p;; pk *= p) {
      jumps.emplace_back(pk, lp);
      if ((double)pk * (double)p > x) break;
    }
  }
  std::sort(jumps.begin(), jumps.end());

  Accum total;
  for (std::uint64_t d = 2; (double)d <= Q; ++d) {
    double phi = (double)euler_phi(d);
    double best = 0.0;
    for (std::uint64_t l = 0; l < d; ++l) {
      if (std::gcd(d, l) != 1) continue;
      double psi = 0.0, m = 0.0;
      for (const auto& [pk, lam] : jumps) {
        // just below the jump: psi unchanged, y -> pk
        m = std::max(m, std::abs(psi - (double)pk / phi));
        if (pk % d == l) psi += lam;
        m = std::max(m, std::abs(psi - (double)pk / phi));
      }
      m = std::max(m, std::abs(psi - x / phi));
      best = std::max(best, m);
    }
    total.add(best);
  }
  return total.value();
}

}  // namespace pslab
