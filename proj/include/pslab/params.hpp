#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

// Problem-instance parameters: everything downstream is derived from
// (c, N, E) plus optional desk-scale overrides.

namespace pslab {

struct ConstraintViolation {
  std::string name;   // the violated inequality
  double lhs = 0.0;
  double rhs = 0.0;
  std::string detail;
};

struct ProblemInstance {
  double c = 0.0;       // exponent, 1 < c < 15/14 in the theorem range
  double n = 0.0;       // target N
  double e_power = 0.0; // E
  double width = 0.0;   // Delta = (log N)^{-E} unless overridden
  double x = 0.0;       // X = N^{1/c}
  double mu = 0.0;      // lower edge factor, primes in (mu X, X]
  double xi = 0.0;
  double delta = 0.0;   // sieve-level exponent
  double eta = 0.0;     // sieve-limit exponent
  double z = 0.0;       // sieve limit z = X^eta
  double level = 0.0;   // sieve level D = X^delta
  double tau = 0.0;     // tau = X^{xi - c}
  int smooth_r = 0;     // kernel order, [(log X)^2] clamped to <= 64
  double big_xi = 0.0;  // Xi = (log X)^{E+3}
  double s0 = 0.0;      // log D / log z

  bool test_mode = false;  // allows c outside (1, 15/14)
  bool forced = false;     // overrides accepted despite z^2 <= D <= z^3 failing
  bool r_clamped = false;
  std::vector<std::string> overridden;

  bool uses_overrides() const { return !overridden.empty(); }
};

// Prime-factor cap of Theorem 1: floor(369 / (180 - 168 c)).
inline int almost_prime_order(double c) {
  if (!(c > 1.0 && c < 15.0 / 14.0))
    throw std::domain_error("almost_prime_order: c outside (1, 15/14)");
  return static_cast<int>(std::floor(369.0 / (180.0 - 168.0 * c)));
}

constexpr int kKernelOrderClamp = 64;

inline ProblemInstance derive_instance(
    double c, double n, double e_power,
    const std::map<std::string, double>& overrides = {},
    bool test_mode = false, bool force = false) {
  if (n <= 1.0) throw std::invalid_argument("derive_instance: N must exceed 1");
  if (!test_mode && !(c > 1.0))
    throw std::invalid_argument("derive_instance: c must exceed 1");
  if (!test_mode && n < 100.0)
    throw std::invalid_argument("derive_instance: N must be >= 100");
  if (!(e_power > 0.0))
    throw std::invalid_argument("derive_instance: E must be positive");

  ProblemInstance inst;
  inst.c = c;
  inst.n = n;
  inst.e_power = e_power;
  inst.test_mode = test_mode;
  inst.forced = force;

  const double log_n = std::log(n);
  inst.x = std::pow(n, 1.0 / c);
  // Desk-scale runs may pin the summation range X while recentering N
  // inside (3 (mu X)^c, 3 X^c); the paper normalization is N = X^c.
  if (auto it = overrides.find("x"); it != overrides.end()) {
    inst.x = it->second;
    inst.overridden.push_back("x");
  }
  const double log_x = std::log(inst.x);

  inst.width = std::pow(log_n, -e_power);
  inst.xi = (459.0 * c - 435.0) / 125.0;
  inst.delta = (180.0 - 168.0 * c) / 125.0;
  inst.eta = inst.delta / 2.95;
  inst.mu = std::pow(0.25, 1.0 / c);

  // Exponent overrides first; quantities derived from them are then
  // recomputed before any direct overrides land.
  auto exp_override = [&](const char* key, double& field) {
    auto it = overrides.find(key);
    if (it != overrides.end()) {
      field = it->second;
      inst.overridden.push_back(key);
    }
  };
  exp_override("xi", inst.xi);
  exp_override("delta", inst.delta);
  exp_override("eta", inst.eta);
  exp_override("mu", inst.mu);

  inst.z = std::pow(inst.x, inst.eta);
  inst.level = std::pow(inst.x, inst.delta);
  inst.tau = std::pow(inst.x, inst.xi - c);
  inst.big_xi = std::pow(log_x, e_power + 3.0);

  double r_raw = std::floor(log_x * log_x);
  inst.smooth_r = static_cast<int>(std::min<double>(r_raw, kKernelOrderClamp));
  inst.r_clamped = r_raw > kKernelOrderClamp;

  for (const auto& [key, value] : overrides) {
    if (key == "delta_width")
      inst.width = value;
    else if (key == "z")
      inst.z = value;
    else if (key == "level")
      inst.level = value;
    else if (key == "tau")
      inst.tau = value;
    else if (key == "big_xi")
      inst.big_xi = value;
    else if (key == "r")
      inst.smooth_r = static_cast<int>(value);
    else if (key == "xi" || key == "delta" || key == "eta" || key == "mu" ||
             key == "x")
      continue;  // handled above
    else
      throw std::invalid_argument("derive_instance: unknown override '" + key +
                                  "'");
    inst.overridden.push_back(key);
  }

  inst.s0 = std::log(inst.level) / std::log(inst.z);

  if (!force) {
    double z2 = inst.z * inst.z, z3 = z2 * inst.z;
    bool band = inst.level >= z2 * (1.0 - 1e-12) &&
                inst.level <= z3 * (1.0 + 1e-12);
    if (!band && inst.uses_overrides())
      throw std::invalid_argument(
          "derive_instance: overrides violate z^2 <= D <= z^3 (use force)");
  }
  return inst;
}

inline std::vector<ConstraintViolation> validate(const ProblemInstance& inst) {
  std::vector<ConstraintViolation> out;
  auto check = [&](bool ok, const std::string& name, double lhs, double rhs,
                   const std::string& detail) {
    if (!ok) out.push_back({name, lhs, rhs, detail});
  };

  if (!inst.test_mode) {
    check(inst.c > 1.0, "c > 1", inst.c, 1.0, "exponent below admissible range");
    check(inst.c < 15.0 / 14.0, "c < 15/14", inst.c, 15.0 / 14.0,
          "exponent above admissible range");
  }
  check(inst.xi + 3.0 * inst.delta < 12.0 / 25.0, "xi + 3 delta < 12/25",
        inst.xi + 3.0 * inst.delta, 12.0 / 25.0, "exponent budget exceeded");
  double ratio = inst.delta / inst.eta;
  check(ratio > 2.0 && ratio < 3.0, "2 < delta/eta < 3", ratio, 0.0,
        "delta/eta=" + std::to_string(ratio) + " not in (2,3)");
  check(inst.mu > 0.0 && inst.mu < 1.0, "0 < mu < 1", inst.mu, 1.0,
        "mu outside (0,1)");
  double z2 = inst.z * inst.z, z3 = z2 * inst.z;
  check(inst.level >= z2 * (1.0 - 1e-12), "z^2 <= D", z2, inst.level,
        "sieve level below z^2");
  check(inst.level <= z3 * (1.0 + 1e-12), "D <= z^3", inst.level, z3,
        "sieve level above z^3");
  double reach = 3.0 * std::pow(inst.mu, inst.c);
  check(reach < 1.0, "3 mu^c < 1", reach, 1.0,
        "3 mu^c >= 1: N = X^c unreachable from (mu X, X]^3");
  return out;
}

}  // namespace pslab
