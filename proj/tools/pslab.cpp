// pslab: numerical laboratory for ternary additive problems with
// fractional prime powers and almost-prime shifts.
//
// Exit codes: 0 success, 1 invariant failure, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pslab/gamma.hpp"
#include "pslab/parallel.hpp"

using json = nlohmann::ordered_json;
using namespace pslab;

namespace {

// ---------------------------------------------------------------------------
// Shared instance flags / config file

struct InstanceArgs {
  double c = 0.0;
  double n = 0.0;
  double e_power = 1.0;
  bool test_mode = false;
  bool force = false;
  std::map<std::string, double> overrides;
  std::string config_path;

  bool has_c = false, has_n = false;
};

const std::vector<std::string> kOverrideKeys = {
    "x",  "delta_width", "z",   "level", "tau",
    "mu", "xi",          "delta", "eta", "big_xi", "r"};

void add_instance_flags(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("--config", a.config_path, "flat key = value config file");
  cmd->add_option("--c", a.c, "exponent c")->each([&](const std::string&) {
    a.has_c = true;
  });
  cmd->add_option("--n", a.n, "target N")->each([&](const std::string&) {
    a.has_n = true;
  });
  cmd->add_option("--e-power", a.e_power, "E in Delta = (log N)^-E");
  cmd->add_flag("--test-mode", a.test_mode, "allow c outside the theorem range");
  cmd->add_flag("--force", a.force, "accept overrides outside z^2 <= D <= z^3");
  for (const auto& key : kOverrideKeys) {
    std::string flag = "--" + key;
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    cmd->add_option_function<double>(
        flag, [&a, key](double v) { a.overrides[key] = v; },
        "override " + key);
  }
  cmd->add_option_function<std::vector<std::string>>(
      "--override",
      [&a](const std::vector<std::string>& kvs) {
        for (const auto& kv : kvs) {
          auto eq = kv.find('=');
          if (eq == std::string::npos)
            throw CLI::ValidationError("--override", "expected key=value");
          a.overrides[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        }
      },
      "override as key=value (repeatable)");
}

void load_config(InstanceArgs& a) {
  if (a.config_path.empty()) return;
  std::ifstream in(a.config_path);
  if (!in) throw CLI::ValidationError("config", "cannot open " + a.config_path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw CLI::ValidationError(
            "config", a.config_path + ":" + std::to_string(lineno) +
                          ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw CLI::ValidationError(
          "config", a.config_path + ":" + std::to_string(lineno) +
                        ": expected key = value");
    if (key == "c") {
      a.c = std::stod(val);
      a.has_c = true;
    } else if (key == "n") {
      a.n = std::stod(val);
      a.has_n = true;
    } else if (key == "e_power") {
      a.e_power = std::stod(val);
    } else if (key == "test_mode") {
      a.test_mode = val == "1" || val == "true";
    } else if (key == "force") {
      a.force = val == "1" || val == "true";
    } else {
      bool known = false;
      for (const auto& k : kOverrideKeys) known = known || k == key;
      if (!known)
        throw CLI::ValidationError("config", "unknown key '" + key + "'");
      a.overrides[key] = std::stod(val);
    }
  }
}

ProblemInstance make_instance(InstanceArgs& a) {
  load_config(a);
  if (!a.has_c || !a.has_n)
    throw CLI::RequiredError("--c and --n (flags or config file)");
  return derive_instance(a.c, a.n, a.e_power, a.overrides, a.test_mode,
                         a.force);
}

// ---------------------------------------------------------------------------
// Output helpers

void atomic_write(const std::string& path, const std::string& payload) {
  if (path.empty() || path == "-") {
    std::fwrite(payload.data(), 1, payload.size(), stdout);
    return;
  }
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out.write(payload.data(),
              static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw std::runtime_error("rename " + tmp + " -> " + path + ": " +
                             ec.message());
}

json instance_json(const ProblemInstance& i) {
  json j;
  j["c"] = i.c;
  j["n"] = i.n;
  j["e_power"] = i.e_power;
  j["width"] = i.width;
  j["x"] = i.x;
  j["mu"] = i.mu;
  j["xi"] = i.xi;
  j["delta"] = i.delta;
  j["eta"] = i.eta;
  j["z"] = i.z;
  j["level"] = i.level;
  j["tau"] = i.tau;
  j["smooth_r"] = i.smooth_r;
  j["big_xi"] = i.big_xi;
  j["s0"] = i.s0;
  j["test_mode"] = i.test_mode;
  j["forced"] = i.forced;
  j["r_clamped"] = i.r_clamped;
  j["overridden"] = i.overridden;
  return j;
}

json violations_json(const std::vector<ConstraintViolation>& vs) {
  json arr = json::array();
  for (const auto& v : vs) {
    json j;
    j["name"] = v.name;
    j["lhs"] = v.lhs;
    j["rhs"] = v.rhs;
    j["detail"] = v.detail;
    arr.push_back(j);
  }
  return arr;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Subcommand bodies

int cmd_derive(InstanceArgs& args, const std::string& out, bool strict) {
  auto inst = make_instance(args);
  auto viol = validate(inst);
  json j;
  j["schema"] = 1;
  j["instance"] = instance_json(inst);
  j["violations"] = violations_json(viol);
  j["valid"] = viol.empty();
  atomic_write(out, j.dump(2) + "\n");
  if (strict && !viol.empty()) return 1;
  return 0;
}

int cmd_solve(InstanceArgs& args, const std::string& out, std::size_t cap,
              const std::string& format) {
  auto inst = make_instance(args);
  auto lab = make_lab(inst);
  auto res = enumerate_solutions(lab, cap);
  if (format == "json") {
    json j;
    j["schema"] = 1;
    j["truncated"] = res.truncated;
    j["passing_primes"] = res.passing;
    json arr = json::array();
    for (const auto& t : res.triples) {
      json s;
      s["p1"] = t.p1;
      s["p2"] = t.p2;
      s["p3"] = t.p3;
      s["value"] = t.value;
      s["omega1"] = t.order[0];
      s["omega2"] = t.order[1];
      s["omega3"] = t.order[2];
      s["sieve_ok"] = t.sieve_ok;
      arr.push_back(s);
    }
    j["solutions"] = arr;
    atomic_write(out, j.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "p1,p2,p3,value,omega1,omega2,omega3\n";
    for (const auto& t : res.triples)
      os << t.p1 << ',' << t.p2 << ',' << t.p3 << ',' << fmt17(t.value) << ','
         << t.order[0] << ',' << t.order[1] << ',' << t.order[2] << '\n';
    atomic_write(out, os.str());
  }
  return 0;
}

int cmd_report(InstanceArgs& args, const std::string& out, std::size_t cap,
               double x_cut, int threads) {
  auto inst = make_instance(args);
  auto lab = make_lab(inst);
  SweepConfig cfg;
  cfg.threads = threads > 0 ? threads : thread_cap();
  if (x_cut > 0.0) cfg.x_cut = x_cut;
  auto rep = assemble_report(lab, cfg, cap);

  json j;
  j["schema"] = 1;
  j["instance"] = instance_json(rep.inst);
  json sv;
  sv["frak_p"] = rep.sieve.frak_p;
  sv["frak_n_plus"] = rep.sieve.frak_n_plus;
  sv["frak_n_minus"] = rep.sieve.frak_n_minus;
  sv["s0"] = rep.sieve.s0;
  sv["fs_defined"] = rep.sieve.fs_defined;
  if (rep.sieve.fs_defined) {
    sv["f_s0"] = rep.sieve.f_s0;
    sv["big_f_s0"] = rep.sieve.big_f_s0;
  }
  j["sieve"] = sv;
  json d;
  d["gamma"] = rep.direct.gamma;
  d["gamma_prime"] = rep.direct.gamma_prime;
  d["gamma1"] = rep.direct.gamma1;
  d["gamma4"] = rep.direct.gamma4;
  d["lower_combo"] = rep.direct.lower_combo;
  d["chain_slack_sharp"] = rep.chain_slack_sharp;
  d["chain_slack_lower"] = rep.chain_slack_lower;
  d["chain_ok"] = rep.chain_ok;
  j["direct"] = d;
  json f;
  f["g1_inner"] = rep.fourier.g1_inner;
  f["g1_outer"] = rep.fourier.g1_outer;
  f["g4_inner"] = rep.fourier.g4_inner;
  f["g4_outer"] = rep.fourier.g4_outer;
  f["gamma1_fourier"] = rep.gamma1_fourier;
  f["gamma4_fourier"] = rep.gamma4_fourier;
  f["quad_error_g1"] = rep.fourier.err_g1;
  f["quad_error_g4"] = rep.fourier.err_g4;
  f["tail_estimate"] = rep.fourier.tail_estimate;
  f["x_cut"] = rep.fourier.x_cut;
  f["panels"] = rep.fourier.panels;
  j["fourier"] = f;
  // Quantities carrying unknowable implicit constants; presented side by
  // side, never asserted against each other.
  json emp;
  emp["inner_combo_abs"] = rep.inner_combo_abs;
  emp["outer_g1_abs"] = rep.outer_g1_abs;
  emp["outer_g4_abs"] = rep.outer_g4_abs;
  emp["frak_n_log_ratio"] =
      std::max(std::abs(rep.sieve.frak_n_plus), std::abs(rep.sieve.frak_n_minus)) /
      std::log(rep.inst.x);
  emp["positivity_ratio"] = rep.main.ratio;
  j["empirical"] = emp;
  json m;
  m["frak_i"] = rep.main.frak_i;
  m["main"] = rep.main.main;
  m["positivity_ratio"] = rep.main.ratio;
  m["quad_error"] = rep.main.err;
  j["main_term"] = m;
  j["lower_bound_rhs"] = rep.lower_bound_rhs;
  json sol;
  sol["truncated"] = rep.solutions.truncated;
  sol["passing_primes"] = rep.solutions.passing;
  json arr = json::array();
  for (const auto& t : rep.solutions.triples) {
    json s;
    s["p1"] = t.p1;
    s["p2"] = t.p2;
    s["p3"] = t.p3;
    s["value"] = t.value;
    s["omega1"] = t.order[0];
    s["omega2"] = t.order[1];
    s["omega3"] = t.order[2];
    s["sieve_ok"] = t.sieve_ok;
    arr.push_back(s);
  }
  sol["triples"] = arr;
  j["solutions"] = sol;
  atomic_write(out, j.dump(2) + "\n");
  return 0;
}

int cmd_grid(InstanceArgs& args, const std::string& out, double x_min,
             double x_max, int points, const std::string& mode_name) {
  auto inst = make_instance(args);
  WeightMode mode;
  if (mode_name == "plus")
    mode = WeightMode::plus;
  else if (mode_name == "minus")
    mode = WeightMode::minus;
  else if (mode_name == "moebius")
    mode = WeightMode::moebius;
  else if (mode_name == "unsieved")
    mode = WeightMode::unsieved;
  else
    throw CLI::ValidationError("--mode",
                               "one of plus|minus|moebius|unsieved");
  std::ostringstream os;
  os << "x,re,im,abs\n";
  if (points > 0) {
    auto lab = make_lab(inst);
    for (int i = 0; i < points; ++i) {
      double x = points == 1
                     ? x_min
                     : x_min + (x_max - x_min) * i / (points - 1);
      SumSpec spec{&inst, &lab.table, mode, x};
      cdouble v = L_sum(spec, lab.pc);
      os << fmt17(x) << ',' << fmt17(v.real()) << ',' << fmt17(v.imag())
         << ',' << fmt17(std::abs(v)) << '\n';
    }
  }
  atomic_write(out, os.str());
  return 0;
}

int cmd_sieve_table(double z, double level, const std::string& out,
                    bool summary) {
  auto w = build_rosser(level, z);
  if (summary) {
    auto s = frak_values(w);
    json j;
    j["schema"] = 1;
    j["z"] = z;
    j["level"] = level;
    j["frak_p"] = s.frak_p;
    j["frak_n_plus"] = s.frak_n_plus;
    j["frak_n_minus"] = s.frak_n_minus;
    j["s0"] = s.s0;
    j["fs_defined"] = s.fs_defined;
    if (s.fs_defined) {
      j["f_s0"] = s.f_s0;
      j["big_f_s0"] = s.big_f_s0;
    }
    atomic_write(out, j.dump(2) + "\n");
    return 0;
  }
  std::ostringstream os;
  os << "d,lambda_plus,lambda_minus\n";
  for (const auto& e : w.entries)
    os << e.d << ',' << e.lam_plus << ',' << e.lam_minus << '\n';
  atomic_write(out, os.str());
  return 0;
}

int cmd_kernel_dump(double a, double dk, int r, const std::string& grid_file,
                    const std::string& out) {
  auto k = build_kernel(a, dk, r);
  std::vector<double> xs;
  if (!grid_file.empty()) {
    std::ifstream in(grid_file);
    if (!in)
      throw std::runtime_error("cannot open grid file " + grid_file);
    double x;
    while (in >> x) xs.push_back(x);
  } else {
    for (int i = 0; i < 200; ++i)
      xs.push_back(std::pow(10.0, -3.0 + 9.0 * i / 199.0));
  }
  std::ostringstream os;
  os << "x,theta_hat,bound\n";
  for (double x : xs)
    os << fmt17(x) << ',' << fmt17(theta_hat(k, x)) << ','
       << fmt17(theta_hat_bound(k, x)) << '\n';
  atomic_write(out, os.str());
  return 0;
}

int cmd_primes_dump(double lo, double hi, const std::string& format,
                    const std::string& out) {
  auto t = build_prime_table(lo, hi, 2.0);
  if (format == "json") {
    json arr = json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
      json j;
      j["p"] = t.primes[i];
      j["log_p"] = t.logp[i];
      j["omega_p_plus_2"] = t.omega_p2[i];
      arr.push_back(j);
    }
    json j;
    j["schema"] = 1;
    j["primes"] = arr;
    atomic_write(out, j.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "p,log_p,omega_p_plus_2\n";
    for (std::size_t i = 0; i < t.size(); ++i)
      os << t.primes[i] << ',' << fmt17(t.logp[i]) << ',' << t.omega_p2[i]
         << '\n';
    atomic_write(out, os.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify: named invariant suites (small, fast instances)

struct VerifyState {
  int failures = 0;
  json results = json::array();
  void record(const std::string& suite, const std::string& name, bool ok,
              const std::string& detail = "") {
    json j;
    j["suite"] = suite;
    j["name"] = name;
    j["pass"] = ok;
    if (!detail.empty()) j["detail"] = detail;
    results.push_back(j);
    if (!ok) ++failures;
    std::printf("[%s] %-48s %s%s%s\n", suite.c_str(), name.c_str(),
                ok ? "pass" : "FAIL", detail.empty() ? "" : "  ",
                detail.c_str());
  }
};

void verify_params(VerifyState& st) {
  bool exps = true, order_ok = true;
  for (int i = 1; i < 1000; ++i) {
    double c = 1.0 + (15.0 / 14.0 - 1.0) * i / 1000.0;
    auto inst = derive_instance(c, 1e9, 1.0);
    double band = inst.xi + 3.0 * inst.delta;
    double ratio = inst.delta / inst.eta;
    exps = exps && band < 12.0 / 25.0 && ratio > 2.0 && ratio < 3.0;
    order_ok = order_ok &&
               std::floor(1.0 / inst.eta) <= almost_prime_order(c);
  }
  st.record("params", "exponent inequalities on c-grid", exps);
  st.record("params", "floor(1/eta) <= almost-prime order", order_ok);
}

void verify_kernel(VerifyState& st) {
  bool env_ok = true, quad_ok = true;
  for (int r = 1; r <= 6; ++r) {
    auto k = build_kernel(0.875, 0.125, r);
    for (int i = 0; i < 2000; ++i) {
      double x = std::pow(10.0, -3.0 + 9.0 * i / 1999.0);
      env_ok = env_ok &&
               std::abs(theta_hat(k, x)) <= theta_hat_bound(k, x) * (1 + 1e-12);
    }
    auto rep = verify_lemma1(k, {0.5, 1.0, 10.0});
    quad_ok = quad_ok && rep.quadrature_gap <= 1e-8;
  }
  st.record("kernel", "transform below decay envelope", env_ok);
  st.record("kernel", "quadrature of theta matches Theta(0)", quad_ok);
}

void verify_sieve(VerifyState& st, bool corrupt) {
  bool sandwich_ok = true, frak_ok = true;
  for (double z : {10.0, 20.0, 30.0}) {
    auto w = build_rosser(z * z * 2.0, z);
    if (corrupt && !w.entries.empty()) {
      // Fault-injection hook: flip the last nonzero upper weight.
      for (auto it = w.entries.rbegin(); it != w.entries.rend(); ++it)
        if (it->lam_plus != 0) {
          it->lam_plus = -it->lam_plus;
          w.plus[it->d] = static_cast<std::int8_t>(it->lam_plus);
          break;
        }
    }
    std::mt19937_64 rng(12345);
    std::vector<std::uint64_t> sq = {1};
    for (auto p : w.sieve_primes) {
      std::size_t n = sq.size();
      for (std::size_t i = 0; i < n && sq.size() < 4096; ++i)
        if (sq[i] <= 1ull << 40) sq.push_back(sq[i] * p);
    }
    for (int trial = 0; trial < 200; ++trial) {
      auto n = sq[rng() % sq.size()];
      auto t = sandwich_check(w, n);
      sandwich_ok = sandwich_ok && t.lower <= t.middle && t.middle <= t.upper;
    }
    auto s = frak_values(w);
    frak_ok = frak_ok && s.frak_n_minus <= s.frak_p + 1e-12 &&
              s.frak_p <= s.frak_n_plus + 1e-12;
  }
  st.record("sieve", "lambda sandwich on random divisors", sandwich_ok);
  st.record("sieve", "frak N- <= frak P <= frak N+", frak_ok);
}

void verify_primes(VerifyState& st) {
  auto a = sieve_range(2, 5000);  // (2, 5000]
  auto b = primes_below(5001);
  b.erase(b.begin());  // drop 2: sieve_range is half-open below
  st.record("primes", "segmented sieve matches basic sieve", a == b);
  bool cop = coprime_to_pz(49, 7.0) && !coprime_to_pz(49, 8.0) &&
             coprime_to_pz(64, 100.0);
  st.record("primes", "sieve condition spot checks", cop);
}

void verify_expsum(VerifyState& st) {
  std::mt19937_64 rng(98765);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  bool vdc_ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + rng() % 100;
    std::vector<cdouble> seq(n);
    for (auto& v : seq) v = {u(rng), u(rng)};
    std::size_t H = 1 + rng() % std::min<std::size_t>(n, 10);
    auto r = vdc_check(seq, H);
    vdc_ok = vdc_ok && r.lhs <= r.rhs * (1.0 + 1e-12);
  }
  st.record("expsum", "van der Corput inequality trials", vdc_ok);

  auto inst = derive_instance(1.05, 3000.0, 1.0,
                              {{"x", 3000.0}, {"mu", 0.4}}, false, true);
  auto parts = vaughan_decompose(
      inst, [&](std::uint64_t m) { return osc(0.37, power_dd(m, inst.c)); });
  double scale = std::abs(parts.lambda_sum);
  st.record("expsum", "Vaughan decomposition residual",
            parts.residual <= 1e-9 * std::max(scale, 1.0));
}

void verify_gamma(VerifyState& st) {
  double c = 1.05, X = 1500.0;
  double mu = std::pow(0.25, 1.0 / c);
  auto inst = derive_instance(
      c, centered_target(c, X, mu), 1.0,
      {{"x", X}, {"delta_width", 0.4}, {"z", 12.0}, {"level", 200.0},
       {"r", 8.0}},
      false, true);
  auto lab = make_lab(inst);
  auto g = gamma_direct(lab);
  double tol = 1e-12 * std::abs(g.gamma);
  st.record("gamma", "Gamma >= Gamma' >= 3 Gamma1 - 2 Gamma4",
            g.gamma >= g.gamma_prime - tol &&
                g.gamma_prime >= g.lower_combo - tol);
  double g1b = gamma1_direct(lab, 1), g1c = gamma1_direct(lab, 2);
  double ptol = 1e-11 * (std::abs(g.gamma1) + 1.0);
  st.record("gamma", "minus-slot permutation invariance",
            std::abs(g.gamma1 - g1b) <= ptol && std::abs(g.gamma1 - g1c) <= ptol);
}

int cmd_verify(const std::string& suite, bool corrupt, const std::string& out) {
  VerifyState st;
  bool all = suite.empty() || suite == "all";
  if (all || suite == "params") verify_params(st);
  if (all || suite == "kernel") verify_kernel(st);
  if (all || suite == "sieve") verify_sieve(st, corrupt);
  if (all || suite == "primes") verify_primes(st);
  if (all || suite == "expsum") verify_expsum(st);
  if (all || suite == "gamma") verify_gamma(st);
  if (st.results.empty())
    throw CLI::ValidationError("--suite", "unknown suite '" + suite + "'");
  if (!out.empty()) {
    json j;
    j["schema"] = 1;
    j["checks"] = st.results;
    j["failures"] = st.failures;
    atomic_write(out, j.dump(2) + "\n");
  }
  std::printf("%d failure(s)\n", st.failures);
  return st.failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for ternary fractional-power prime sums"};
  app.require_subcommand(1);

  InstanceArgs derive_args, validate_args, solve_args, report_args, grid_args;

  auto* cd = app.add_subcommand("derive", "derive and print instance parameters");
  add_instance_flags(cd, derive_args);
  std::string derive_out = "-";
  cd->add_option("--out", derive_out, "output path (default stdout)");

  auto* cv = app.add_subcommand("validate", "derive and check constraints");
  add_instance_flags(cv, validate_args);
  std::string validate_out = "-";
  cv->add_option("--out", validate_out, "output path (default stdout)");

  auto* cs = app.add_subcommand("solve", "enumerate solution triples");
  add_instance_flags(cs, solve_args);
  std::string solve_out = "-", solve_format = "csv";
  std::size_t solve_cap = 1000;
  cs->add_option("--out", solve_out, "output path (default stdout)");
  cs->add_option("--cap", solve_cap, "max triples, 0 = unlimited");
  cs->add_option("--format", solve_format, "csv|json");

  auto* cr = app.add_subcommand("report", "full Gamma report");
  add_instance_flags(cr, report_args);
  std::string report_out = "-";
  std::size_t report_cap = 1000;
  double report_xcut = 0.0;
  int report_threads = 0;
  cr->add_option("--out", report_out, "output path (default stdout)");
  cr->add_option("--cap", report_cap, "max listed triples");
  cr->add_option("--x-cut", report_xcut, "Fourier truncation point");
  cr->add_option("--threads", report_threads,
                 "worker cap (default: PSLAB_THREADS or hardware)");

  auto* cg = app.add_subcommand("grid", "exponential-sum grid dump");
  add_instance_flags(cg, grid_args);
  std::string grid_out = "-", grid_mode = "unsieved";
  double grid_xmin = 0.0, grid_xmax = 1.0;
  int grid_points = 0;
  cg->add_option("--out", grid_out, "output path (default stdout)");
  cg->add_option("--x-min", grid_xmin, "first frequency")->required();
  cg->add_option("--x-max", grid_xmax, "last frequency")->required();
  cg->add_option("--points", grid_points, "grid size")->required();
  cg->add_option("--mode", grid_mode, "plus|minus|moebius|unsieved");

  auto* ct = app.add_subcommand("sieve-table", "dump lambda weight table");
  double st_z = 0.0, st_level = 0.0;
  std::string st_out = "-";
  bool st_summary = false;
  ct->add_option("--z", st_z, "sieve limit")->required();
  ct->add_option("--d-level", st_level, "sieve level D")->required();
  ct->add_option("--out", st_out, "output path (default stdout)");
  ct->add_flag("--summary", st_summary, "emit summary JSON instead of table");

  auto* ck = app.add_subcommand("kernel-dump", "dump transform and envelope");
  double kd_a = 0.875, kd_dk = 0.125;
  int kd_r = 3;
  std::string kd_grid, kd_out = "-";
  ck->add_option("--a", kd_a, "half-width a");
  ck->add_option("--dk", kd_dk, "smoothing margin d_k");
  ck->add_option("--r", kd_r, "kernel order");
  ck->add_option("--grid-file", kd_grid, "file of x values, one per line");
  ck->add_option("--out", kd_out, "output path (default stdout)");

  auto* cp = app.add_subcommand("primes-dump", "dump prime table");
  double pd_lo = 0.0, pd_hi = 0.0;
  std::string pd_format = "csv", pd_out = "-";
  cp->add_option("--lo", pd_lo, "range lower end (exclusive)")->required();
  cp->add_option("--hi", pd_hi, "range upper end (inclusive)")->required();
  cp->add_option("--format", pd_format, "csv|json");
  cp->add_option("--out", pd_out, "output path (default stdout)");

  auto* cy = app.add_subcommand("verify", "run invariant suites");
  std::string vy_suite, vy_out;
  bool vy_corrupt = false;
  cy->add_option("--suite", vy_suite,
                 "all|params|kernel|sieve|primes|expsum|gamma");
  cy->add_flag("--corrupt-lambda-plus", vy_corrupt,
               "fault-injection hook: flip one upper weight");
  cy->add_option("--out", vy_out, "also write JSON results here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cd->parsed()) return cmd_derive(derive_args, derive_out, false);
    if (cv->parsed()) return cmd_derive(validate_args, validate_out, true);
    if (cs->parsed())
      return cmd_solve(solve_args, solve_out, solve_cap, solve_format);
    if (cr->parsed())
      return cmd_report(report_args, report_out, report_cap, report_xcut,
                        report_threads);
    if (cg->parsed())
      return cmd_grid(grid_args, grid_out, grid_xmin, grid_xmax, grid_points,
                      grid_mode);
    if (ct->parsed()) return cmd_sieve_table(st_z, st_level, st_out, st_summary);
    if (ck->parsed())
      return cmd_kernel_dump(kd_a, kd_dk, kd_r, kd_grid, kd_out);
    if (cp->parsed()) return cmd_primes_dump(pd_lo, pd_hi, pd_format, pd_out);
    if (cy->parsed()) return cmd_verify(vy_suite, vy_corrupt, vy_out);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
