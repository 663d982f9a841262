// Acceptance run: one PASS/FAIL line per criterion. Tolerances and runtime
// budgets are fixed here; nothing is read from the environment.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "cusp/chern.hpp"
#include "cusp/elliptic.hpp"
#include "cusp/expansion_fit.hpp"
#include "cusp/index_algebra.hpp"
#include "cusp/parabolic.hpp"
#include "cusp/term_list.hpp"

using namespace cusp;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = budget_s <= 0.0 || secs < budget_s;
  const bool ok = v.pass && in_time;
  if (!ok) ++failures;
  std::string timing = fmt("%.3g s", secs);
  if (budget_s > 0.0) timing += fmt(" (budget %g s)", budget_s);
  if (!in_time) timing += " OVER BUDGET";
  std::printf("[%s] %2d %s: %s; %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str(), timing.c_str());
  std::fflush(stdout);
}

// ---- 1 ---------------------------------------------------------------------

// Real roots of (z² + z)/2 = λ + ν by Newton from both sides of the vertex.
std::vector<double> newton_roots(double lambda, double c, double nu) {
  const auto p = [&](double z) { return 0.5 * c * (z * z + z) - lambda - nu; };
  const auto dp = [&](double z) { return 0.5 * c * (2 * z + 1); };
  std::vector<double> out;
  for (double z : {-50.0, 50.0}) {
    for (int it = 0; it < 200; ++it) z -= p(z) / dp(z);
    out.push_back(z);
  }
  return out;
}

Verdict indicial_roots() {
  const index::IndicialFamily f(Rational(1), Rational(1), {{Rational(0), 1}});
  const auto s = index::spec_b_roots(f);
  bool exact = s.roots.size() == 2 && s.roots[0].z.is_exact() && s.roots[1].z.is_exact() &&
               *s.roots[0].z.exact() == Rational(-2) && *s.roots[1].z.exact() == Rational(1);
  const auto brute = newton_roots(1.0, 1.0, 0.0);
  const double err = std::max(std::abs(brute[0] + 2.0), std::abs(brute[1] - 1.0));
  return {exact && err <= 1e-12,
          std::string("exact roots {") + (exact ? "-2, 1" : "?") + "}, float path error " + fmt("%.1e", err) +
              " (<= 1e-12)"};
}

// ---- 2 ---------------------------------------------------------------------

Verdict log_coefficient_identity() {
  int bad = 0;
  for (int d = 4; d <= 100; ++d) {
    if (chern::log_coefficient_plane_curve(d) != Rational(2 * d) / Rational(3 * (d - 3))) ++bad;
  }
  const bool ex = chern::log_coefficient_plane_curve(4) == Rational(8) / 3 &&
                  chern::log_coefficient_plane_curve(5) == Rational(5) / 3;
  return {bad == 0 && ex, std::to_string(97 - bad) + "/97 degrees match 2d/(3(d-3)) exactly; d=4 -> 8/3, d=5 -> 5/3 " +
                              (ex ? "ok" : "WRONG")};
}

// ---- 3 ---------------------------------------------------------------------

double log_term_on(const RadialGrid& g) {
  elliptic::MongeAmpereProblem p{geometry::ModelMetric(), TermList::parse("3/2:1:0, 0:2:0").sample(g), 0.0, 0.0, {}};
  return fit::detect_log_term(elliptic::solve_monge_ampere_radial(p).u).b_tilde;
}

Verdict log_term_recovery() {
  const auto g = RadialGrid::default_grid();
  const double b = log_term_on(g);
  const double b2 = log_term_on(g.refined());
  const double rel = std::abs(b - 1.0);
  const double move = std::abs(b2 - b) / std::abs(b);
  return {rel <= 0.02 && move < 0.005, "b~ = " + fmt("%.6f", b) + " (|b~ - 1| <= 0.02), halving h moves it by " +
                                           fmt("%.3f", 100 * move) + "% (< 0.5%)"};
}

// ---- 4 ---------------------------------------------------------------------

Verdict cusp_constant() {
  const double e1 = std::abs(parabolic::cusp_constant_rk4(2.0, std::log(2.0), 1e-3) - parabolic::cusp_constant_evolution(2.0, std::log(2.0)));
  const double e2 = std::abs(parabolic::cusp_constant_rk4(5.0, 3.0, 1e-3) - parabolic::cusp_constant_evolution(5.0, 3.0));
  parabolic::FlowProblem p;
  p.omega0 = geometry::ModelMetric(1.0, 1.0, parabolic::cusp_scaled_conformal_factor(p.grid, 2.0, -10.0, -3.0));
  p.T = 0.5;
  const auto r = parabolic::run_flow(p);
  const double ct = r.states.back().cusp_constant;
  const double exact = parabolic::cusp_constant_evolution(2.0, 0.5);
  const double rel = std::abs(ct / exact - 1.0);
  return {e1 <= 1e-10 && e2 <= 1e-10 && rel <= 0.01,
          "RK4 errors " + fmt("%.1e", e1) + ", " + fmt("%.1e", e2) + " (<= 1e-10); flow c(0.5) = " + fmt("%.6f", ct) +
              " vs " + fmt("%.6f", exact) + ", rel " + fmt("%.1e", rel) + " (<= 1%)"};
}

// ---- 5 ---------------------------------------------------------------------

Verdict flow_fixed_point() {
  parabolic::FlowProblem p;
  p.T = 1.0;
  p.dt = 1e-2;
  for (int k = 1; k < 10; ++k) p.sample_times.push_back(0.1 * k);
  const auto r = parabolic::run_flow(p);
  double sup = 0.0;
  for (const auto& s : r.states) sup = std::max(sup, s.u.sup_norm());
  return {sup <= 1e-8 && r.states.back().t == 1.0, "max_t ||u(t)||_inf = " + fmt("%.1e", sup) + " (<= 1e-8) over " +
                                                        std::to_string(r.states.size()) + " snapshots"};
}

// ---- 6 ---------------------------------------------------------------------

Verdict restricted_ode() {
  const auto r = parabolic::restricted_ode_solution({2.0}, 1.0, 1e-2);
  return {r.max_discrepancy <= 1e-8 && r.times.back() == 1.0,
          "max |RK4 - quadrature| = " + fmt("%.1e", r.max_discrepancy) + " (<= 1e-8), u(1) = " +
              fmt("%.8f", r.quadrature.back())};
}

// ---- 7 ---------------------------------------------------------------------

Verdict decay() {
  parabolic::DecayProblem p;
  p.gamma = 1.0;
  p.g = [](double, double t) { return 1.0 + 0.5 * std::sin(3.0 * t); };
  const auto c = parabolic::decay_certificate(p, 0.02);
  const bool bounded = std::isfinite(c.coarse.K) && std::isfinite(c.coarse.c) && c.coarse.K > 0.0;
  return {bounded && c.grid_stable && c.refinement_change < 0.02,
          "K = " + fmt("%.4g", c.coarse.K) + ", c = " + fmt("%.4g", c.coarse.c) + ", refinement change " +
              fmt("%.2e", c.refinement_change) + " (< 2%)"};
}

// ---- 8 ---------------------------------------------------------------------

std::vector<double> observed_orders(const std::function<double(std::size_t)>& error) {
  std::vector<double> e;
  for (std::size_t n : {201u, 401u, 801u, 1601u}) e.push_back(error(n));
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) out.push_back(std::log2(e[i] / e[i + 1]));
  return out;
}

double sup_error(const RadialField& u, const std::function<double(double)>& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i] - exact(u.grid().x(i))));
  return e;
}

Verdict manufactured() {
  const auto grid = [](std::size_t n) { return RadialGrid(-12.0, std::log(0.5), n); };
  const auto lin = observed_orders([&](std::size_t n) {
    const auto g = grid(n);
    const auto ex = [](double x) { return x * std::log(x); };
    elliptic::LinearProblem p{geometry::ModelMetric(), 1.0, RadialField::from_function(g, [](double x) { return 1.5 * x; }),
                              ex(g.x(0)), ex(g.x(n - 1))};
    return sup_error(elliptic::solve_linear(p), ex);
  });
  const auto ma = observed_orders([&](std::size_t n) {
    const auto g = grid(n);
    const auto ex = [](double x) { return x * x; };
    elliptic::MongeAmpereProblem p{geometry::ModelMetric(),
                                   RadialField::from_function(g, [](double x) { return std::log1p(3 * x * x) - x * x; }),
                                   ex(g.x(0)), ex(g.x(n - 1)), {}};
    return sup_error(elliptic::solve_monge_ampere_radial(p).u, ex);
  });
  bool ok = true;
  std::string d = "linear orders";
  for (double o : lin) {
    ok = ok && std::abs(o - 2.0) <= 0.5;
    d += " " + fmt("%.3f", o);
  }
  d += ", Monge-Ampere orders";
  for (double o : ma) {
    ok = ok && std::abs(o - 2.0) <= 0.5;
    d += " " + fmt("%.3f", o);
  }
  return {ok, d + " (each 2 +- 0.5)"};
}

// ---- 9 ---------------------------------------------------------------------

index::IndicialFamily random_family(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(1, 6);
  const Rational c = Rational(pick(rng)) / pick(rng);
  const Rational lambda = Rational(pick(rng) - 1) / pick(rng);
  std::set<Rational> nus{Rational(0)};
  const int count = 1 + pick(rng) % 4;
  while (static_cast<int>(nus.size()) < count) {
    if (pick(rng) % 2) {
      // half-integer root z gives a perfect-square discriminant
      const Rational z = Rational(pick(rng) + pick(rng)) / 2;
      const Rational nu = c * (z * z + z) / 2 - lambda;
      if (nu >= 0) nus.insert(nu);
    } else {
      nus.insert(Rational(pick(rng) - 1) / pick(rng));
    }
  }
  std::vector<index::SpectrumEntry> spec;
  for (const auto& nu : nus) spec.push_back({nu, 1});
  return index::IndicialFamily(lambda, c, spec);
}

Verdict index_suite() {
  std::mt19937_64 rng(20240611);
  int checks = 0;
  int failed = 0;
  const auto check = [&](bool ok) {
    ++checks;
    if (!ok) ++failed;
  };
  for (int fam = 0; fam < 50; ++fam) {
    const auto f = random_family(rng);
    const double cutoff = 4.0;
    std::vector<index::IndexSet> sets;
    for (double alpha : {-3.0, -0.5, 0.0, 1.0}) {
      const auto ep = index::index_set_Eplus(f, alpha, cutoff);
      const auto hat = index::index_set_hatEplus(f, alpha, cutoff);
      check(hat.includes(index::closure(ep)));
      const auto c1 = index::closure(hat);
      check(index::closure(c1) == c1);
      check(index::closure(ep) == index::closure(index::closure(ep)));
      sets.push_back(hat);
      sets.push_back(index::closure(ep));
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (std::size_t j = i; j < sets.size(); ++j) {
        const auto u1 = index::extended_union(sets[i], sets[j]);
        const auto u2 = index::extended_union(sets[j], sets[i]);
        check(u1 == u2);
        check(u1.includes(sets[i]) && u1.includes(sets[j]));
      }
    }
  }
  // spectrum {0, 2}: roots 1 and 2 differ by an integer, so (2, 1) appears
  const index::IndicialFamily acc(Rational(1), Rational(1), {{Rational(0), 1}, {Rational(2), 1}});
  const bool example = index::index_set_hatEplus(acc, 0.0, 3.0).contains({Exponent(2), 1}) &&
                       !index::closure(index::index_set_Eplus(acc, 0.0, 3.0)).contains({Exponent(2), 1});
  return {failed == 0 && example, std::to_string(checks - failed) + "/" + std::to_string(checks) +
                                      " property checks over 50 families; accidental (2,1) " +
                                      (example ? "present" : "MISSING")};
}

// ---- 10 --------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_exe(const fs::path& cwd, const std::string& args) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" CUSPKIT_EXE "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / ("cuspkit_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto write = [&](const std::string& name, const std::string& text) { std::ofstream(dir / name) << text; };
  write("indicial.ini", "[indicial]\nlambda = 1\nc = 1\nspectrum = 0, 2\ncutoff = 4\nunion_alphas = -3\n");
  write("chern.ini", "[chern]\nd = 7\n");
  write("linear.ini", "[grid]\nt_min = -20\nnodes = 1024\n[linear]\nrhs = 3/2:1:0\nprobe_deltas = 0.5\nsensitivity = 1e-3\n");
  write("ma.ini", "[ma]\nF = 3/2:1:0, 1:2:1\n");
  write("flow.ini", "[grid]\nt_min = -30\nnodes = 2048\n[flow]\ncusp_scale = 2\nT = 0.3\ndt = 0.02\nsample_times = 0.1, 0.2\n");
  write("pipeline.ini", "[pipeline]\nF = 3/2:1:0\n");
  write_csv((dir / "field.csv").string(), TermList::parse("1:1:1, 2:1:0, 1:5/2:0").sample(RadialGrid::default_grid()));
  write("set.json", R"({"cutoff": 2, "terms": [{"z": 1, "k": 0}, {"z": 1, "k": 1}, {"z": 2, "k": 0}, {"z": 2, "k": 1}]})");
  write("fit.ini", "[fit]\nfield = field.csv\nindex_set = set.json\nx_lo = 1e-4\nx_hi = 1e-2\n");
  write("sweep.ini", "[sweep]\nconfigs = chern-coeff:chern.ini, indicial:indicial.ini, solve-ma:ma.ini\njobs = 3\n");

  const std::vector<std::pair<std::string, std::string>> runs{
      {"indicial", "indicial.ini"},   {"chern-coeff", "chern.ini"},        {"solve-linear", "linear.ini"},
      {"solve-ma", "ma.ini"},         {"flow", "flow.ini"},                {"fit-expansion", "fit.ini"},
      {"logterm-pipeline", "pipeline.ini"}, {"sweep", "sweep.ini"}};
  int identical = 0;
  std::size_t files = 0;
  std::string bad;
  for (const auto& [cmd, cfg] : runs) {
    bool same = true;
    for (const char* tag : {"a", "b"}) {
      if (run_exe(dir, cmd + " --config " + cfg + " --out out_" + tag + "/" + cmd) != 0) same = false;
    }
    const fs::path a = dir / "out_a" / cmd;
    const fs::path b = dir / "out_b" / cmd;
    std::size_t n = 0;
    if (same && fs::exists(a)) {
      for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        ++n;
        const auto other = b / fs::relative(e.path(), a);
        if (!fs::exists(other) || slurp(e.path()) != slurp(other)) same = false;
      }
    }
    same = same && n > 0;
    files += n;
    if (same) {
      ++identical;
    } else {
      bad += " " + cmd;
    }
  }
  fs::remove_all(dir);
  return {identical == static_cast<int>(runs.size()),
          std::to_string(identical) + "/" + std::to_string(runs.size()) + " subcommands byte-identical across two runs (" +
              std::to_string(files) + " files)" + (bad.empty() ? "" : "; differing:" + bad)};
}

}  // namespace

int main() {
  criterion(1, "indicial roots", 1e-3, indicial_roots);
  criterion(2, "log-coefficient identity", 1e-2, log_coefficient_identity);
  criterion(3, "end-to-end log-term recovery", 10.0, log_term_recovery);
  criterion(4, "cusp-constant evolution", 30.0, cusp_constant);
  criterion(5, "flow fixed point", 10.0, flow_fixed_point);
  criterion(6, "restricted ODE mutual oracle", 1.0, restricted_ode);
  criterion(7, "decay certificate", 30.0, decay);
  criterion(8, "manufactured-solution convergence", 60.0, manufactured);
  criterion(9, "index-algebra property suite", 5.0, index_suite);
  criterion(10, "CLI determinism", 0.0, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
