#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <unistd.h>

#include "commands.hpp"
#include "config.hpp"
#include "cusp/radial.hpp"
#include "cusp/term_list.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using cuspkit::run_command;

namespace {

class Scratch : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           ("cuspkit_" + std::string(info->test_suite_name()) + "_" + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }
  static json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
  }
  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

// Exit status of the installed binary run from `cwd`.
int run_exe(const fs::path& cwd, const std::string& env, const std::string& args) {
  const std::string cmd = "cd '" + cwd.string() + "' && " + env + " '" CUSPKIT_EXE "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

using Indicial = Scratch;

TEST_F(Indicial, UnitFamilyHatEplus) {
  const auto cfg = write("a.ini", "[indicial]\nlambda = 1\nc = 1\nspectrum = 0\nalpha = 0\ncutoff = 3\n");
  const auto r = run_command("indicial", cfg, dir_ / "out");
  ASSERT_EQ(r.exit_code, 0) << r.message;
  const auto j = read_json(dir_ / "out" / "indicial.json");
  const auto& terms = j["hatEplus"]["terms"];
  ASSERT_EQ(terms.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(terms[i]["z"], i + 1.0);
    EXPECT_EQ(terms[i]["k"], 0);
  }
  EXPECT_EQ(j["spec_b"]["roots"][0]["z_exact"], "-2");
  // defaults are echoed
  EXPECT_EQ(j["config"]["indicial"]["alpha"], 0.0);
  EXPECT_EQ(j["config"]["indicial"]["union_alphas"], json::array());
}

TEST_F(Indicial, AccidentalMultiplicityAndUnions) {
  const auto cfg = write("a.ini",
                         "[indicial]\nlambda = 1\nc = 1\nspectrum = 0, 2:3\ncutoff = 3\nunion_alphas = -3\n");
  const auto r = run_command("indicial", cfg, dir_ / "out");
  ASSERT_EQ(r.exit_code, 0) << r.message;
  const auto j = read_json(dir_ / "out" / "indicial.json");
  bool log_at_two = false;
  for (const auto& t : j["hatEplus"]["terms"]) log_at_two |= (t["z"] == 2.0 && t["k"] == 1);
  EXPECT_TRUE(log_at_two);
  EXPECT_EQ(j["unions"].size(), 1u);
  EXPECT_EQ(j["spec_b"]["roots"].size(), 4u);
}

TEST_F(Indicial, MissingKeyIsNamed) {
  const auto cfg = write("a.ini", "[indicial]\nc = 1\nspectrum = 0\ncutoff = 3\n");
  const auto r = run_command("indicial", cfg, dir_ / "out");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.message.find("indicial.lambda"), std::string::npos) << r.message;
}

TEST_F(Indicial, CutoffBelowAlphaIsRejected) {
  const auto cfg = write("a.ini", "[indicial]\nlambda = 1\nc = 1\nspectrum = 0\nalpha = 2\ncutoff = 1\n");
  const auto r = run_command("indicial", cfg, dir_ / "out");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.message.find("indicial.cutoff"), std::string::npos) << r.message;
}

TEST_F(Indicial, UnknownKeysAndBadValuesAreRejected) {
  auto r = run_command("indicial", write("a.ini", "[indicial]\nlambda = 1\nc = 1\nspectrum = 0\ncutoff = 3\ncutof = 2\n"),
                       dir_ / "out");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.message.find("indicial.cutof"), std::string::npos) << r.message;
  r = run_command("indicial", write("b.ini", "[indicial]\nlambda = 1\nc = -1\nspectrum = 0\ncutoff = 3\n"), dir_ / "out");
  EXPECT_EQ(r.exit_code, 2);
  r = run_command("indicial", write("c.ini", "[indicial]\nlambda = one\nc = 1\nspectrum = 0\ncutoff = 3\n"),
                  dir_ / "out");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.message.find("indicial.lambda"), std::string::npos) << r.message;
}

using Chern = Scratch;

TEST_F(Chern, PlaneCurveValues) {
  for (const auto& [d, num, den] : {std::tuple{4, 8, 3}, std::tuple{5, 5, 3}}) {
    const auto out = dir_ / ("d" + std::to_string(d));
    const auto r = run_command("chern-coeff", write("c.ini", "[chern]\nd = " + std::to_string(d) + "\n"), out);
    ASSERT_EQ(r.exit_code, 0) << r.message;
    const auto j = read_json(out / "chern.json");
    EXPECT_EQ(j["d"], d);
    EXPECT_EQ(j["b_tilde"]["num"], num);
    EXPECT_EQ(j["b_tilde"]["den"], den);
  }
}

TEST_F(Chern, LowDegreeIsADomainError) {
  const auto r = run_command("chern-coeff", write("c.ini", "[chern]\nd = 3\n"), dir_ / "out");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.message.find("degree"), std::string::npos) << r.message;
}

using Pipeline = Scratch;

TEST_F(Pipeline, SignAndSizeFollowTheSource) {
  const std::vector<std::pair<std::string, double>> cases{{"3/2:1:0", 1.0}, {"-1:1:0", -2.0 / 3.0}, {"1:2:0", 0.0}};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto out = dir_ / ("case" + std::to_string(i));
    const auto cfg = write("p.ini", "[pipeline]\nF = " + cases[i].first + "\n");
    const auto r = run_command("logterm-pipeline", cfg, out);
    ASSERT_EQ(r.exit_code, 0) << r.message;
    const auto j = read_json(out / "report.json");
    EXPECT_TRUE(j["pass"].get<bool>()) << cases[i].first;
    const double expected = cases[i].second;
    if (expected == 0.0) {
      // grid-level trace of the x mode, shrinking like h²
      EXPECT_LE(std::abs(j["b_tilde"].get<double>()), 1e-4);
    } else {
      EXPECT_NEAR(j["b_tilde"].get<double>(), expected, 0.02 * std::abs(expected));
    }
    EXPECT_TRUE(fs::exists(out / "solution.csv"));
    EXPECT_EQ(j["config"]["pipeline"]["tol"], 0.02);
    EXPECT_EQ(j["config"]["grid"]["nodes"], 4096);
  }
}

using SolveMa = Scratch;

TEST_F(SolveMa, ConvergesAndWritesReadableField) {
  const auto cfg = write("m.ini", "[grid]\nt_min = -20\nnodes = 801\n[ma]\nF = -3:1:0, 2:2:0\n");
  const auto r = run_command("solve-ma", cfg, dir_ / "out");
  ASSERT_EQ(r.exit_code, 0) << r.message;
  const auto j = read_json(dir_ / "out" / "report.json");
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_LT(j["residual"].get<double>(), 1e-11);
  const auto u = cusp::read_csv((dir_ / "out" / "solution.csv").string());
  EXPECT_EQ(u.size(), 801u);
}

TEST_F(SolveMa, NewtonFailureExitsWithThree) {
  const auto cfg = write("m.ini", "[grid]\nt_min = -12\nnodes = 201\n[ma]\nF = 5:1:0\n[newton]\nmax_iter = 1\n");
  const auto r = run_command("solve-ma", cfg, dir_ / "out");
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_FALSE(r.message.empty());
}

TEST_F(SolveMa, GridValidationNamesKeys) {
  auto r = run_command("solve-ma", write("a.ini", "[grid]\nt_max = 0.5\n[ma]\nF = 1:1:0\n"), dir_ / "out");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.message.find("grid.t_max"), std::string::npos);
  r = run_command("solve-ma", write("b.ini", "[grid]\nnodes = 4\n[ma]\nF = 1:1:0\n"), dir_ / "out");
  EXPECT_NE(r.message.find("grid.nodes"), std::string::npos);
  r = run_command("solve-ma", write("c.ini", "[ma]\nF = 1:1\n"), dir_ / "out");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.message.find("ma.F"), std::string::npos);
}

using SolveLinear = Scratch;

TEST_F(SolveLinear, ReportCarriesRootsProbeAndSensitivity) {
  const auto cfg = write("l.ini",
                         "[grid]\nt_min = -20\nnodes = 1024\n[linear]\nrhs = 3/2:1:0\nprobe_deltas = 0.5\n"
                         "sensitivity = 1e-3\n");
  const auto r = run_command("solve-linear", cfg, dir_ / "out");
  ASSERT_EQ(r.exit_code, 0) << r.message;
  const auto j = read_json(dir_ / "out" / "report.json");
  EXPECT_EQ(j["left_indicial_roots"][0], -2.0);
  EXPECT_EQ(j["left_indicial_roots"][1], 1.0);
  EXPECT_LT(j["residual"].get<double>(), 1e-10);
  EXPECT_TRUE(j["probes"][0]["diagonally_dominant"].get<bool>());
  EXPECT_NEAR(j["sensitivity"]["decay_exponent"].get<double>(), -2.0, 0.02);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "sensitivity.csv"));
}

using Flow = Scratch;

TEST_F(Flow, PoincareSnapshots) {
  const auto cfg = write("f.ini", "[grid]\nt_min = -20\nnodes = 512\n[flow]\nT = 0.2\ndt = 0.05\nsample_times = 0.1\n");
  const auto r = run_command("flow", cfg, dir_ / "out");
  ASSERT_EQ(r.exit_code, 0) << r.message;
  const auto j = read_json(dir_ / "out" / "summary.json");
  ASSERT_EQ(j["states"].size(), 3u);
  for (const auto& s : j["states"]) {
    const auto u = cusp::read_csv((dir_ / "out" / s["u_file"].get<std::string>()).string());
    EXPECT_LE(u.sup_norm(), 1e-8);
    EXPECT_NEAR(s["cusp_constant"].get<double>(), 1.0, 1e-12);
  }
  EXPECT_EQ(j["config"]["newton"]["max_iter"], 30);
}

TEST_F(Flow, ValidatesTimeSteps) {
  const auto r = run_command("flow", write("f.ini", "[flow]\nT = 0.1\ndt = 0.5\n"), dir_ / "out");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.message.find("flow.dt"), std::string::npos) << r.message;
}

using FitExpansion = Scratch;

TEST_F(FitExpansion, RecoversSyntheticCoefficients) {
  const auto g = cusp::RadialGrid::default_grid();
  cusp::write_csv((dir_ / "field.csv").string(), cusp::TermList::parse("2:1:0, 5:2:0").sample(g));
  write("set.json", R"({"cutoff": 2, "terms": [{"z": 1, "k": 0}, {"z": 2, "k": 0}]})");
  const auto cfg = write("fit.ini", "[fit]\nfield = field.csv\nindex_set = set.json\nx_lo = 1e-6\nx_hi = 1e-2\n");
  const auto r = run_command("fit-expansion", cfg, dir_ / "out");
  ASSERT_EQ(r.exit_code, 0) << r.message;
  const auto j = read_json(dir_ / "out" / "fit.json");
  EXPECT_NEAR(j["terms"][0]["coefficient"].get<double>(), 2.0, 1e-8);
  EXPECT_NEAR(j["terms"][1]["coefficient"].get<double>(), 5.0, 1e-6);
  EXPECT_TRUE(j["remainder"]["saturated"].get<bool>());
  EXPECT_EQ(j["config"]["fit"]["N"], 2.0);
}

TEST_F(FitExpansion, MissingInputsAreConfigErrors) {
  auto r = run_command("fit-expansion", write("a.ini", "[fit]\nfield = nope.csv\nindex_set = nope.json\n"), dir_ / "o");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.message.find("fit.field"), std::string::npos) << r.message;
  r = run_command("fit-expansion", write("b.ini", "[fit]\nindex_set = s.json\n"), dir_ / "o");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.message.find("fit.field"), std::string::npos) << r.message;
}

using Sweep = Scratch;

TEST_F(Sweep, FansOutIntoSeparateDirectories) {
  write("d4.ini", "[chern]\nd = 4\n");
  write("d5.ini", "[chern]\nd = 5\n");
  write("bad.ini", "[chern]\nd = 2\n");
  write("ind.ini", "[indicial]\nlambda = 1\nc = 1\nspectrum = 0\ncutoff = 3\n");
  const auto cfg = write("s.ini",
                         "[sweep]\nconfigs = chern-coeff:d4.ini, chern-coeff:d5.ini, indicial:ind.ini\njobs = 3\n");
  const auto r = run_command("sweep", cfg, dir_ / "out");
  ASSERT_EQ(r.exit_code, 0) << r.message;
  const auto j = read_json(dir_ / "out" / "sweep.json");
  ASSERT_EQ(j["runs"].size(), 3u);
  EXPECT_EQ(read_json(dir_ / "out" / "run_000_chern-coeff" / "chern.json")["b_tilde"]["num"], 8);
  EXPECT_EQ(read_json(dir_ / "out" / "run_001_chern-coeff" / "chern.json")["b_tilde"]["num"], 5);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "run_002_indicial" / "indicial.json"));

  const auto bad = write("t.ini", "[sweep]\nconfigs = chern-coeff:d4.ini, chern-coeff:bad.ini\njobs = 2\n");
  const auto rb = run_command("sweep", bad, dir_ / "out2");
  EXPECT_EQ(rb.exit_code, 2);
  const auto jb = read_json(dir_ / "out2" / "sweep.json");
  EXPECT_EQ(jb["runs"][0]["exit_code"], 0);
  EXPECT_EQ(jb["runs"][1]["exit_code"], 2);
  EXPECT_EQ(jb["failed"], 1);
}

TEST_F(Sweep, RejectsNestingAndUnknownCommands) {
  write("x.ini", "[chern]\nd = 4\n");
  EXPECT_EQ(run_command("sweep", write("a.ini", "[sweep]\nconfigs = sweep:a.ini\n"), dir_ / "o").exit_code, 2);
  EXPECT_EQ(run_command("sweep", write("b.ini", "[sweep]\nconfigs = bogus:x.ini\n"), dir_ / "o").exit_code, 2);
  EXPECT_EQ(run_command("bogus", dir_ / "x.ini", dir_ / "o").exit_code, 2);
}

using Executable = Scratch;

TEST_F(Executable, OutputDirectoryPrecedence) {
  write("c.ini", "[chern]\nd = 4\n");
  // --out wins over the environment
  EXPECT_EQ(run_exe(dir_, "CUSPKIT_OUTPUT_DIR=env", "chern-coeff --config c.ini --out flag"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "flag" / "chern.json"));
  EXPECT_FALSE(fs::exists(dir_ / "env"));
  EXPECT_EQ(run_exe(dir_, "CUSPKIT_OUTPUT_DIR=env", "chern-coeff --config c.ini"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "env" / "chern.json"));
  EXPECT_EQ(run_exe(dir_, "env -u CUSPKIT_OUTPUT_DIR", "chern-coeff --config c.ini"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "cuspkit-out" / "chern.json"));
}

TEST_F(Executable, ExitCodes) {
  write("c.ini", "[chern]\nd = 4\n");
  write("bad.ini", "[chern]\nd = 3\n");
  write("ma.ini", "[grid]\nt_min = -12\nnodes = 201\n[ma]\nF = 5:1:0\n[newton]\nmax_iter = 1\n");
  EXPECT_EQ(run_exe(dir_, "", "chern-coeff --config c.ini --out o"), 0);
  EXPECT_EQ(run_exe(dir_, "", "chern-coeff --config bad.ini --out o"), 2);
  EXPECT_EQ(run_exe(dir_, "", "solve-ma --config ma.ini --out o"), 3);
  EXPECT_EQ(run_exe(dir_, "", "chern-coeff --out o"), 2);
  EXPECT_EQ(run_exe(dir_, "", "no-such-command"), 2);
  EXPECT_EQ(run_exe(dir_, "", "chern-coeff --config missing.ini --out o"), 2);
  EXPECT_EQ(run_exe(dir_, "", "--help"), 0);
}

TEST_F(Executable, RepeatedRunsAreByteIdentical) {
  write("c.ini", "[indicial]\nlambda = 1\nc = 1\nspectrum = 0, 2\ncutoff = 4\nunion_alphas = -3\n");
  ASSERT_EQ(run_exe(dir_, "", "indicial --config c.ini --out a"), 0);
  ASSERT_EQ(run_exe(dir_, "", "indicial --config c.ini --out b"), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "indicial.json"), slurp(dir_ / "b" / "indicial.json"));
}

TEST(ConfigParsing, TypedGettersAndEcho) {
  std::istringstream in("[s]\nx = 1.5\nn = 3\nflag = yes\nlist = 1, 2,3\nq = 8/3\n");
  auto c = cuspkit::Config::parse(in, "inline", ".");
  EXPECT_EQ(c.get_double("s.x"), 1.5);
  EXPECT_EQ(c.get_int("s.n"), 3);
  EXPECT_TRUE(c.get_bool("s.flag", false));
  EXPECT_EQ(c.get_double_list("s.list", ""), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(c.get_rational("s.q"), cusp::Rational(8) / 3);
  EXPECT_EQ(c.get_double("s.missing", 2.5), 2.5);
  EXPECT_EQ(c.effective()["s"]["missing"], 2.5);
  EXPECT_EQ(c.effective()["s"]["q"], "8/3");
  EXPECT_THROW(c.get_int("s.x"), cuspkit::ConfigError);
  EXPECT_THROW(c.get_double("s.none"), cuspkit::ConfigError);
  EXPECT_THROW(c.restrict_to({"s.x"}), cuspkit::ConfigError);
  std::istringstream nan_in("[s]\nx = nan\n");
  auto d = cuspkit::Config::parse(nan_in, "inline", ".");
  EXPECT_THROW(d.get_double("s.x"), cuspkit::ConfigError);
  std::istringstream dup("[s]\nx = 1\nx = 2\n");
  EXPECT_THROW(cuspkit::Config::parse(dup, "inline", "."), cuspkit::ConfigError);
}
