#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lowrank/cli.hpp"
#include "lowrank/config.hpp"

using namespace lowrank;

namespace {

const char* const kSpiked =
    "p=6\nr=1\nphi0=0.5,0,0.3,0,0\nmu0=2\nn=200,800\nlan_n=100,400\ndatasets=2\ndraws=50\ncap=3\nseed=4\n"
    "gamma_draws=2000\n";

const char* const kSbm = "K=2\nsigma0=0.6,0.2,0.2,0.5\nr=2\nn=200\nreplicates=2\nseed=1\n";

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult run(const std::string& kind, const std::string& text) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_experiment(kind, Config::parse_text(text), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lowrank_cli_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(LOWRANK_REP_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesCommentsListsAndOverrides) {
  Config c = Config::parse_text("# comment\n\na = 1\nlist=1.5, 2,3\nname=x\n");
  EXPECT_EQ(c.get_int("a"), 1);
  EXPECT_EQ(c.get_doubles("list"), (std::vector<double>{1.5, 2.0, 3.0}));
  EXPECT_EQ(c.get_string("name"), "x");
  c.apply_override("a=7");
  EXPECT_EQ(c.get_int("a"), 7);
  EXPECT_EQ(c.get_double("missing", 2.5), 2.5);
  EXPECT_THROW(c.get_int("name"), ConfigError);
  EXPECT_THROW(c.reject_unknown({"a", "list"}), ConfigError);
  EXPECT_THROW(Config::parse_text("novalue\n"), ConfigError);
}

TEST(RunExperiment, SuccessWritesHeaderRowsAndSummary) {
  const RunResult r = run("spiked-limit-posterior", kSpiked);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("study,n,dataset,components,weight_sum,weight_true_support,tail_fraction,abs_lan_remainder\n", 0),
            0u);
  EXPECT_NE(r.out.find("# fisher_min_eigenvalue="), std::string::npos);
  EXPECT_NE(r.out.find("\ntail,200,0,"), std::string::npos);
  EXPECT_NE(r.out.find("\nlan,400,1,"), std::string::npos);
}

TEST(RunExperiment, FailedGateGivesExitOne) {
  const RunResult r = run("spiked-limit-posterior", std::string(kSpiked) + "gate_weight_sum_tol=-1\n");
  EXPECT_EQ(r.code, kExitGateFailed);
  EXPECT_NE(r.out.find("# gate=weight_sum observed="), std::string::npos);
  EXPECT_NE(r.out.find("result=fail"), std::string::npos);
}

TEST(RunExperiment, ConfigErrorsGiveExitTwo) {
  EXPECT_EQ(run("no-such-kind", kSbm).code, kExitConfigError);
  EXPECT_EQ(run("sbm-sim", std::string(kSbm) + "bogus=1\n").code, kExitConfigError);
  EXPECT_EQ(run("sbm-sim", "K=2\nsigma0=0.6,0.2\nr=2\nn=200\nreplicates=1\n").code, kExitConfigError);
  // Rank 1 target with r = 2 fails model validation.
  EXPECT_EQ(run("sbm-sim", "K=2\nsigma0=0.2,0.2,0.2,0.2\nr=2\nn=200\nreplicates=1\n").code, kExitConfigError);
  EXPECT_EQ(run("check-bounds", "p=4\ninstances=3\n").code, kExitConfigError);
  EXPECT_EQ(run("bicluster-sim", "p1=2\np2=2\nsigma0=1,0,0,1\nr=2\nm=100\nn=100,200\nreplicates=1\n").code,
            kExitConfigError);
}

TEST(RunExperiment, NumericalFailureGivesExitThree) {
  // 2^20 candidate supports exceed the enumeration limit once the job runs.
  std::string text = "p=22\nr=1\nphi0=0.5";
  for (int i = 1; i < 21; ++i) text += ",0";
  text += "\nmu0=1\nn=100\ndatasets=1\ndraws=10\ncap=21\ngamma_draws=10\n";
  const RunResult r = run("spiked-limit-posterior", text);
  EXPECT_EQ(r.code, kExitNumericalFailure);
  EXPECT_NE(r.err.find("EnumerationTooLarge"), std::string::npos);
}

TEST(RunExperiment, ZeroReplicatesIsHeaderOnly) {
  const RunResult s = run("sbm-sim", "K=2\nsigma0=0.6,0.2,0.2,0.5\nr=2\nn=200\nreplicates=0\n");
  EXPECT_EQ(s.code, kExitOk);
  EXPECT_EQ(s.out, "replicate,n,aligned_hamming,excluded_flag,z_1,z_2,z_3,mse_onestep,mse_naive\n");
  const RunResult b = run("bicluster-sim", "p1=2\np2=2\nsigma0=1,0,0,1\nr=2\nm=100\nn=100\nreplicates=0\n");
  EXPECT_EQ(b.code, kExitOk);
  EXPECT_EQ(b.out.find('\n'), b.out.size() - 1);
}

TEST(RunExperiment, RerunsAreByteIdentical) {
  EXPECT_EQ(run("sbm-sim", kSbm).out, run("sbm-sim", kSbm).out);
  EXPECT_EQ(run("spiked-limit-posterior", kSpiked).out, run("spiked-limit-posterior", kSpiked).out);
  EXPECT_EQ(run("check-bounds", "instances=5\nseed=3\n").out, run("check-bounds", "instances=5\nseed=3\n").out);
  EXPECT_NE(run("sbm-sim", kSbm).out, run("sbm-sim", std::string(kSbm) + "seed=2\n").out);
}

TEST(RunCli, OverridesAndOutputFile) {
  const auto cfg = temp_path("sbm.cfg");
  std::ofstream(cfg) << kSbm;
  const auto out = temp_path("sbm.csv");
  std::filesystem::remove(out);
  const std::string path = cfg.string();
  const std::string out_str = out.string();
  const char* argv[] = {"lowrank-rep", "sbm-sim", "--config", path.c_str(), "--seed", "9",
                        "--set", "replicates=1", "--out", out_str.c_str()};
  std::ostringstream sink;
  std::ostringstream err;
  EXPECT_EQ(run_cli(10, argv, sink, err), kExitOk) << err.str();
  EXPECT_TRUE(sink.str().empty());
  const RunResult direct = run("sbm-sim", std::string(kSbm) + "seed=9\nreplicates=1\n");
  EXPECT_EQ(slurp(out), direct.out);

  const char* missing[] = {"lowrank-rep", "sbm-sim", "--config", "/nonexistent/file.cfg"};
  EXPECT_EQ(run_cli(4, missing, sink, err), kExitConfigError);
  const char* no_config[] = {"lowrank-rep", "sbm-sim"};
  EXPECT_EQ(run_cli(2, no_config, sink, err), kExitConfigError);
}

TEST(Binary, ExitCodesAndDeterministicFiles) {
  const auto cfg = temp_path("spiked.cfg");
  std::ofstream(cfg) << kSpiked;
  const auto a = temp_path("a.csv");
  const auto b = temp_path("b.csv");
  const std::string base = "spiked-limit-posterior --config " + cfg.string();
  EXPECT_EQ(run_binary(base + " --out " + a.string()), kExitOk);
  EXPECT_EQ(run_binary(base + " --out " + b.string()), kExitOk);
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(run_binary(base + " --set gate_weight_sum_tol=-1"), kExitGateFailed);
  EXPECT_EQ(run_binary(base + " --set bogus=1"), kExitConfigError);
  EXPECT_EQ(run_binary("unknown-kind --config " + cfg.string()), kExitConfigError);
}
