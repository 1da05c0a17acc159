#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "solitonforge/jobs.hpp"

using namespace solitonforge;
namespace fs = std::filesystem;

namespace {

fs::path out_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "solitonforge_job_tests" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json manifest(const fs::path& dir) { return json::parse(slurp(dir / "manifest.json")); }

JobResult run(const std::string& toml, const fs::path& dir, int workers = 1) {
  JobOptions o;
  o.out_dir = dir;
  o.workers = workers;
  return run_job("", parse_config(toml, ConfigFormat::Toml, "test"), o);
}

const char* kSmallGlue = R"(
job = "glue"
seed = 3
[grid]
L_over_pi = 40
N = 512
[train]
v_star = 16
[glue]
t_max = 2.0
dt = 2e-3
k_max = 8
tol = 1e-6
record_stride = 10
)";

}  // namespace

TEST(Jobs, GlueWritesContractArtifacts) {
  const auto dir = out_dir("glue");
  const auto r = run(kSmallGlue, dir);
  ASSERT_EQ(r.exit_code, 0) << r.message;
  for (const char* f : {"manifest.json", "config.json", "convergence.csv", "picard.json", "increments.csv", "eta0.fld"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const auto m = manifest(dir);
  EXPECT_EQ(m.at("status"), "ok");
  EXPECT_EQ(m.at("phase_convention").at("flag"), "quarter_v_squared");
  EXPECT_EQ(m.at("seed"), 3);
  EXPECT_FALSE(m.contains("warnings"));
  EXPECT_EQ(m.at("config").at("train").at("v_star"), 16);
  EXPECT_EQ(slurp(dir / "convergence.csv").substr(0, 18), "t,L2,H1,Lalpha2\n0,");
  EXPECT_GT(r.summary.at("rate_h1").get<double>(), 0.0);
}

TEST(Jobs, GlueWarnsPastSeamRecurrence) {
  // L = 40 pi, v_star = 16: the pair is half a box apart at t = 40 pi / 32 = 3.93.
  const auto dir = out_dir("recurrence");
  std::string cfg = kSmallGlue;
  cfg.replace(cfg.find("t_max = 2.0"), 11, "t_max = 4.5");
  ASSERT_EQ(run(cfg, dir).exit_code, 0);
  const auto m = manifest(dir);
  ASSERT_TRUE(m.contains("warnings"));
  EXPECT_NE(m.at("warnings")[0].get<std::string>().find("seam recurrence"), std::string::npos);
}

TEST(Jobs, RerunIsByteIdentical) {
  const auto a = out_dir("rerun_a"), b = out_dir("rerun_b");
  ASSERT_EQ(run(kSmallGlue, a).exit_code, 0);
  ASSERT_EQ(run(kSmallGlue, b).exit_code, 0);
  for (const char* f : {"convergence.csv", "increments.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Jobs, ManifestConfigReruns) {
  const auto a = out_dir("from_manifest_a"), b = out_dir("from_manifest_b");
  ASSERT_EQ(run(kSmallGlue, a).exit_code, 0);
  JobOptions o;
  o.out_dir = b;
  ASSERT_EQ(run_job("", load_config(a / "config.json"), o).exit_code, 0);
  EXPECT_EQ(slurp(a / "convergence.csv"), slurp(b / "convergence.csv"));
}

TEST(Jobs, CheckR1OutOfRangeExitsTwo) {
  const auto dir = out_dir("r1");
  const auto r = run("job = \"check\"\n[generator]\nvbar = 32\n[check]\nkind = \"train_admissibility\"\nr1 = 5.0\n", dir);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.message.find("integrability window"), std::string::npos);
  EXPECT_EQ(manifest(dir).at("error").at("kind"), "R1OutOfRange");
}

TEST(Jobs, GlueRejectsGrossPitaevskii) {
  const auto r = run("job = \"glue\"\n[nonlinearity]\nkind = \"gross_pitaevskii\"\n[grid]\nN = 256\n[train.left_kink]\nv = 0.5\n",
                     out_dir("gp"));
  EXPECT_EQ(r.exit_code, 2);
}

TEST(Jobs, RuntimeErrorsExitOne) {
  // v = 0.123 is not a multiple of the velocity quantum 0.05.
  const auto r = run("job = \"assemble\"\n[grid]\nN = 256\n[[train.solitons]]\nv = 0.123\n", out_dir("quant"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.message.find("4 pi / L"), std::string::npos);
}

TEST(Jobs, SweepDeduplicatesAndSorts) {
  const auto dir = out_dir("sweep");
  std::ostringstream log;
  JobOptions o;
  o.out_dir = dir;
  o.log = &log;
  o.workers = 2;
  const auto cfg = parse_config(
      "job = \"sweep\"\n[nonlinearity]\nkind = \"combined\"\nalpha1 = 1.0\nalpha2 = 2.0\n"
      "[check]\nkind = \"exponents\"\nbeta2 = 1.5\n"
      "[sweep]\naxis = \"check.beta1\"\nvalues = [1.0, 0.75, 1.0, 1.25]\njob = \"check\"\n",
      ConfigFormat::Toml, "sweep");
  const auto r = run_job("", cfg, o);
  ASSERT_EQ(r.exit_code, 0) << r.message;
  EXPECT_NE(log.str().find("duplicate"), std::string::npos);
  const auto rates = slurp(dir / "rates.csv");
  std::istringstream lines(rates);
  std::string header, row;
  std::getline(lines, header);
  EXPECT_EQ(header.substr(0, 16), "value,exit_code,");
  std::vector<std::string> first_cells;
  while (std::getline(lines, row)) first_cells.push_back(row.substr(0, row.find(',')));
  EXPECT_EQ(first_cells, (std::vector<std::string>{"0.75", "1", "1.25"}));
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(fs::exists(dir / ("point_00" + std::to_string(i)) / "manifest.json"));
}

TEST(Jobs, SweepWorkerCountDoesNotChangeOutput) {
  const std::string cfg =
      "job = \"sweep\"\n[nonlinearity]\nkind = \"combined\"\nalpha1 = 1.0\nalpha2 = 2.0\n"
      "[check]\nkind = \"exponents\"\nbeta2 = 1.5\n"
      "[sweep]\naxis = \"check.beta1\"\nvalues = [0.7, 0.9, 1.1, 1.3]\njob = \"check\"\n";
  const auto a = out_dir("w1"), b = out_dir("w3");
  ASSERT_EQ(run(cfg, a, 1).exit_code, 0);
  ASSERT_EQ(run(cfg, b, 3).exit_code, 0);
  EXPECT_EQ(slurp(a / "rates.csv"), slurp(b / "rates.csv"));
}

TEST(Jobs, SweepRecordsPointFailures) {
  // beta1 = 0.1 is infeasible for beta2 = 1.5; the sweep still aggregates.
  const auto dir = out_dir("sweep_fail");
  const auto r = run(
      "job = \"sweep\"\n[nonlinearity]\nkind = \"combined\"\nalpha1 = 1.0\nalpha2 = 2.0\n"
      "[check]\nkind = \"exponents\"\nbeta2 = 1.5\n"
      "[sweep]\naxis = \"check.beta1\"\nvalues = [0.1, 1.0]\njob = \"check\"\n",
      dir);
  EXPECT_EQ(r.exit_code, 0);
  const auto m = manifest(dir);
  EXPECT_EQ(m.at("points")[0].at("exit_code"), 2);
  EXPECT_EQ(m.at("points")[1].at("exit_code"), 0);
}

TEST(Jobs, EmptySweepAxisIsAnError) {
  const auto r = run("job = \"sweep\"\n[sweep]\naxis = \"train.v_star\"\nvalues = []\n", out_dir("empty"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.message.find("empty"), std::string::npos);
}

TEST(Jobs, ProfileAndAssembleArtifacts) {
  const auto p = out_dir("profile");
  ASSERT_EQ(run("job = \"profile\"\n[profile]\nmethod = \"shooting\"\nomega = 1.0\n", p).exit_code, 0);
  EXPECT_TRUE(fs::exists(p / "profile.prof"));
  EXPECT_TRUE(fs::exists(p / "profile.csv"));
  const auto a = out_dir("assemble");
  ASSERT_EQ(run("job = \"assemble\"\n[grid]\nN = 1024\n[train]\nv_star = 8\n[assemble]\nt_end = 4.0\nsamples = 41\n", a).exit_code, 0);
  EXPECT_TRUE(fs::exists(a / "source_norms.csv"));
  EXPECT_TRUE(fs::exists(a / "source_fit.json"));
}

TEST(Jobs, EvolveWritesConservedSeries) {
  const auto dir = out_dir("evolve");
  const auto r = run("job = \"evolve\"\n[grid]\nN = 512\nL_over_pi = 40\n[[train.solitons]]\nv = 1.0\n"
                     "[evolve]\nt1 = 0.5\nsnapshot_stride = 100\nwrite_snapshots = true\n",
                     dir);
  ASSERT_EQ(r.exit_code, 0) << r.message;
  EXPECT_EQ(slurp(dir / "conserved.csv").substr(0, 26), "t,mass,energy,momentum\n0,4");
  EXPECT_LT(r.summary.at("mass_drift").get<double>(), 1e-10);
  EXPECT_EQ(manifest(dir).at("snapshot_times").size(), 6u);
}

TEST(Jobs, WorkerResolution) {
  EXPECT_EQ(resolve_workers(4), 4);
  ::setenv("SOLITONFORGE_WORKERS", "3", 1);
  EXPECT_EQ(resolve_workers(std::nullopt), 3);
  ::unsetenv("SOLITONFORGE_WORKERS");
  EXPECT_EQ(resolve_workers(std::nullopt), 1);
}
