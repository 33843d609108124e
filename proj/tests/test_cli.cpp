#include <gmock/gmock.h>
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + PRIVAFLOW_CLI + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("privaflow_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string out(const std::string& sub = "") const { return "--out " + (dir_ / sub).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, KeygenWritesOneFilePerDriverAndPrintsSizes) {
  const auto r = run("keygen --drivers 10 --cells 12 " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  std::size_t keys = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "keys" / "drivers")) keys += e.path().extension() == ".key";
  EXPECT_EQ(keys, 10u);
  EXPECT_TRUE(fs::exists(dir_ / "keys" / "dk.bin"));
  EXPECT_TRUE(fs::exists(dir_ / "keys" / "mpk.bin"));
  EXPECT_EQ(fs::file_size(dir_ / "keys" / "drivers" / "driver_00003.key"), 133u);
  EXPECT_EQ(fs::file_size(dir_ / "keys" / "pools" / "driver_00003.pool"), 9u + 12u * 103u);
  const auto line = [&](const std::string& item) {
    const auto at = r.out.find(item);
    return at == std::string::npos ? std::string{} : r.out.substr(at, r.out.find('\n', at) - at);
  };
  EXPECT_THAT(line("ciphertext group elements"), ::testing::MatchesRegex(".* 96 +64 +DIFFERS.*")) << r.out;
  EXPECT_THAT(line("driver key material"), ::testing::MatchesRegex(".* 128 +66 +DIFFERS.*"));
  EXPECT_THAT(line("report payload, k=5"), ::testing::MatchesRegex(".* 480 +320 .*"));
}

TEST_F(Cli, SimulateWithStoredKeysIsExact) {
  ASSERT_EQ(run("keygen --drivers 12 --cells 20 " + out()).code, 0);
  const auto r = run("simulate --drivers 12 --cells 20 --epochs 4 --ground-truth " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("mismatches=0 of 80"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "density.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "truth.json"));
  // the decrypted series and ground truth agree cell for cell
  EXPECT_EQ(slurp(dir_ / "density.csv"), slurp(dir_ / "truth.csv"));
}

TEST_F(Cli, PartialReportingUndercountsOnly) {
  const auto r = run("simulate --keygen --drivers 15 --cells 12 --epochs 6 --report-prob 0.8 " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(slurp(dir_ / "summary.json"));
  EXPECT_GT(j["total"]["mismatches"].get<int>(), 0);
  EXPECT_EQ(j["total"]["overcounts"], 0);
  EXPECT_EQ(j["total"]["undercounts"], j["total"]["mismatches"]);
}

TEST_F(Cli, RunsRepeatWithConsecutiveSeeds) {
  const auto r = run("simulate --keygen --drivers 6 --cells 6 --epochs 3 --runs 3 --seed 40 " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(slurp(dir_ / "summary.json"));
  ASSERT_EQ(j["runs"].size(), 3u);
  EXPECT_EQ(j["runs"][2]["seed"], 42);
  EXPECT_TRUE(fs::exists(dir_ / "run_2" / "density.csv"));
}

TEST_F(Cli, OutputsAreIdempotent) {
  const std::string args = "simulate --keygen --drivers 8 --cells 9 --epochs 3 --seed 9 ";
  ASSERT_EQ(run(args + out("a")).code, 0);
  ASSERT_EQ(run(args + out("b")).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "density.csv"), slurp(dir_ / "b" / "density.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "density.json"), slurp(dir_ / "b" / "density.json"));
  EXPECT_EQ(slurp(dir_ / "a" / "summary.json"), slurp(dir_ / "b" / "summary.json"));
  ASSERT_EQ(run("keygen --drivers 3 --cells 4 --k-anon 2 --seed 9 " + out("c")).code, 0);
  ASSERT_EQ(run("keygen --drivers 3 --cells 4 --k-anon 2 --seed 9 " + out("d")).code, 0);
  EXPECT_EQ(slurp(dir_ / "c" / "keys" / "dk.bin"), slurp(dir_ / "d" / "keys" / "dk.bin"));
}

TEST_F(Cli, SeedPrecedence) {
  const std::string args = "simulate --ground-truth-only --drivers 30 --epochs 5 ";
  ASSERT_EQ(run(args + out("env7"), "PRIVAFLOW_SEED=7").code, 0);
  ASSERT_EQ(run(args + "--seed 7 " + out("flag7")).code, 0);
  ASSERT_EQ(run(args + "--seed 7 " + out("flag_over_env"), "PRIVAFLOW_SEED=8").code, 0);
  ASSERT_EQ(run(args + out("env8"), "PRIVAFLOW_SEED=8").code, 0);
  const auto truth = [&](const char* d) { return slurp(dir_ / d / "truth.csv"); };
  EXPECT_EQ(truth("env7"), truth("flag7"));
  EXPECT_EQ(truth("flag_over_env"), truth("flag7"));
  EXPECT_NE(truth("env8"), truth("env7"));
  EXPECT_EQ(run(args + out("bad"), "PRIVAFLOW_SEED=abc").code, 2);
}

TEST_F(Cli, ConfigFileAndFlagOverride) {
  std::ofstream(dir_ / "run.cfg") << "# fleet\ndrivers = 7\ncells = 10\nk_anon=2\n\nepochs = 2 # short\n";
  ASSERT_EQ(run("keygen --config " + (dir_ / "run.cfg").string() + " " + out("a")).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "a" / "keys" / "keys.json"))["n_drivers"], 7);
  ASSERT_EQ(run("keygen --config " + (dir_ / "run.cfg").string() + " --drivers 4 " + out("b")).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "b" / "keys" / "keys.json"))["n_drivers"], 4);

  std::ofstream(dir_ / "bad.cfg") << "drivers = 7\ncolour = blue\n";
  const auto r = run("keygen --config " + (dir_ / "bad.cfg").string() + " " + out("c"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("colour"), std::string::npos);
  std::ofstream(dir_ / "noeq.cfg") << "drivers 7\n";
  EXPECT_EQ(run("keygen --config " + (dir_ / "noeq.cfg").string() + " " + out("d")).code, 2);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("simulate --keygen --k-anon 0 " + out()).code, 2);
  EXPECT_EQ(run("simulate --keygen --report-prob 1.5 " + out()).code, 2);
  EXPECT_EQ(run("keygen --set security_level=192 " + out()).code, 2);
  EXPECT_EQ(run("keygen --set nonsense=1 " + out()).code, 2);
  EXPECT_EQ(run("keygen --drivers many " + out()).code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("keygen --config /nonexistent/run.cfg").code, 4);
  EXPECT_EQ(run("simulate --drivers 3 --keys /nonexistent/keys " + out()).code, 4);
  ASSERT_EQ(run("keygen --drivers 3 --cells 4 --k-anon 2 " + out()).code, 0);
  EXPECT_EQ(run("simulate --drivers 4 --cells 4 --k-anon 2 " + out()).code, 3);  // keys for another fleet size
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, PoolExhaustionIsReported) {
  const auto r =
      run("simulate --keygen --drivers 4 --cells 6 --k-anon 2 --epochs 3 --set replenish=false "
          "--set pool_per_driver=4 " + out());
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_NE(r.out.find("PoolExhausted"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("provision at least 6"), std::string::npos) << r.out;
}

TEST_F(Cli, ExportThreeWeeks) {
  const std::string args = "export --drivers 40 --epochs 6048 --seed 3 ";
  const auto r = run(args + out("a"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto m = nlohmann::json::parse(slurp(dir_ / "a" / "dataset" / "manifest.json"));
  EXPECT_EQ(m["window"]["horizons"], nlohmann::json({1, 3, 6, 12}));
  for (const char* split : {"train", "val", "test"}) EXPECT_GT(m["split"]["splits"][split]["count"].get<int>(), 0);
  ASSERT_EQ(run(args + out("b")).code, 0);
  const auto m2 = nlohmann::json::parse(slurp(dir_ / "b" / "dataset" / "manifest.json"));
  EXPECT_EQ(m["files"], m2["files"]);
}

TEST_F(Cli, ExportFromSimulatedSeries) {
  ASSERT_EQ(run("simulate --ground-truth-only --drivers 10 --cells 6 --epochs 200 " + out()).code, 0);
  const auto r = run("export --set export_complete_only=false --cells 6 --series " + (dir_ / "truth.csv").string() +
                     " " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("173 samples from 200 epochs"), std::string::npos) << r.out;
  // no weekly window fits in 200 epochs
  EXPECT_EQ(run("export --cells 6 --series " + (dir_ / "truth.csv").string() + " " + out()).code, 2);
}

TEST_F(Cli, BenchWritesTables) {
  const auto r = run("bench --cells 20 --set bench_cells=2,4,8 --set bench_drivers=2,4 --set bench_repetitions=2 " +
                     out());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("R^2"), std::string::npos);
  EXPECT_NE(r.out.find("monotonic in drivers"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "bench_encrypt.csv"));
  const auto csv = slurp(dir_ / "bench_decrypt.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "drivers,cells,median_ms,rep1_ms,rep2_ms");
  EXPECT_EQ(run("bench --cells 20 --set bench_cells=40 " + out()).code, 2);
}
