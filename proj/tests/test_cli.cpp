#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string(IONQEC_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

int cli_status_with_stderr(const std::string& args, std::string& err) {
  const fs::path errfile = fs::temp_directory_path() / "ionqec_cli_stderr.txt";
  const std::string cmd = std::string(IONQEC_CLI_PATH) + " " + args + " >/dev/null 2>" + errfile.string();
  const int raw = std::system(cmd.c_str());
  std::ifstream in(errfile);
  std::ostringstream os;
  os << in.rdbuf();
  err = os.str();
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ionqec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, EncodeReportsCodeword) {
  const std::string cfg = write_config("enc.json", R"({"scheme": "FourierSymmetrized", "logical": [[1,0],[0,0]]})");
  const CliRun r = cli("encode --config " + cfg + " --dump-state");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("in_code_space").get<bool>());
  EXPECT_EQ(j.at("excitation_weights"), nlohmann::json::array({2}));
  EXPECT_NEAR(j.at("state").at("amplitudes")[12][0].get<double>(), 0.5, 1e-12);
}

TEST_F(CliTest, PlanWarnsOnTableDiscrepancy) {
  const std::string fourier = write_config("f.json", R"({"scheme": "FourierSymmetrized", "decayed_ion": 3})");
  std::string err;
  EXPECT_EQ(cli_status_with_stderr("plan --config " + fourier, err), 0);
  EXPECT_EQ(err.find("warning"), std::string::npos);
  const CliRun r = cli("plan --config " + fourier);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("gate_count").at("cnots"), 5);
  EXPECT_EQ(j.at("gate_count").at("rotations"), 2);

  const std::string number =
      write_config("n.json", R"({"scheme": "NumberStateSymmetrized", "n_logical": 5, "decayed_ion": 4})");
  EXPECT_EQ(cli_status_with_stderr("plan --config " + number, err), 0);
  EXPECT_NE(err.find("warning"), std::string::npos);
}

TEST_F(CliTest, RunCircuitAppliesSteps) {
  const std::string cfg = write_config("c.json", R"({"n_ions": 2, "initial": 1,
      "circuit": [{"cnot": {"control": 1, "target": 2}}, {"pulse": {"ion": 1, "k": 3.141592653589793, "phi": -1.5707963267948966}}]})");
  const CliRun r = cli("run-circuit --config " + cfg + " --dump-state");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("gate_count").at("cnots"), 1);
  // |01> -> |11> -> |10> under the pi pulse on ion 1.
  EXPECT_NEAR(std::hypot(j["state"]["amplitudes"][2][0].get<double>(), j["state"]["amplitudes"][2][1].get<double>()),
              1.0, 1e-12);
}

TEST_F(CliTest, StorageExperimentIsDeterministic) {
  const std::string cfg = write_config(
      "s.json", R"({"scheme": "FourierSymmetrized", "t_max": 2, "grid": 21, "trajectories": 64, "efficiency": 0.7})");
  ASSERT_EQ(cli("storage-experiment --config " + cfg + " --seed 5 --out " + (dir_ / "a").string()).status, 0);
  ASSERT_EQ(cli("storage-experiment --config " + cfg + " --seed 5 --out " + (dir_ / "b").string()).status, 0);
  ASSERT_EQ(cli("storage-experiment --config " + cfg + " --seed 6 --out " + (dir_ / "c").string()).status, 0);
  for (const char* f : {"config.json", "timeline_corrected.csv", "timeline_uncorrected.csv", "summary.json"}) {
    ASSERT_TRUE(fs::exists(dir_ / "a" / f)) << f;
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  EXPECT_NE(slurp(dir_ / "a" / "timeline_corrected.csv"), slurp(dir_ / "c" / "timeline_corrected.csv"));
}

TEST_F(CliTest, VerifySuites) {
  const CliRun r = cli("verify counts");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\"WARN\""), std::string::npos);
  EXPECT_EQ(cli("verify algebra").status, 0);
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(cli("").status, 2);
  EXPECT_EQ(cli("verify nonsense").status, 2);
  EXPECT_EQ(cli("encode --config " + (dir_ / "missing.json").string()).status, 2);
  const std::string bad_json = write_config("bad.json", "{ not json");
  EXPECT_EQ(cli("encode --config " + bad_json).status, 2);
  const std::string bad_scheme = write_config("bs.json", R"({"scheme": "Steane"})");
  EXPECT_EQ(cli("encode --config " + bad_scheme).status, 2);
  const std::string bad_run = write_config("br.json", R"({"trajectories": -3})");
  EXPECT_EQ(cli("storage-experiment --config " + bad_run).status, 2);
  const std::string bad_circuit =
      write_config("bc.json", R"({"n_ions": 2, "circuit": [{"cnot": {"control": 1, "target": 7}}]})");
  EXPECT_EQ(cli("run-circuit --config " + bad_circuit).status, 2);
}
