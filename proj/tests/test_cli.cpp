#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "dysonprop/io.hpp"

namespace fs = std::filesystem;
using dysonprop::json;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dysonprop_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return dysonprop::cli::run(args, out_, err_);
  }

  json read_json(const std::string& name) { return dysonprop::read_json_file((dir_ / name).string()); }

  std::string read_text(const std::string& name) {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST(Sha256, KnownDigest) {
  EXPECT_EQ(dysonprop::cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(CliTest, EvolveFreeModel) {
  const std::string cfg = write("c.json", R"({"model": {"grades": [0, 1], "H0": [[1, 0], [0, 2]],
      "H1": [[0, 0], [0, 0]]}, "t_end": 1.0, "times": [0, 0.5, 1.0]})");
  ASSERT_EQ(run({"evolve", "-c", cfg, "-o", dir_.string()}), dysonprop::cli::kOk) << err_.str();
  const json j = read_json("evolve.json");
  EXPECT_EQ(j["series"]["achieved_order"], 0);
  const json states = j["trajectory"]["states"];
  ASSERT_EQ(states.size(), 3u);
  // e^{-i t} on the first basis vector.
  EXPECT_NEAR(states[2][0][0].get<double>(), std::cos(1.0), 1e-14);
  EXPECT_NEAR(states[2][0][1].get<double>(), -std::sin(1.0), 1e-14);
  EXPECT_EQ(j["meta"]["command"], "evolve");
  EXPECT_EQ(j["meta"]["config_digest"].get<std::string>().size(), 64u);
  const std::string csv = read_text("trajectory.csv");
  EXPECT_EQ(csv.rfind("time,norm,residual,config_digest,version\r\n", 0), 0u);
}

TEST_F(CliTest, HeisenbergRuns) {
  const std::string cfg = write("c.json", R"({"model": {"random": {"seed": 2, "dim": 6, "b": 1}},
      "observable": [[1, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0],
                     [0, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0]], "t_end": 0.5})");
  EXPECT_EQ(run({"heisenberg", "-c", cfg, "-o", dir_.string()}), dysonprop::cli::kOk) << err_.str() << out_.str();
  EXPECT_TRUE(read_json("heisenberg.json").contains("reports"));
}

TEST_F(CliTest, VerifySmallFleet) {
  const std::string cfg =
      write("v.json", R"({"fleet": {"count": 2, "min_dim": 4, "max_dim": 8}, "suite": {"tuples": 2, "pairs": 3}})");
  EXPECT_EQ(run({"verify", "-c", cfg, "-o", dir_.string()}), dysonprop::cli::kOk) << out_.str();
  const std::string xml = read_text("verify.xml");
  EXPECT_NE(xml.find("failures=\"0\""), std::string::npos);
}

TEST_F(CliTest, MissingFieldIsSchemaError) {
  const std::string cfg = write("c.json", R"({"t_end": 1.0})");
  EXPECT_EQ(run({"evolve", "-c", cfg, "-o", dir_.string()}), dysonprop::cli::kSchemaError);
  EXPECT_NE(err_.str().find("/model"), std::string::npos) << err_.str();
}

TEST_F(CliTest, MalformedJsonIsSchemaError) {
  const std::string cfg = write("c.json", "{\"model\": ");
  EXPECT_EQ(run({"evolve", "-c", cfg, "-o", dir_.string()}), dysonprop::cli::kSchemaError);
}

TEST_F(CliTest, AssumptionViolationExitCode) {
  const std::string cfg = write("c.json", R"({"model": {"grades": [0, 1], "H0": [[0, 1], [1, 0]],
      "H1": [[0, 0], [0, 0]]}})");
  EXPECT_EQ(run({"evolve", "-c", cfg, "-o", dir_.string()}), dysonprop::cli::kAssumptionError) << err_.str();
}

TEST_F(CliTest, TruncationExitCode) {
  const std::string cfg = write("c.json", R"({"model": {"random": {"seed": 3, "dim": 6, "b": 1, "coupling": 50}},
      "t_end": 20.0, "tol": 1e-14})");
  EXPECT_EQ(run({"evolve", "-c", cfg, "-o", dir_.string()}), dysonprop::cli::kTruncationError) << err_.str();
}

TEST_F(CliTest, UnknownOptionIsParseError) {
  EXPECT_EQ(run({"evolve", "--bogus"}), dysonprop::cli::kSchemaError);
  EXPECT_EQ(run({}), dysonprop::cli::kSchemaError);
}

TEST_F(CliTest, FlagsOverrideConfigAndDigest) {
  const std::string cfg = write("c.json", R"({"model": {"random": {"seed": 4, "dim": 5, "b": 1}}, "times": [0, 0.2]})");
  ASSERT_EQ(run({"evolve", "-c", cfg, "-o", (dir_ / "a").string(), "--t-end", "0.2"}), 0) << err_.str();
  ASSERT_EQ(run({"evolve", "-c", cfg, "-o", (dir_ / "b").string(), "--t-end", "0.3"}), 0) << err_.str();
  EXPECT_NE(read_json("a/evolve.json")["meta"]["config_digest"], read_json("b/evolve.json")["meta"]["config_digest"]);
}
