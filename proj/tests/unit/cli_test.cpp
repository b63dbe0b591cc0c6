#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const std::string cmd = std::string(ENTRY_GUIDE_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  static fs::path dir() {
    static const fs::path d = [] {
      const fs::path p = fs::temp_directory_path() / "entry_cli_test";
      fs::remove_all(p);
      fs::create_directories(p);
      return p;
    }();
    return d;
  }
  static std::string path(const std::string& name) { return (dir() / name).string(); }
  static const std::string& profile() {
    static const std::string p = [] {
      const std::string out = path("profile.csv");
      EXPECT_EQ(run("refgen -o " + out), 0);
      return out;
    }();
    return p;
  }
};

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("refgen -c /nonexistent.ini -o " + path("x.csv")), 2);
  EXPECT_EQ(run("simulate -m pid -o " + path("sim")), 2);
  EXPECT_EQ(run("mc -n 0 -o " + path("mc0")), 2);
  EXPECT_EQ(run("simulate -m state-feedback -p /nonexistent.csv -o " + path("sim")), 2);
}

TEST_F(Cli, ConfigErrorExitsTwo) {
  const std::string ini = path("bad.ini");
  std::ofstream(ini) << "[guidance]\nfoo = 1\n";
  EXPECT_EQ(run("certify -c " + ini), 2);
}

TEST_F(Cli, RefgenIsDeterministic) {
  const std::string again = path("profile2.csv");
  ASSERT_EQ(run("refgen -o " + again), 0);
  const std::string text = slurp(profile());
  EXPECT_EQ(text, slurp(again));
  const auto pos = text.find("# s_target_m=");
  ASSERT_NE(pos, std::string::npos);
  const double s = std::stod(text.substr(pos + 13));
  EXPECT_NEAR(s, 723.32e3, 0.05 * 723.32e3);
}

TEST_F(Cli, SimulateWritesSummaryAndLog) {
  const std::string out = path("sim_of");
  ASSERT_EQ(run("simulate -m output-feedback -p " + profile() + " -o " + out), 0);
  const auto j = nlohmann::json::parse(slurp(fs::path(out) / "summary.json"));
  EXPECT_TRUE(j.contains("downrange_error_km"));
  EXPECT_LT(std::abs(j["downrange_error_km"].get<double>()), 0.5);
  const std::string log = slurp(fs::path(out) / "trajectory.csv");
  EXPECT_NE(log.find("xhat2"), std::string::npos);
}

TEST_F(Cli, CertifyWritesReport) {
  const std::string out = path("cert.json");
  ASSERT_EQ(run("certify -o " + out), 0);
  const auto j = nlohmann::json::parse(slurp(out));
  EXPECT_TRUE(j.contains("state_feedback"));
  EXPECT_TRUE(j.contains("output_feedback"));
  EXPECT_EQ(j["P0_residual"].get<double>() <= 1e-10, true);
}

TEST_F(Cli, CertifyWithUnitGains) {
  const std::string ini = path("unit.ini");
  std::ofstream(ini) << "[guidance]\na = 1\nb = 1\neps0 = 0.5\n[observer]\neps = 0.01\n";
  const std::string out = path("cert_unit.json");
  ASSERT_EQ(run("certify -c " + ini + " -o " + out), 0);
  const auto j = nlohmann::json::parse(slurp(out));
  EXPECT_NEAR(j["P0"][0][0].get<double>(), 1.5, 1e-12);
  EXPECT_NEAR(j["P0"][0][1].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(j["P0"][1][1].get<double>(), 1.0, 1e-12);
  EXPECT_FALSE(j["eps1_star"].is_null());
}

TEST_F(Cli, MonteCarloIsByteIdenticalAcrossThreadCounts) {
  const std::string a = path("mc_a");
  const std::string b = path("mc_b");
  ASSERT_EQ(run("mc -n 6 --seed 11 -j 1 -p " + profile() + " -o " + a), 0);
  ASSERT_EQ(run("mc -n 6 --seed 11 -j 3 -p " + profile() + " -o " + b), 0);
  EXPECT_EQ(slurp(fs::path(a) / "mc_stats.json"), slurp(fs::path(b) / "mc_stats.json"));
  EXPECT_EQ(slurp(fs::path(a) / "mc_scatter.csv"), slurp(fs::path(b) / "mc_scatter.csv"));
  const auto j = nlohmann::json::parse(slurp(fs::path(a) / "mc_stats.json"));
  EXPECT_EQ(j["downrange_error_km"].size(), 4u);
  EXPECT_EQ(j["runs"].get<int>(), 6);
}

}  // namespace
