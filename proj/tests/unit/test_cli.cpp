#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

std::string cli() {
  const char* e = std::getenv("MPW_CLI");
  return e ? e : "mpw";
}

Run run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + cli() + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::path(testing::TempDir()) / ("mpw_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    std::vector<double> r;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) r.push_back(std::stod(tok));
    rows.push_back(r);
  }
  return rows;
}

const std::string configs = MPW_CONFIG_DIR;

}  // namespace

TEST(Cli, BoxLevelsTable) {
  auto d = scratch("box");
  auto r = run("run box --levels 5 --out " + d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  auto rows = read_csv(d / "box" / "levels.csv");
  ASSERT_EQ(rows.size(), 5u);
  for (auto& row : rows) {
    const double e = M_PI * M_PI * row[0] * row[0] / 2;
    EXPECT_NEAR(row[2], e, 1e-12 * e);
  }
}

TEST(Cli, EprChshTable) {
  auto d = scratch("epr");
  auto r = run("run epr --angles 0,45,90,135 --out " + d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("CHSH S = 2.8284"), std::string::npos) << r.out;
  auto j = json::parse(slurp(d / "epr" / "chsh.json"));
  EXPECT_NEAR(j["S"].get<double>(), 2 * std::sqrt(2.0), 1e-12);
  EXPECT_LE(j["binary_model_S"].get<double>(), 2.01);
  EXPECT_EQ(read_csv(d / "epr" / "correlations.csv").size(), 16u);
}

TEST(Cli, TwoSlitScreenAndResidual) {
  auto d = scratch("slit");
  auto r = run("run two-slit --screen 10 --config " + configs + "/two-slit.json --out " + d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  auto rows = read_csv(d / "two-slit" / "screen.csv");
  ASSERT_EQ(rows.size(), 121u);
  EXPECT_NEAR(rows[0][1], rows[120][1], 1e-12 * rows[60][1]);
  auto res = json::parse(slurp(d / "two-slit" / "residual.json"));
  EXPECT_TRUE(res.contains("l2_rel"));
}

TEST(Cli, EveryArtifactCarriesConfigHash) {
  auto d = scratch("hash");
  for (std::string s : {"harmonic", "tunneling", "coulomb", "kepler", "aharonov-bohm"}) {
    auto r = run("run " + s + " --config " + configs + "/" + s + ".json --out " + d.string());
    ASSERT_EQ(r.code, 0) << s << "\n" << r.out;
    const std::string hash = json::parse(slurp(d / s / "report.json"))["config_hash"];
    for (auto& f : fs::directory_iterator(d / s))
      EXPECT_NE(slurp(f.path()).find(hash), std::string::npos) << f.path();
  }
}

TEST(Cli, OutputsAreBitwiseDeterministic) {
  auto a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(run("run tunneling --seed 7 --out " + a.string()).code, 0);
  ASSERT_EQ(run("run tunneling --seed 7 --out " + b.string()).code, 0);
  std::size_t n = 0;
  for (auto& f : fs::directory_iterator(a / "tunneling")) {
    EXPECT_EQ(slurp(f.path()), slurp(b / "tunneling" / f.path().filename())) << f.path();
    ++n;
  }
  EXPECT_EQ(n, 4u);
  auto c = scratch("det_c");
  ASSERT_EQ(run("run tunneling --seed 8 --out " + c.string()).code, 0);
  EXPECT_NE(slurp(a / "tunneling" / "wave.csv"), slurp(c / "tunneling" / "wave.csv"));
}

TEST(Cli, OutDirFromEnvironment) {
  auto d = scratch("env");
  auto r = run("run kepler", "MPW_OUT_DIR=" + d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(d / "kepler" / "orbit.csv"));
}

TEST(Cli, GridScaleRefines) {
  auto d = scratch("scale");
  ASSERT_EQ(run("run harmonic --grid-scale 2 --out " + d.string()).code, 0);
  EXPECT_EQ(read_csv(d / "harmonic" / "wave.csv").size(), 601u);
}

TEST(Cli, SchemaDump) {
  auto r = run("dump-config-schema");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  for (std::string s : {"harmonic", "box", "tunneling", "two-slit", "aharonov-bohm", "coulomb", "kepler", "epr",
                        "acceptance"}) {
    ASSERT_TRUE(j.contains(s)) << s;
    EXPECT_EQ(j[s]["additionalProperties"], false);
  }
  EXPECT_EQ(j["box"]["properties"]["model"]["properties"]["L"]["type"], "number");
  EXPECT_EQ(run("dump-config-schema nope").code, 2);
}

TEST(Cli, BadConfigIsRejected) {
  auto d = scratch("bad");
  std::ofstream(d / "unknown.json") << R"({"model": {"Lx": 2}})";
  auto r = run("run box --config " + (d / "unknown.json").string() + " --out " + d.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("model.Lx"), std::string::npos) << r.out;
  std::ofstream(d / "type.json") << R"({"grid": {"nodes": "many"}})";
  EXPECT_EQ(run("run box --config " + (d / "type.json").string() + " --out " + d.string()).code, 2);
  std::ofstream(d / "tol.json") << R"({"tolerances": {"box.nonsense": 1}})";
  EXPECT_EQ(run("verify-all --config " + (d / "tol.json").string() + " --out " + d.string()).code, 2);
  EXPECT_NE(run("run nosuch").code, 0);
}

TEST(Cli, TamperedToleranceFailsNamedCheck) {
  auto d = scratch("tamper");
  auto j = json::parse(slurp(configs + "/acceptance.json"));
  j["tolerances"]["box.spectrum_rel"] = 1e-30;
  std::ofstream(d / "acceptance.json") << j.dump();
  auto r = run("verify-all --config " + d.string() + " --filter box --out " + d.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("criterion 3: FAIL"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("c3.spectrum"), std::string::npos) << r.out;
  auto s = json::parse(slurp(d / "verify" / "summary.json"));
  EXPECT_FALSE(s["passed"].get<bool>());
}

TEST(Cli, VerifyFilterSelectsSuite) {
  auto d = scratch("filter");
  auto r = run("verify-all --filter box,epr --out " + d.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("criterion 3: PASS"), std::string::npos);
  EXPECT_NE(r.out.find("criterion 7: PASS"), std::string::npos);
  EXPECT_EQ(r.out.find("criterion 1:"), std::string::npos);
  auto s = json::parse(slurp(d / "verify" / "summary.json"));
  EXPECT_EQ(s["criteria"].size(), 2u);
  EXPECT_EQ(s["config_hash"].get<std::string>().size(), 16u);
}
