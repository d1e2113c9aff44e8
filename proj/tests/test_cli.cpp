#include <filesystem>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"

using namespace tfweyl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::path(testing::TempDir()) / "tfweyl_cli" / name;
  fs::remove_all(dir);
  return dir;
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "tfweyl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

cli::RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "tfweyl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return *cli::parse(static_cast<int>(argv.size()), argv.data());
}

std::map<std::string, std::string> tree_hashes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = io::sha256_file(e.path());
  return out;
}

const std::string kChirp = R"({"kind":"chirp","sign":-1,"factor":"gaussian"})";

}  // namespace

TEST(CliParse, Defaults) {
  const auto c = parse({"operator"});
  EXPECT_EQ(c.command, cli::Command::op);
  EXPECT_EQ(c.base(), Axis(128, 12.0));
  EXPECT_EQ(c.stride, 4u);
  EXPECT_EQ(c.make_weight().kind(), WeightKind::log1p);
  EXPECT_EQ(parse({"diagnose"}).base(), diagnostic_base(64));
}

TEST(CliParse, FlagsOverrideConfigFile) {
  const auto dir = scratch("cfg");
  io::write_file(dir / "run.json",
                 R"({"command":"weights","weight":{"kind":"power","a":2,"c":3},"lambda":[1,2],"n":32})");
  const auto c = parse({"--config", (dir / "run.json").string(), "--a", "0.25", "--lambda", "0.5,1,3"});
  EXPECT_EQ(c.command, cli::Command::weights);
  EXPECT_EQ(c.make_weight().kind(), WeightKind::power);
  EXPECT_DOUBLE_EQ(c.a, 0.25);
  EXPECT_DOUBLE_EQ(c.c, 3.0);
  EXPECT_EQ(c.lambda_list, (std::vector<double>{0.5, 1.0, 3.0}));
  EXPECT_EQ(c.base().n, 32u);
}

TEST(CliParse, KindIsAnAliasOfWeight) {
  EXPECT_EQ(parse({"weights", "--kind", "logpower", "--a", "2"}).make_weight().kind(), WeightKind::logpower);
}

TEST(CliParse, FixtureSpecRoundTrips) {
  const auto spec = io::json::parse(
      R"({"kind":"tensor","first":{"kind":"hermite","order":3},"second":{"kind":"reflect","inner":{"kind":"bump","a":0.5,"b":2.0,"smoothness":2}},"conjugate_second":true})");
  const auto f = cli::fixture_from_json(spec);
  EXPECT_EQ(f->describe(), cli::fixture_from_json(cli::fixture_to_json(*f))->describe());
  EXPECT_EQ(cli::fixture_to_json(*f)["second"]["inner"]["smoothness"], 2);
}

TEST(CliExit, ConfigErrorsReturnTwo) {
  EXPECT_EQ(invoke({}), 2);
  EXPECT_EQ(invoke({"frobnicate"}), 2);
  EXPECT_EQ(invoke({"weights", "--weight", "cubic"}), 2);
  EXPECT_EQ(invoke({"diagnose", "--lambda", "2,1"}), 2);
  EXPECT_EQ(invoke({"diagnose", "--n", "48"}), 2);
  EXPECT_EQ(invoke({"demo", "--case", "nope"}), 2);
  EXPECT_EQ(invoke({"operator", "--symbol", R"({"kind":"wavelet"})"}), 2);
  const auto dir = scratch("badcfg");
  io::write_file(dir / "bad.json", R"({"command":"weights","colour":1})");
  EXPECT_EQ(invoke({"--config", (dir / "bad.json").string()}), 2);
}

TEST(CliExit, MissingConfigIsIoError) { EXPECT_EQ(invoke({"--config", "/nonexistent/run.json"}), 3); }

TEST(CliExit, NumericErrorReturnsOne) {
  const auto dir = scratch("numeric");
  EXPECT_EQ(invoke({"operator", "--symbol", R"({"kind":"gaussian"})", "--out", dir.string()}), 1);
}

TEST(CliWeights, PassSetExcludesAlphaPrime) {
  const auto dir = scratch("weights");
  EXPECT_EQ(invoke({"weights", "--weight", "power", "--a", "0.5", "--out", dir.string()}), 0);
  const auto j = io::json::parse(io::read_file(dir / "weights.json"));
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_TRUE(j["conditions"].contains("alpha_prime"));
  EXPECT_EQ(j["config"]["weight"]["kind"], "power");
}

TEST(CliDiagnose, ChirpWritesReportsAndHashes) {
  const auto dir = scratch("diag");
  EXPECT_EQ(invoke({"diagnose", "--symbol", kChirp, "--out", dir.string()}), 0);
  const auto j = io::json::parse(io::read_file(dir / "diagnose.json"));
  EXPECT_EQ(j["verdicts"]["weyl"], "FAIL");
  EXPECT_EQ(j["verdicts"]["localization"], "COMPACT_LIKE");
  EXPECT_EQ(j["implication_violations"], 0);
  EXPECT_EQ(j["inputs"]["a"], io::sha256_file(dir / "inputs" / "a.tfwf"));
  const auto w = io::json::parse(io::read_file(dir / "weyl.json"));
  EXPECT_EQ(w["inputs"]["a"], j["inputs"]["a"]);
  EXPECT_EQ(io::read_file(dir / "weyl_mu_star.csv").substr(0, 15), "lambda,mu_star\n");
  EXPECT_EQ(io::read_file(dir / "convolutor_mu_star.csv").substr(0, 15), "mu,lambda_star\n");
}

TEST(CliDiagnose, OneDimensionalSymbolRunsMultiplier) {
  const auto dir = scratch("diag1");
  EXPECT_EQ(invoke({"diagnose", "--symbol", R"({"kind":"gaussian"})", "--out", dir.string()}), 0);
  const auto j = io::json::parse(io::read_file(dir / "diagnose.json"));
  EXPECT_EQ(j["verdicts"]["multiplier"], "COMPACT_LIKE");
  EXPECT_TRUE(j["verdicts"].contains("convolutor"));
  EXPECT_FALSE(j["verdicts"].contains("weyl"));
}

TEST(CliOperator, UnitSymbolSpectrumLiesInUnitInterval) {
  const auto dir = scratch("op");
  EXPECT_EQ(invoke({"operator", "--n", "64", "--l", "8", "--symbol", R"({"kind":"constant"})", "--out", dir.string()}), 0);
  const auto j = io::json::parse(io::read_file(dir / "operator.json"));
  EXPECT_EQ(j["outputs"]["operator"], io::sha256_file(dir / "operator.tfwf"));
  EXPECT_NEAR(j["largest_eigenvalue"][0].get<double>(), 1.0, 1e-12);
  const auto d = io::decode(io::read_file(dir / "operator.tfwf"));
  ASSERT_TRUE(d.op.has_value());
  EXPECT_EQ(d.op->grid, Axis(64, 8.0));
  const std::string csv = io::read_file(dir / "spectrum.csv");
  ASSERT_EQ(csv.substr(0, 20), "index,re,im,modulus\n");
  std::stringstream ss(csv.substr(20));
  std::string row;
  std::size_t rows = 0, unit = 0;
  while (std::getline(ss, row)) {
    double re = 0, im = 0;
    ASSERT_EQ(std::sscanf(row.c_str(), "%*[^,],%lf,%lf", &re, &im), 2) << row;
    EXPECT_GE(re, -1e-12) << row;
    EXPECT_LE(re, 1.0 + 1e-12) << row;
    EXPECT_LE(std::abs(im), 1e-12) << row;
    unit += std::abs(re - 1.0) < 1e-8 ? 1 : 0;
    ++rows;
  }
  EXPECT_GE(unit, 16u);
  EXPECT_EQ(rows, 64u);
}

TEST(CliDeterminism, RerunsAreByteIdentical) {
  std::map<std::string, std::string> h[2];
  for (int k = 0; k < 2; ++k) {
    const auto dir = scratch("rerun" + std::to_string(k));
    invoke({"diagnose", "--symbol", kChirp, "--out", dir.string()});
    invoke({"operator", "--n", "32", "--l", "6", "--symbol", kChirp, "--out", dir.string()});
    invoke({"demo", "--case", "rank-one", "--out", dir.string()});
    h[k] = tree_hashes(dir);
  }
  EXPECT_GT(h[0].size(), 10u);
  EXPECT_EQ(h[0], h[1]);
}
