#include "outage/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

namespace outage::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json call_json(std::vector<std::string> args) {
  args.push_back("--json");
  const Result r = call(args);
  EXPECT_EQ(r.code, 0) << r.err;
  return nlohmann::json::parse(r.out);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// CSV body rows of the tab block (k,x_k,outage_k).
std::vector<std::string> tab_rows(const std::string& csv) {
  std::vector<std::string> rows;
  for (const auto& line : split(csv, '\n')) {
    if (line.empty()) break;
    if (line != "k,x_k,outage_k") rows.push_back(line);
  }
  return rows;
}

TEST(CliOutage, ExponentialMedian) {
  const auto j = call_json({"outage", "--weights", "1", "--x", "0.6931"});
  EXPECT_EQ(j["schema_version"], "1");
  EXPECT_EQ(j["command"], "outage");
  EXPECT_NEAR(j["results"]["outage"].get<double>(), 0.5, 1e-4);
}

TEST(CliOutage, GradientEntriesAreEqual) {
  const auto j = call_json({"outage", "--weights", "0.5,0.5", "--x", "1", "--grad"});
  EXPECT_NEAR(j["results"]["outage"].get<double>(), 0.593994, 1e-6);
  const auto& g = j["results"]["gradient"];
  EXPECT_EQ(g["length"], 2);
  EXPECT_EQ(g["values"][0], g["values"][1]);
}

TEST(CliOutage, MonteCarloFields) {
  const auto j = call_json(
      {"outage", "--weights", "0.7,0.3", "--x", "1", "--mc", "1000000", "42"});
  const auto& r = j["results"];
  EXPECT_LT(std::abs(r["mc_p_hat"].get<double>() - r["outage"].get<double>()),
            4 * r["mc_stderr"].get<double>());
  EXPECT_EQ(r["mc_n"], 1000000);
  EXPECT_EQ(r["mc_seed"], 42);
}

TEST(CliOutage, UsageErrorsNameTheEntry) {
  auto r = call({"outage", "--weights", "0.5,x", "--x", "1"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("entry 2"), std::string::npos) << r.err;
  r = call({"outage", "--weights", "0.5,-0.1", "--x", "1"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("entry 2"), std::string::npos) << r.err;
  r = call({"outage", "--weights", "0.8,0.8", "--x", "1"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("sum"), std::string::npos);
  EXPECT_EQ(call({"outage", "--x", "1"}).code, kUsage);
  EXPECT_EQ(call({"outage", "--weights", "1", "--x", "1", "--mc", "10", "1"}).code, kUsage);
  EXPECT_EQ(call({"outage", "--weights", "1", "--x", "1", "--json", "--csv"}).code, kUsage);
}

TEST(CliOutage, JsonAndCsvCarryTheSameNumbers) {
  const std::vector<std::string> base{"outage", "--weights", "0.2,0.3,0.5", "--x",
                                      "0.9", "--grad", "--mc", "20000", "3"};
  const auto j = call_json(base);
  auto args = base;
  args.push_back("--csv");
  const Result c = call(args);
  ASSERT_EQ(c.code, 0);
  const auto lines = split(c.out, '\n');
  ASSERT_EQ(lines.size(), 2u);
  const auto head = split(lines[0], ',');
  const auto vals = split(lines[1], ',');
  ASSERT_EQ(head.size(), vals.size());
  const auto& r = j["results"];
  for (std::size_t i = 0; i < head.size(); ++i) {
    double expected = 0.0;
    if (head[i].rfind("gradient_", 0) == 0) {
      expected = r["gradient"]["values"][std::stoul(head[i].substr(9)) - 1];
    } else {
      expected = r[head[i]].get<double>();
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.14e", expected);
    EXPECT_EQ(std::stod(vals[i]), std::stod(buf)) << head[i];
  }
}

TEST(CliAlloc, Examples) {
  EXPECT_EQ(call_json({"alloc", "--x", "0.1", "--t", "5"})["results"]["k"], 5);
  EXPECT_EQ(call_json({"alloc", "--x", "5", "--t", "5"})["results"]["k"], 1);
  const auto via_rate = call_json({"alloc", "--rate", "0.6931", "--snr", "1", "--t", "5"});
  const auto via_x = call_json({"alloc", "--x", "1", "--t", "5"});
  EXPECT_EQ(via_rate["results"]["k"], via_x["results"]["k"]);
  EXPECT_EQ(via_x["results"]["q"]["length"], 5);
}

TEST(CliAlloc, ThresholdSpecErrors) {
  EXPECT_EQ(call({"alloc", "--t", "5"}).code, kUsage);
  EXPECT_EQ(call({"alloc", "--x", "1", "--rate", "1", "--snr", "1", "--t", "5"}).code,
            kUsage);
  EXPECT_EQ(call({"alloc", "--rate", "1", "--t", "5"}).code, kUsage);
  EXPECT_EQ(call({"alloc", "--rate", "1", "--snr", "0", "--t", "5"}).code, kUsage);
}

TEST(CliStepPlot, TwoAntennas) {
  const Result r = call({"figure1", "--t", "2"});
  ASSERT_EQ(r.code, 0);
  const auto rows = tab_rows(r.out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(std::stod(split(rows[0], ',')[2]), 0.715332, 1e-6);
  EXPECT_NE(r.out.find("\noutage,k_opt\n"), std::string::npos);
}

TEST(CliStepPlot, FortyAntennasAndTIndependence) {
  const Result big = call({"figure1", "--t", "40"});
  const auto rows = tab_rows(big.out);
  ASSERT_EQ(rows.size(), 39u);
  const double last = std::stod(split(rows.back(), ',')[2]);
  EXPECT_GT(last, 0.5);
  EXPECT_LT(last, 0.55);
  const auto small = tab_rows(call({"figure1", "--t", "3"}).out);
  ASSERT_EQ(small.size(), 2u);
  EXPECT_EQ(small[0], rows[0]);
  EXPECT_EQ(small[1], rows[1]);
}

TEST(CliStepPlot, BitStableAcrossThreadCounts) {
  EXPECT_EQ(call({"--threads", "1", "figure1", "--t", "25"}).out,
            call({"--threads", "5", "figure1", "--t", "25"}).out);
}

TEST(CliStepPlot, WritesFileAndReportsIoErrors) {
  const auto path = std::filesystem::temp_directory_path() / "outage_cli_fig1.csv";
  const Result r = call({"figure1", "--t", "4", "--csv", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path);
  const std::string body((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(body, call({"figure1", "--t", "4"}).out);
  std::filesystem::remove(path);
  EXPECT_EQ(call({"figure1", "--t", "4", "--csv", "/nonexistent-dir/x/y.csv"}).code,
            kIoError);
}

TEST(CliVerify, SuitesPass) {
  for (const char* suite : {"lemmas", "prooflab"}) {
    const Result r = call({"verify", suite});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  }
  const Result c = call({"verify", "conjecture", "--t", "2", "--grid", "2000"});
  EXPECT_EQ(c.code, 0) << c.out;
}

TEST(CliVerify, JsonRecord) {
  const auto j = call_json({"verify", "prooflab"});
  EXPECT_EQ(j["command"], "verify");
  EXPECT_TRUE(j["results"]["all_passed"].get<bool>());
  EXPECT_TRUE(j["results"]["prooflab.scan_extrema_count"]["passed"].get<bool>());
}

TEST(CliVerify, BadArguments) {
  EXPECT_EQ(call({"verify", "everything"}).code, kUsage);
  EXPECT_EQ(call({"verify", "conjecture", "--t", "5"}).code, kUsage);
}

TEST(Cli, HelpAndMissingSubcommand) {
  EXPECT_EQ(call({"--help"}).code, 0);
  EXPECT_EQ(call({}).code, kUsage);
  EXPECT_EQ(call({"nonsense"}).code, kUsage);
}

}  // namespace
}  // namespace outage::cli
