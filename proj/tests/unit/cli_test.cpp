#include <gtest/gtest.h>

#include <map>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "support.hpp"
#include "twinaudit/harness/fixture.hpp"

namespace twinaudit {
namespace {

using nlohmann::json;

struct Out {
  int code = 0;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Start("127.0.0.1", 0);
    json config = {{"store", (dir_ / "store").string()},
                   {"feed", (dir_ / "fx" / "feed.ndjson").string()},
                   {"manager_url", server_.base_url()}};
    testing::WriteFile(dir_ / "config.json", config.dump());
  }

  Out Cli(std::vector<std::string> args) {
    args.insert(args.begin(), {"--config", (dir_ / "config.json").string()});
    std::ostringstream out, err;
    Out r;
    r.code = cli::Run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
  }

  static std::string Field(const std::string& text, const std::string& key) {
    const std::regex re("(^|\\n)" + key + ": ([^\\n]*)");
    std::smatch m;
    return std::regex_search(text, m, re) ? m[2].str() : "";
  }

  std::string Prepare(const std::string& spec) {
    EXPECT_EQ(Cli({"fixture", "generate", "--spec", spec, "--out", (dir_ / "fx").string()}).code, 0);
    EXPECT_EQ(Cli({"inventory", "ingest", (dir_ / "fx" / "inventory.yaml").string()}).code, 0);
    const auto p = Cli({"profile", "create", "-f", (dir_ / "fx" / "profile.yaml").string()});
    EXPECT_EQ(p.code, 0) << p.err;
    return Field(p.out, "profile_id");
  }

  testing::TempDir dir_{"cli"};
  sdt::SdtManager manager_;
  sdt::SdtManagerServer server_{manager_};
};

TEST_F(CliTest, SmbReportReproducesTheHostGroupTable) {
  const std::string profile = Prepare("smb");
  ASSERT_EQ(profile, "smb-audit");
  const auto run = Cli({"audit", "run", profile});
  ASSERT_EQ(run.code, 0) << run.err;
  EXPECT_EQ(Field(run.out, "state"), "SDT_READY");
  EXPECT_NE(run.err.find("1 malformed line(s) skipped"), std::string::npos);
  const std::string run_id = Field(run.out, "run_id");

  const auto report = Cli({"audit", "report", run_id, "--json"});
  ASSERT_EQ(report.code, 0) << report.err;
  std::map<std::string, std::array<int, 4>> got;
  const json doc = json::parse(report.out);
  for (const auto& g : doc.at("groups")) {
    got[g.at("group")] = {g.at("algorithms"), g.at("vulnerabilities"), g.at("components"),
                          g.at("certificates")};
  }
  const std::map<std::string, std::array<int, 4>> table = {
      {"Web Server", {8, 24, 29, 1}},      {"Microservices", {8, 12, 9, 0}},
      {"Management System", {10, 7, 6, 0}}, {"Mail Server", {9, 0, 4, 1}},
      {"Users", {23, 153, 75, 3}}};
  EXPECT_EQ(got, table);

  const auto md = Cli({"audit", "report", run_id});
  EXPECT_NE(md.out.find("| Web Server | web-server | 8 | 24 | 29 | 1 |"), std::string::npos) << md.out;
  EXPECT_NE(md.out.find("| Users | ws-alice, ws-bob, ws-carol | 23 | 153 | 75 | 3 |"), std::string::npos);
}

TEST_F(CliTest, UpdateStatusFootprintAndDestroy) {
  const std::string profile = Prepare("minimal");
  const auto run = Cli({"audit", "run", profile});
  ASSERT_EQ(run.code, 0) << run.err;
  const std::string run_id = Field(run.out, "run_id");
  const std::string sdt_id = Field(run.out, "sdt_id");
  ASSERT_FALSE(sdt_id.empty());

  const auto foot = Cli({"sdt", "footprint", sdt_id});
  ASSERT_EQ(foot.code, 0) << foot.err;
  EXPECT_GT(std::stoul(Field(foot.out, "footprint_bytes")), 0u);
  EXPECT_EQ(Field(foot.out, "representation_version"), "1");

  const auto upd = Cli({"audit", "update", run_id, "--hosts", "server"});
  ASSERT_EQ(upd.code, 0) << upd.err;
  EXPECT_EQ(Field(upd.out, "sdt_version"), "2");

  const auto status = Cli({"audit", "status", run_id});
  EXPECT_EQ(status.code, 0);
  EXPECT_NE(status.out.find("transition: UPDATING"), std::string::npos);
  EXPECT_NE(Cli({"audit", "list"}).out.find(run_id), std::string::npos);
  EXPECT_NE(Cli({"sdt", "list"}).out.find(sdt_id), std::string::npos);
  EXPECT_NE(Cli({"profile", "list"}).out.find(profile), std::string::npos);

  EXPECT_EQ(Cli({"sdt", "destroy", sdt_id}).code, 0);
  EXPECT_EQ(json::parse(Cli({"sdt", "get", sdt_id}).out).at("state"), "DESTROYED");
  const auto gone = Cli({"sdt", "get", "no-such-sdt"});
  EXPECT_EQ(gone.code, 1);
  EXPECT_NE(gone.err.find("error: "), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Cli({}).code, 2);
  EXPECT_EQ(Cli({"audit"}).code, 2);
  EXPECT_EQ(Cli({"fixture", "generate"}).code, 2);
  EXPECT_EQ(Cli({"bench", "deploy", "--iterations", "x", "--out", "o.csv"}).code, 2);
  EXPECT_EQ(Cli({"--help"}).code, 0);
  const auto bad = Cli({"fixture", "generate", "--spec", "huge", "--out", (dir_ / "x").string()});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("unknown fixture spec"), std::string::npos);
  EXPECT_EQ(Cli({"audit", "run", "nope"}).code, 1);
}

TEST_F(CliTest, BenchDeployWritesConsistentOutputs) {
  const auto out = dir_ / "bench.csv";
  const auto r = Cli({"bench", "deploy", "--fixture", "minimal", "--iterations", "5", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Field(r.out, "iterations"), "5");
  EXPECT_EQ(Field(r.out, "failed"), "0");
  EXPECT_TRUE(std::filesystem::exists(dir_ / "bench.cdf.csv"));
  const json summary = json::parse(testing::ReadFile(dir_ / "bench.summary.json"));
  EXPECT_EQ(summary.at("iterations"), 5);
  EXPECT_FALSE(manager_.Descriptors().empty());
  for (const auto& d : manager_.Descriptors()) EXPECT_EQ(d.state, sdt::SdtState::kDestroyed);
  EXPECT_EQ(manager_.runtimes().front()->LiveCount(), 0u);
}

}  // namespace
}  // namespace twinaudit
