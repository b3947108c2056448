#include <gtest/gtest.h>

#include <map>
#include <set>

#include "support.hpp"
#include "twinaudit/bom/codec.hpp"
#include "twinaudit/forge/forge.hpp"

namespace twinaudit {
namespace {

using harness::FixtureName;
using nlohmann::json;

struct Row {
  std::size_t algorithms = 0, vulnerabilities = 0, components = 0, certificates = 0;
  bool operator==(const Row&) const = default;
};

std::ostream& operator<<(std::ostream& o, const Row& r) {
  return o << "{alg=" << r.algorithms << " vuln=" << r.vulnerabilities
           << " comp=" << r.components << " cert=" << r.certificates << "}";
}

std::string Prop(const json& node, const std::string& name) {
  for (const auto& p : node.value("properties", json::array())) {
    if (p.value("name", "") == name) return p.value("value", "");
  }
  return "";
}

// Recount from serialized documents without going through CountArtifacts.
std::map<std::string, Row> OracleCounts(const std::vector<bom::Bom>& boms) {
  std::map<std::string, Row> out;
  for (const auto& b : boms) {
    const json doc = json::parse(bom::SerializeBom(b));
    const json& meta = doc.at("metadata");
    const std::string role = Prop(meta, "twinaudit:document-role");
    const std::string host = Prop(meta, "twinaudit:host");
    if (role == "sbom") {
      out[host].components += doc.value("components", json::array()).size();
      out[host].vulnerabilities += doc.value("vulnerabilities", json::array()).size();
    } else if (role == "cbom") {
      for (const auto& c : doc.value("components", json::array())) {
        if (c.value("type", "") != "cryptographic-asset") continue;
        const std::string asset = c.value("cryptoProperties", json::object()).value("assetType", "");
        if (asset == "certificate") ++out[host].certificates;
        if (asset == "algorithm" && Prop(c, "twinaudit:crypto-layer") == "2") {
          ++out[host].algorithms;
        }
      }
    }
  }
  return out;
}

class FixtureCountsTest : public ::testing::TestWithParam<FixtureName> {};

TEST_P(FixtureCountsTest, RunCountsMatchTargetsAndOracle) {
  auto rig = testing::AmsRig::Make(GetParam());
  const auto run = rig.ams->RunAudit(rig.layout.profile_id);
  ASSERT_EQ(run.state, ams::RunState::kSdtReady) << run.error_message;
  ASSERT_TRUE(run.host_errors.empty());
  const auto docs = rig.ams->RunDocuments(run.run_id);
  const auto oracle = OracleCounts(docs);
  const auto report = rig.ams->Counts(run.run_id);
  for (const auto& target : harness::FixtureSpec::For(GetParam()).targets) {
    Row expected{target.counts.algorithms, target.counts.vulnerabilities, target.counts.components,
                 target.counts.certificates};
    Row from_oracle, from_report;
    for (const auto& h : target.hosts) {
      auto it = oracle.find(h);
      ASSERT_NE(it, oracle.end()) << h;
      from_oracle.algorithms += it->second.algorithms;
      from_oracle.vulnerabilities += it->second.vulnerabilities;
      from_oracle.components += it->second.components;
      from_oracle.certificates += it->second.certificates;
      const auto& c = report.per_host.at(h);
      from_report.algorithms += c.algorithms;
      from_report.vulnerabilities += c.vulnerabilities;
      from_report.components += c.components;
      from_report.certificates += c.certificates;
    }
    EXPECT_EQ(from_oracle, expected) << target.group;
    EXPECT_EQ(from_report, from_oracle) << target.group;
  }
}

INSTANTIATE_TEST_SUITE_P(Fixtures, FixtureCountsTest,
                         ::testing::Values(FixtureName::kMinimal, FixtureName::kSmb),
                         [](const auto& info) { return std::string(harness::ToString(info.param)); });

// Row values of the SMB topology audit table.
TEST(SmbTable, TargetsMatchPublishedRows) {
  const std::map<std::string, Row> table = {
      {"Web Server", {8, 24, 29, 1}},       {"Microservices", {8, 12, 9, 0}},
      {"Management System", {10, 7, 6, 0}}, {"Mail Server", {9, 0, 4, 1}},
      {"Users", {23, 153, 75, 3}},
  };
  const auto spec = harness::FixtureSpec::Smb();
  ASSERT_EQ(spec.targets.size(), table.size());
  for (const auto& t : spec.targets) {
    Row r{t.counts.algorithms, t.counts.vulnerabilities, t.counts.components, t.counts.certificates};
    EXPECT_EQ(r, table.at(t.group)) << t.group;
  }
}

TEST(Fixture, RenderIsDeterministicPerSeed) {
  EXPECT_EQ(harness::RenderFixture(harness::FixtureSpec::Smb(3)),
            harness::RenderFixture(harness::FixtureSpec::Smb(3)));
  EXPECT_NE(harness::RenderFixture(harness::FixtureSpec::Smb(3)).at("feed.ndjson"),
            harness::RenderFixture(harness::FixtureSpec::Smb(4)).at("feed.ndjson"));
}

TEST(Fixture, CountsDoNotDependOnSeed) {
  for (std::uint64_t seed : {11u, 12u}) {
    auto rig = testing::AmsRig::Make(FixtureName::kSmb, seed);
    const auto run = rig.ams->RunAudit(rig.layout.profile_id);
    ASSERT_EQ(run.state, ams::RunState::kSdtReady);
    EXPECT_EQ(rig.ams->Counts(run.run_id).total, (forge::ArtifactCounts{58, 196, 123, 5}));
  }
}

}  // namespace
}  // namespace twinaudit
