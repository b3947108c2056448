#include <gtest/gtest.h>

#include <set>

#include "support.hpp"
#include "twinaudit/bom/codec.hpp"
#include "twinaudit/bom/link.hpp"
#include "twinaudit/bom/validate.hpp"
#include "twinaudit/evidence/tokens.hpp"
#include "twinaudit/forge/forge.hpp"
#include "twinaudit/forge/graph.hpp"

namespace twinaudit {
namespace {

using evidence::Category;
using evidence::EvidenceRecord;
using forge::CryptoHierarchyGraph;
using forge::EdgeKind;
using testing::Gen;

constexpr int kCases = 150;

EvidenceRecord AlgorithmRecord(Gen& g, const std::string& host,
                               const std::vector<evidence::AlgorithmToken>& table) {
  EvidenceRecord r;
  r.host_id = host;
  r.category = Category::kAlgorithm;
  if (g.Bool(0.1)) {
    r.name = "UNKNOWN-" + g.Ident(2, 3);
  } else {
    const auto& t = g.Pick(table);
    r.name = t.name;
    r.attributes["primitive"] = t.primitive;
    r.attributes["family"] = t.family;
    if (!t.parameter_set.empty()) r.attributes["parameter_set"] = t.parameter_set;
    if (!t.mode.empty()) r.attributes["mode"] = t.mode;
  }
  for (int k = g.Int(1, 3); k > 0; --k) r.occurrences.push_back("etc/" + g.Pick(std::vector<std::string>{"a.conf", "b.conf", "ssh/sshd_config"}));
  std::sort(r.occurrences.begin(), r.occurrences.end());
  r.occurrences.erase(std::unique(r.occurrences.begin(), r.occurrences.end()), r.occurrences.end());
  r.source_path = r.occurrences.front();
  return r;
}

std::vector<EvidenceRecord> RandomCryptoEvidence(Gen& g) {
  static const auto table = evidence::DefaultTokenTable();
  const std::vector<std::string> hosts = {"h1", "h2", "h3"};
  std::vector<EvidenceRecord> out;
  const int n = g.Int(1, 30);
  for (int i = 0; i < n; ++i) {
    const std::string host = g.Pick(hosts);
    const int kind = g.Int(0, 5);
    if (kind <= 1) {
      out.push_back(AlgorithmRecord(g, host, table));
    } else if (kind == 2) {
      EvidenceRecord r;
      r.host_id = host;
      r.category = Category::kCertificate;
      r.name = "cert-" + g.Ident(2, 3);
      r.source_path = "etc/ssl/certs/" + r.name + ".pem";
      r.occurrences = {r.source_path};
      if (g.Bool(0.1)) {
        r.attributes["parse_error"] = "bad";
      } else {
        if (g.Bool(0.9)) r.attributes["key_token"] = g.Pick(std::vector<std::string>{"RSA-2048", "ECC-P256", "Ed25519", "RSA-4096"});
        if (g.Bool(0.9)) r.attributes["signature_digest"] = g.Pick(std::vector<std::string>{"SHA-256", "SHA-384"});
      }
      out.push_back(r);
    } else if (kind == 3) {
      EvidenceRecord r;
      r.host_id = host;
      r.category = Category::kOpensslConfig;
      r.source_path = g.Pick(std::vector<std::string>{"etc/nginx/nginx.conf", "etc/ssl/openssl.cnf"});
      r.occurrences = {r.source_path};
      if (g.Bool()) {
        r.name = g.Pick(std::vector<std::string>{"TLSv1.2", "TLSv1.3", "SSLv3"});
        r.version = r.name == "SSLv3" ? "3" : r.name.substr(4);
        r.attributes["kind"] = "protocol";
        r.attributes["protocol"] = r.name[0] == 'S' ? "ssl" : "tls";
        if (g.Bool()) r.relationships.push_back({"USES", "AES-256-GCM", std::nullopt});
      } else {
        r.name = "ssl_ciphers";
        r.attributes["kind"] = "cipher_config";
        r.attributes["value"] = "HIGH";
        for (int k = g.Int(0, 3); k > 0; --k) {
          r.relationships.push_back({"USES", g.Pick(table).name, std::nullopt});
        }
      }
      out.push_back(r);
    } else if (kind == 4) {
      EvidenceRecord r;
      r.host_id = host;
      r.category = Category::kCryptoLibrary;
      r.name = g.Pick(std::vector<std::string>{"OpenSSL", "GnuTLS"});
      r.version = g.Pick(std::vector<std::string>{"3.0.2", "3.0.13", "1.1.1"});
      r.attributes["major_version"] = r.version->substr(0, r.version->find('.'));
      r.source_path = "usr/lib/lib" + g.Ident(2, 4) + ".so";
      r.occurrences = {r.source_path};
      out.push_back(r);
    } else {
      EvidenceRecord r;
      r.host_id = host;
      r.category = Category::kKernelSetting;
      r.name = "kernel.randomize_va_space";
      r.attributes["value"] = "2";
      r.source_path = "etc/sysctl.conf";
      out.push_back(r);
    }
  }
  return out;
}

CryptoHierarchyGraph Build(const std::vector<EvidenceRecord>& records) {
  CryptoHierarchyGraph graph;
  for (const auto& r : records) graph.Insert(r);
  return graph;
}

TEST(CryptoGraphProperty, InsertionOrderIndependent) {
  Gen g(31);
  for (int i = 0; i < kCases; ++i) {
    auto records = RandomCryptoEvidence(g);
    const auto reference = Build(records);
    for (int s = 0; s < 3; ++s) {
      g.Shuffle(records);
      EXPECT_TRUE(Build(records) == reference) << "case " << i << " shuffle " << s;
    }
  }
}

TEST(CryptoGraphProperty, DuplicateInsertionIsIdempotent) {
  Gen g(32);
  for (int i = 0; i < kCases; ++i) {
    const auto records = RandomCryptoEvidence(g);
    auto twice = records;
    twice.insert(twice.end(), records.begin(), records.end());
    EXPECT_TRUE(Build(twice) == Build(records)) << "case " << i;
  }
}

TEST(CryptoGraphProperty, AcyclicAndLayered) {
  Gen g(33);
  for (int i = 0; i < kCases; ++i) {
    const auto graph = Build(RandomCryptoEvidence(g));
    EXPECT_TRUE(graph.IsAcyclic()) << "case " << i;
    std::map<forge::NodeId, int> used_by_parents;
    for (const auto& e : graph.edges()) {
      ASSERT_NE(graph.Find(e.from), nullptr);
      ASSERT_NE(graph.Find(e.to), nullptr);
      switch (e.kind) {
        case EdgeKind::kRefines:
          EXPECT_EQ(e.from.layer, e.to.layer + 1);
          EXPECT_LE(e.from.layer, forge::kParameterLayer);
          break;
        case EdgeKind::kUsedBy:
          EXPECT_EQ(e.from.layer, forge::kParameterLayer);
          EXPECT_EQ(e.to.layer, forge::kOccurrenceLayer);
          ++used_by_parents[e.to];
          break;
        case EdgeKind::kDependsOn:
          EXPECT_EQ(e.from.layer, forge::kOccurrenceLayer);
          EXPECT_EQ(e.to.layer, forge::kOccurrenceLayer);
          break;
      }
    }
    for (const auto& occ : graph.Layer(forge::kOccurrenceLayer)) {
      EXPECT_EQ(used_by_parents[occ], 1) << occ.name;
    }
    for (int layer = forge::kFamilyLayer; layer <= forge::kOccurrenceLayer; ++layer) {
      for (const auto& id : graph.Layer(layer)) {
        const auto parent = graph.Parent(id);
        ASSERT_TRUE(parent) << id.name;
        EXPECT_EQ(parent->layer, layer - 1);
      }
    }
  }
}

TEST(CryptoGraphProperty, NonCryptoRecordsAreQuarantinedOnly) {
  Gen g(34);
  for (int i = 0; i < kCases; ++i) {
    const auto records = RandomCryptoEvidence(g);
    std::vector<EvidenceRecord> crypto_only;
    std::set<std::string> kernel_hosts;
    for (const auto& r : records) {
      if (r.category == Category::kKernelSetting) {
        kernel_hosts.insert(r.host_id);
      } else {
        crypto_only.push_back(r);
      }
    }
    const auto all = Build(records);
    const auto filtered = Build(crypto_only);
    EXPECT_EQ(all.nodes(), filtered.nodes());
    EXPECT_EQ(all.edges(), filtered.edges());
    EXPECT_EQ(all.quarantine().size() - filtered.quarantine().size(), kernel_hosts.size());
  }
}

TEST(CryptoGraph, AlgorithmChainShape) {
  CryptoHierarchyGraph graph;
  EvidenceRecord r;
  r.host_id = "h";
  r.category = Category::kAlgorithm;
  r.name = "AES-256-GCM";
  r.attributes = {{"primitive", "cipher"}, {"family", "AES"}, {"parameter_set", "256"}, {"mode", "GCM"}};
  r.occurrences = {"etc/a.conf", "etc/b.conf"};
  r.source_path = "etc/a.conf";
  graph.Insert(r);
  EXPECT_EQ(graph.Layer(forge::kPrimitiveLayer).size(), 1u);
  EXPECT_EQ(graph.Layer(forge::kFamilyLayer).size(), 1u);
  EXPECT_EQ(graph.Layer(forge::kParameterLayer).size(), 1u);
  EXPECT_EQ(graph.OccurrencesForHost("h").size(), 2u);
  EXPECT_EQ(graph.AncestorsForHost("h").size(), 3u);
  EXPECT_TRUE(graph.OccurrencesForHost("other").empty());
  EXPECT_TRUE(graph.quarantine().empty());
}

std::vector<EvidenceRecord> RandomComponents(Gen& g, const std::string& host) {
  std::vector<EvidenceRecord> out;
  std::vector<std::pair<std::string, std::string>> made;
  for (int i = g.Int(1, 15); i > 0; --i) {
    EvidenceRecord r;
    r.host_id = host;
    r.category = Category::kSoftwareComponent;
    r.name = g.Pick(std::vector<std::string>{"express", "lodash", "flask", "requests", "log4j-core", "monolog/monolog"});
    if (g.Bool(0.85)) r.version = g.Pick(std::vector<std::string>{"1.0.0", "2.3.1", "4.17.20", "2.14.1"});
    r.attributes["ecosystem"] = "npm";
    r.source_path = "srv/" + g.Ident(2, 3) + "/package.json";
    r.occurrences = {r.source_path};
    if (!made.empty() && g.Bool(0.4)) {
      const auto& t = g.Pick(made);
      r.relationships.push_back({"DEPENDS_ON", t.first, t.second.empty() ? std::nullopt : std::optional<std::string>(t.second)});
    }
    made.emplace_back(r.name, r.version.value_or(""));
    out.push_back(r);
  }
  return out;
}

std::string RandomFeedFor(Gen& g) {
  std::string feed;
  for (int i = 0; i < g.Int(1, 8); ++i) {
    nlohmann::json rec = {
        {"cve", "CVE-2023-" + std::to_string(20000 + i)},
        {"cvss", {{"score", g.Int(0, 100) / 10.0}, {"vector", "CVSS:3.1/AV:N"}}},
        {"affects",
         {{{"name", g.Pick(std::vector<std::string>{"express", "lodash", "flask", "log4j-core", "Flask"})},
           {"introduced", "0"},
           {"fixed", g.Pick(std::vector<std::string>{"2.0.0", "3.0.0", "5.0.0"})}}}}};
    feed += rec.dump() + "\n";
  }
  return feed;
}

TEST(EnrichmentProperty, Idempotent) {
  Gen g(35);
  for (int i = 0; i < kCases; ++i) {
    const auto store = vuln::VulnStore::FromFeedText(RandomFeedFor(g));
    const bom::Bom sbom = forge::BuildSbom("h", RandomComponents(g, "h"));
    const bom::Bom once = forge::EnrichWithVulnerabilities(sbom, store);
    const bom::Bom twice = forge::EnrichWithVulnerabilities(once, store);
    EXPECT_EQ(twice, once) << "case " << i;
    EXPECT_TRUE(bom::ValidateBom(once).empty()) << "case " << i;
    EXPECT_EQ(once.components, bom::Canonicalize(sbom).components);
  }
}

TEST(EnrichmentProperty, EntriesMatchStoreLookups) {
  Gen g(36);
  for (int i = 0; i < kCases; ++i) {
    const auto store = vuln::VulnStore::FromFeedText(RandomFeedFor(g));
    const bom::Bom b = forge::EnrichWithVulnerabilities(forge::BuildSbom("h", RandomComponents(g, "h")), store);
    std::map<std::string, std::set<std::string>> expected;  // cve -> refs
    for (const auto& c : b.components) {
      for (const auto& rec : store.Lookup(c.name, c.version)) expected[rec.cve_id].insert(c.bom_ref);
    }
    std::map<std::string, std::set<std::string>> got;
    for (const auto& v : b.vulnerabilities) {
      got[v.cve_id].insert(v.affects.begin(), v.affects.end());
      EXPECT_EQ(v.severity, bom::SeverityForScore(v.cvss_score));
    }
    EXPECT_EQ(got, expected) << "case " << i;
  }
}

TEST(BuildSbom, OneComponentPerDistinctNameVersion) {
  Gen g(37);
  for (int i = 0; i < kCases; ++i) {
    const auto records = RandomComponents(g, "h");
    std::set<std::pair<std::string, std::string>> distinct;
    for (const auto& r : records) distinct.emplace(r.name, r.version.value_or(""));
    const bom::Bom b = forge::BuildSbom("h", records);
    EXPECT_EQ(b.components.size(), distinct.size());
    EXPECT_EQ(forge::DocumentRole(b), "sbom");
    EXPECT_TRUE(bom::ValidateBom(b).empty());
  }
}

TEST(BuildSbom, RejectsForeignHost) {
  Gen g(38);
  auto records = RandomComponents(g, "h");
  records[0].host_id = "other";
  EXPECT_THROW(forge::BuildSbom("h", records), InvalidArgumentError);
}

TEST(Linking, ManifestLinksEveryDocument) {
  Gen g(39);
  std::vector<bom::Bom> boms = {forge::BuildSbom("h1", RandomComponents(g, "h1")),
                                forge::BuildSbom("h2", RandomComponents(g, "h2"))};
  const auto linked = forge::LinkToProfile(boms, "p1");
  EXPECT_EQ(forge::DocumentRole(linked.manifest), "manifest");
  ASSERT_EQ(linked.manifest.links.size(), 2u);
  for (const auto& b : linked.boms) {
    ASSERT_EQ(b.links.size(), 1u);
    EXPECT_EQ(b.links[0].target_serial, linked.manifest.serial_number);
  }
  bom::BomRegistry reg(linked.boms);
  for (const auto& l : linked.manifest.links) EXPECT_NO_THROW(bom::ResolveBomLink(l, reg));
  auto dup = boms;
  dup[1].serial_number = dup[0].serial_number;
  EXPECT_THROW(forge::LinkToProfile(dup, "p1"), InvalidArgumentError);
}

TEST(Counting, HighestVersionOnlyAndManifestSkipped) {
  Gen g(40);
  bom::Bom v1 = forge::BuildSbom("h1", RandomComponents(g, "h1"), {"", 1});
  bom::Bom v2 = v1;
  v2.version = 2;
  bom::Component extra;
  extra.bom_ref = "extra";
  extra.name = "extra";
  v2.components.push_back(extra);
  const auto linked = forge::LinkToProfile({v2}, "p");
  const auto report = forge::CountArtifacts({v1, v2, linked.manifest});
  EXPECT_EQ(report.per_host.at("h1").components, v2.components.size());
  EXPECT_EQ(report.total.components, v2.components.size());
  EXPECT_EQ(report.per_host.count("p"), 0u);
}

}  // namespace
}  // namespace twinaudit
