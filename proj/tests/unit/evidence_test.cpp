#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"
#include "twinaudit/errors.hpp"
#include "twinaudit/evidence/collector.hpp"
#include "twinaudit/evidence/snapshot.hpp"
#include "twinaudit/evidence/tokens.hpp"
#include "twinaudit/harness/fixture.hpp"

namespace twinaudit {
namespace {

using evidence::Category;
using evidence::CollectorConfig;
using evidence::EvidenceRecord;
using evidence::HostSnapshot;
using testing::Gen;
using testing::TempDir;

std::string FixturePem() {
  const auto files = harness::RenderFixture(harness::FixtureSpec::Minimal());
  return files.at("hosts/server/etc/ssl/certs/server.example.test.pem");
}

std::vector<const EvidenceRecord*> OfCategory(const std::vector<EvidenceRecord>& rs, Category c) {
  std::vector<const EvidenceRecord*> out;
  for (const auto& r : rs) {
    if (r.category == c) out.push_back(&r);
  }
  return out;
}

const EvidenceRecord* Named(const std::vector<EvidenceRecord>& rs, const std::string& name) {
  for (const auto& r : rs) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

TEST(Tokens, LongestAliasWinsAndConsumesSpan) {
  evidence::TokenMatcher m(evidence::DefaultTokenTable());
  EXPECT_EQ(m.Scan("mac HMAC-SHA512 and SHA512 alone"),
            (std::vector<std::string>{"HMAC-SHA512", "SHA-512"}));
  const auto suite = m.Scan("ECDHE-RSA-AES128-GCM-SHA256");
  EXPECT_NE(std::find(suite.begin(), suite.end(), "AES-128-GCM"), suite.end());
  EXPECT_NE(std::find(suite.begin(), suite.end(), "SHA-256"), suite.end());
  EXPECT_EQ(std::find(suite.begin(), suite.end(), "AES-128"), suite.end());
  const auto aes = m.Scan("cipher aes256-gcm enabled");
  ASSERT_EQ(aes.size(), 1u);
  EXPECT_EQ(aes[0], "AES-256-GCM");
  EXPECT_TRUE(m.Scan("MD5SUMMARY prose without tokens").empty());
}

TEST(Tokens, KeyAndDigestTokens) {
  EXPECT_EQ(evidence::KeyToken("RSA", 2048, ""), "RSA-2048");
  EXPECT_EQ(evidence::KeyToken("EC", 256, "prime256v1"), "ECC-P256");
  EXPECT_EQ(evidence::KeyToken("ED25519", 256, ""), "Ed25519");
  EXPECT_EQ(evidence::KeyToken("RSA", 1234, ""), "");
  EXPECT_EQ(evidence::DigestToken("SHA256"), "SHA-256");
  EXPECT_EQ(evidence::DigestToken("sha384"), "SHA-384");
  EXPECT_EQ(evidence::DigestToken("whirlpool"), "");
}

TEST(Tokens, EveryAliasResolvesToItsToken) {
  const auto table = evidence::DefaultTokenTable();
  evidence::TokenMatcher m(table);
  for (const auto& t : table) {
    ASSERT_NE(m.Find(t.name), nullptr);
    for (const auto& alias : t.aliases) {
      const auto hits = m.Scan(" " + alias + " ");
      ASSERT_FALSE(hits.empty()) << alias;
      EXPECT_EQ(hits[0], t.name) << alias;
    }
  }
}

TEST(Collector, ReadsCertificateFields) {
  auto snap = HostSnapshot::FromFiles("h1", {{"etc/ssl/certs/a.pem", FixturePem()}});
  std::vector<evidence::ScanWarning> warnings;
  const auto certs = evidence::ParseCertificates(snap, &warnings);
  ASSERT_EQ(certs.size(), 1u);
  const auto& c = certs[0];
  EXPECT_FALSE(c.is_warning());
  EXPECT_EQ(c.host_id, "h1");
  EXPECT_EQ(c.category, Category::kCertificate);
  EXPECT_EQ(c.source_path, "etc/ssl/certs/a.pem");
  EXPECT_TRUE(c.attribute("subject"));
  EXPECT_TRUE(c.attribute("issuer"));
  EXPECT_EQ(c.attribute("format"), "PEM");
  EXPECT_EQ(c.attribute("not_before")->size(), 20u);
  EXPECT_LE(*c.attribute("not_before"), *c.attribute("not_after"));
  EXPECT_TRUE(c.attribute(evidence::attr::kKeyToken));
  EXPECT_TRUE(warnings.empty());
}

TEST(Collector, CorruptCertificateBecomesWarningRecord) {
  std::string pem = FixturePem();
  const auto mid = pem.find('\n') + 10;
  pem.replace(mid, 20, std::string(20, '!'));
  auto snap = HostSnapshot::FromFiles(
      "h1", {{"etc/ssl/certs/bad.pem", pem}, {"etc/ssl/certs/blob.der", std::string("\x30\x82\x00\x01\x00", 5)}});
  const auto certs = evidence::ParseCertificates(snap);
  ASSERT_EQ(certs.size(), 2u);
  for (const auto& c : certs) EXPECT_TRUE(c.is_warning()) << c.source_path;
}

TEST(Collector, DetectsAlgorithmsInConfigButNotInComments) {
  const std::string conf =
      "# ssl_ciphers RC4;\n"
      "ssl_ciphers ECDHE-RSA-AES128-GCM-SHA256;\n"
      "ssl_protocols TLSv1.2 TLSv1.3;\n";
  auto snap = HostSnapshot::FromFiles(
      "h1", {{"etc/nginx/nginx.conf", conf}, {"srv/app/readme.txt", "uses RC4 and DES-56"}});
  const auto cfg = CollectorConfig::Default();
  const auto algs = evidence::DetectAlgorithms(snap, cfg, {});
  EXPECT_EQ(Named(algs, "RC4-128"), nullptr);
  EXPECT_EQ(Named(algs, "DES-56"), nullptr);
  const auto* gcm = Named(algs, "AES-128-GCM");
  ASSERT_NE(gcm, nullptr);
  EXPECT_EQ(gcm->attribute(evidence::attr::kFamily), "AES");
  EXPECT_EQ(gcm->attribute(evidence::attr::kParameterSet), "128");
  EXPECT_EQ(gcm->attribute(evidence::attr::kMode), "GCM");
  EXPECT_EQ(gcm->occurrences, std::vector<std::string>{"etc/nginx/nginx.conf"});
}

TEST(Collector, CertificateKeysFeedAlgorithmDetection) {
  auto snap = HostSnapshot::FromFiles("h1", {{"etc/ssl/certs/a.pem", FixturePem()}});
  const auto cfg = CollectorConfig::Default();
  const auto certs = evidence::ParseCertificates(snap);
  const auto algs = evidence::DetectAlgorithms(snap, cfg, certs);
  const auto key = certs.at(0).attribute(evidence::attr::kKeyToken);
  ASSERT_TRUE(key);
  const auto* k = Named(algs, *key);
  ASSERT_NE(k, nullptr);
  EXPECT_EQ(k->source_path, "etc/ssl/certs/a.pem");
}

TEST(Collector, TlsConfigProtocolsAndCiphers) {
  auto snap = HostSnapshot::FromFiles(
      "h1", {{"etc/nginx/nginx.conf",
              "ssl_protocols TLSv1.2 TLSv1.3;\nssl_ciphers HIGH:!aNULL;\n"}});
  const auto recs = evidence::ParseOpensslConfig(snap, CollectorConfig::Default());
  std::vector<std::string> protocols;
  std::vector<std::string> ciphers;
  for (const auto& r : recs) {
    if (r.attribute(evidence::attr::kKind) == "protocol") protocols.push_back(r.name);
    if (r.attribute(evidence::attr::kKind) == "cipher_config") {
      ciphers.push_back(*r.attribute(evidence::attr::kValue));
    }
  }
  std::sort(protocols.begin(), protocols.end());
  EXPECT_EQ(protocols, (std::vector<std::string>{"TLSv1.2", "TLSv1.3"}));
  EXPECT_EQ(ciphers, std::vector<std::string>{"HIGH:!aNULL"});
}

TEST(Collector, KernelSettingsLastAssignmentWins) {
  auto snap = HostSnapshot::FromFiles(
      "h1", {{"etc/sysctl.conf", "kernel.randomize_va_space = 1\nnet.ipv4.ip_forward = 1\n"},
             {"etc/sysctl.d/99-hardening.conf", "kernel/randomize_va_space=2\n"}});
  const auto recs = evidence::ParseKernelSettings(snap, CollectorConfig::Default());
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].name, "kernel.randomize_va_space");
  EXPECT_EQ(recs[0].attribute(evidence::attr::kValue), "2");
  EXPECT_EQ(recs[0].source_path, "etc/sysctl.d/99-hardening.conf");
}

TEST(Collector, LogEventsCountedPerClass) {
  auto snap = HostSnapshot::FromFiles(
      "h1", {{"var/log/auth.log",
              "sshd: Failed password for root\nsshd: Accepted publickey for a\n"
              "sshd: Failed password for b\nunrelated line\n"}});
  const auto recs = evidence::ScanLogs(snap, CollectorConfig::Default());
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(Named(recs, "auth_failure")->attribute(evidence::attr::kCount), "2");
  EXPECT_EQ(Named(recs, "auth_success")->attribute(evidence::attr::kCount), "1");
}

TEST(Collector, CryptoLibrariesFromSonames) {
  auto snap = HostSnapshot::FromFiles(
      "h1", {{"usr/lib/x86_64-linux-gnu/libssl.so.3", std::string("\x7f" "ELF", 4)},
             {"usr/lib/x86_64-linux-gnu/libcrypto.so.3", std::string("\x7f" "ELF", 4)},
             {"usr/lib/libgnutls.so.30", std::string("\x7f" "ELF", 4)}});
  const auto libs = evidence::DetectCryptoLibraries(snap, CollectorConfig::Default());
  ASSERT_NE(Named(libs, "OpenSSL"), nullptr);
  ASSERT_NE(Named(libs, "GnuTLS"), nullptr);
  EXPECT_EQ(OfCategory(libs, Category::kCryptoLibrary).size(), libs.size());
  EXPECT_EQ(std::count_if(libs.begin(), libs.end(), [](const auto& r) { return r.name == "OpenSSL"; }), 1);
}

TEST(Collector, ManifestsAcrossEcosystems) {
  auto snap = HostSnapshot::FromFiles(
      "h1",
      {{"srv/web/package.json",
        R"({"name":"web","version":"1.2.0","dependencies":{"express":"4.18.2","lodash":"^4.17.0"}})"},
       {"srv/py/requirements.txt", "flask==2.3.2\nrequests>=2.0\n# comment\n"},
       {"srv/php/composer.json", R"({"name":"acme/site","require":{"php":">=8.1","monolog/monolog":"3.4.0"}})"},
       {"srv/java/pom.xml",
        "<project><groupId>com.acme</groupId><artifactId>svc</artifactId><version>2.0.0</version>"
        "<properties><lib.version>1.5.0</lib.version></properties>"
        "<dependencies><dependency><groupId>org.x</groupId><artifactId>lib</artifactId>"
        "<version>${lib.version}</version></dependency></dependencies></project>"}});
  const auto recs = evidence::ParseProjectManifests(snap, CollectorConfig::Default());
  auto find = [&](const std::string& name) { return Named(recs, name); };
  ASSERT_NE(find("express"), nullptr);
  EXPECT_EQ(find("express")->version, "4.18.2");
  ASSERT_NE(find("lodash"), nullptr);
  EXPECT_FALSE(find("lodash")->version);
  EXPECT_EQ(find("lodash")->attribute(evidence::attr::kVersionRange), "^4.17.0");
  EXPECT_EQ(find("flask")->version, "2.3.2");
  EXPECT_FALSE(find("requests")->version);
  EXPECT_EQ(find("php"), nullptr);
  EXPECT_EQ(find("monolog/monolog")->version, "3.4.0");
  ASSERT_NE(find("lib"), nullptr);
  EXPECT_EQ(find("lib")->version, "1.5.0");
  EXPECT_EQ(find("web")->attribute(evidence::attr::kRole), "project");
  bool web_depends_on_express = false;
  for (const auto& rel : find("web")->relationships) {
    if (rel.kind == evidence::kDependsOn && rel.target_name == "express") web_depends_on_express = true;
  }
  EXPECT_TRUE(web_depends_on_express);
}

TEST(Collector, MalformedManifestIsWarningRecord) {
  auto snap = HostSnapshot::FromFiles("h1", {{"srv/web/package.json", "{not json"}});
  const auto recs = evidence::ParseProjectManifests(snap, CollectorConfig::Default());
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_TRUE(recs[0].is_warning());
}

TEST(Collector, ScanHostHonoursCategoriesAndOrder) {
  const auto files = harness::RenderFixture(harness::FixtureSpec::Minimal());
  std::map<std::string, std::string> host;
  const std::string prefix = "hosts/server/";
  for (const auto& [path, bytes] : files) {
    if (path.rfind(prefix, 0) == 0 && path != prefix + "facts.json") host[path.substr(prefix.size())] = bytes;
  }
  auto snap = HostSnapshot::FromFiles("server", host);
  const auto all = evidence::ScanHost(snap, CollectorConfig::Default());
  EXPECT_TRUE(std::is_sorted(all.records.begin(), all.records.end(), evidence::RecordLess));
  for (auto c : evidence::kAllCategories) {
    EXPECT_FALSE(OfCategory(all.records, c).empty()) << evidence::ToString(c);
  }
  const auto only = evidence::ScanHost(snap, CollectorConfig::ForCategories({Category::kCertificate}));
  EXPECT_EQ(OfCategory(only.records, Category::kCertificate).size(), only.records.size());
  EXPECT_FALSE(only.records.empty());
  for (const auto& r : only.records) {
    for (const auto& rel : r.relationships) {
      EXPECT_NE(Named(only.records, rel.target_name), nullptr);
    }
  }
}

TEST(Collector, ConfigValidation) {
  EXPECT_THROW(CollectorConfig::ForCategories({}).Validate(), InvalidArgumentError);
  auto c = CollectorConfig::Default();
  c.algorithm_token_table.clear();
  EXPECT_THROW(c.Validate(), InvalidArgumentError);
  c = CollectorConfig::Default();
  c.log_event_patterns.clear();
  EXPECT_THROW(c.Validate(), InvalidArgumentError);
  c = CollectorConfig::ForCategories({Category::kCertificate});
  c.log_event_patterns.clear();
  EXPECT_NO_THROW(c.Validate());
}

TEST(Collector, PathHelpers) {
  using namespace evidence::detail;
  EXPECT_TRUE(IsCertificatePath("etc/ssl/a.crt"));
  EXPECT_FALSE(IsConfigPath("etc/ssl/a.pem"));
  EXPECT_FALSE(IsConfigPath("etc/ssl/private/a.key"));
  EXPECT_TRUE(IsConfigPath("etc/ssh/sshd_config"));
  EXPECT_FALSE(IsConfigPath("srv/etc/x.conf"));
  EXPECT_EQ(StripComments("a # b\n# c\nd;e\n"), "a \n\nd;e\n");
  EXPECT_TRUE(GlobMatch("*/package.json", "srv/a/b/package.json"));
  EXPECT_FALSE(IsText(std::string("ab\0cd", 5)));
}

TEST(RecordProperty, JsonRoundTrip) {
  Gen g(21);
  for (int i = 0; i < 200; ++i) {
    EvidenceRecord r;
    r.host_id = g.Ident();
    r.category = g.Pick(std::vector<Category>(std::begin(evidence::kAllCategories),
                                              std::end(evidence::kAllCategories)));
    r.name = g.Ident();
    if (g.Bool()) r.version = g.VersionString();
    for (int k = g.Int(0, 4); k > 0; --k) r.attributes[g.Ident()] = g.Ident();
    r.source_path = "etc/" + g.Ident();
    r.occurrences = {r.source_path};
    for (int k = g.Int(0, 3); k > 0; --k) {
      r.relationships.push_back({std::string(evidence::kDependsOn), g.Ident(),
                                 g.Bool() ? std::optional<std::string>(g.VersionString()) : std::nullopt});
    }
    EXPECT_EQ(evidence::RecordFromJson(evidence::ToJson(r)), r);
  }
}

TEST(Snapshot, DirectoryAndTarGiveSameScan) {
  TempDir dir("snap");
  const auto files = harness::RenderFixture(harness::FixtureSpec::Minimal());
  std::map<std::string, std::string> host;
  const std::string prefix = "hosts/server/";
  for (const auto& [path, bytes] : files) {
    if (path.rfind(prefix, 0) == 0) {
      host[path.substr(prefix.size())] = bytes;
      testing::WriteFile(dir / ("tree/" + path.substr(prefix.size())), bytes);
    }
  }
  testing::WriteFile(dir / "server.tar", evidence::WriteTarArchive(host));
  const auto from_dir = HostSnapshot::Open(dir / "tree");
  const auto from_tar = HostSnapshot::Open(dir / "server.tar");
  EXPECT_EQ(from_dir.host_id(), "server");
  EXPECT_EQ(from_tar.host_id(), "server");
  EXPECT_EQ(from_dir.files(), from_tar.files());
  EXPECT_EQ(std::count(from_dir.files().begin(), from_dir.files().end(), "facts.json"), 0);
  const auto cfg = CollectorConfig::Default();
  EXPECT_EQ(evidence::ScanHost(from_dir, cfg).records, evidence::ScanHost(from_tar, cfg).records);
  EXPECT_EQ(HostSnapshot::Open(dir / "tree", "override").host_id(), "override");
}

TEST(Snapshot, TarRoundTripWithLongNames) {
  Gen g(22);
  for (int i = 0; i < 100; ++i) {
    std::map<std::string, std::string> files;
    for (int k = g.Int(1, 6); k > 0; --k) {
      std::string path;
      for (int d = g.Int(1, 20); d > 0; --d) path += g.Ident(3, 12) + "/";
      path += g.Ident() + ".txt";
      std::string body;
      for (int b = g.Int(0, 2000); b > 0; --b) body.push_back(static_cast<char>(g.Int(0, 255)));
      files[path] = body;
    }
    EXPECT_EQ(evidence::ReadTarArchive(evidence::WriteTarArchive(files)), files);
  }
}

TEST(Snapshot, CorruptOrMissingInputFails) {
  const std::string tar = evidence::WriteTarArchive({{"a.txt", std::string(3000, 'x')}});
  EXPECT_THROW(evidence::ReadTarArchive(tar.substr(0, 700)), evidence::ScanFailed);
  EXPECT_THROW(HostSnapshot::Open("/nonexistent/snapshot"), evidence::ScanFailed);
}

TEST(Snapshot, ScanDoesNotModifyTree) {
  TempDir dir("ro");
  testing::WriteFile(dir / "etc/sysctl.conf", "kernel.randomize_va_space = 2\n");
  testing::WriteFile(dir / "etc/ssl/certs/a.pem", FixturePem());
  const auto before = std::filesystem::last_write_time(dir / "etc/sysctl.conf");
  const auto snap = HostSnapshot::Open(dir.path(), "h");
  evidence::ScanHost(snap, CollectorConfig::Default());
  std::size_t count = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir.path())) {
    if (e.is_regular_file()) ++count;
  }
  EXPECT_EQ(count, 2u);
  EXPECT_EQ(std::filesystem::last_write_time(dir / "etc/sysctl.conf"), before);
}

}  // namespace
}  // namespace twinaudit
