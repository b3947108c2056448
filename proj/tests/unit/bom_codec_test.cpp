#include <gtest/gtest.h>

#include "bom_gen.hpp"
#include "twinaudit/bom/codec.hpp"
#include "twinaudit/bom/link.hpp"
#include "twinaudit/bom/validate.hpp"
#include "twinaudit/errors.hpp"

namespace twinaudit {
namespace {

using bom::Bom;
using nlohmann::json;
using testing::Gen;
using testing::RandomBom;

constexpr int kCases = 200;

TEST(BomCodecProperty, RoundTripIsCanonicalIdentity) {
  Gen g(101);
  for (int i = 0; i < kCases; ++i) {
    const Bom b = RandomBom(g);
    ASSERT_TRUE(bom::ValidateBom(b).empty()) << "case " << i;
    const std::string text = bom::SerializeBom(b);
    const Bom back = bom::ParseBom(text);
    EXPECT_EQ(back, bom::Canonicalize(b)) << "case " << i;
    EXPECT_EQ(bom::SerializeBom(back), text) << "case " << i;
  }
}

TEST(BomCodecProperty, SerializationIgnoresInputOrder) {
  Gen g(202);
  for (int i = 0; i < kCases; ++i) {
    Bom b = RandomBom(g);
    Bom shuffled = b;
    g.Shuffle(shuffled.components);
    g.Shuffle(shuffled.dependencies);
    g.Shuffle(shuffled.vulnerabilities);
    g.Shuffle(shuffled.links);
    g.Shuffle(shuffled.metadata.properties);
    EXPECT_EQ(bom::SerializeBom(b), bom::SerializeBom(shuffled)) << "case " << i;
  }
}

TEST(BomCodecProperty, LenientParseKeepsUnknownFields) {
  Gen g(303);
  for (int i = 0; i < kCases; ++i) {
    const Bom b = RandomBom(g);
    json doc = bom::ToJson(b);
    doc["x-top"] = {{"n", i}};
    if (!doc["components"].empty()) doc["components"][0]["x-comp"] = "v" + std::to_string(i);
    bom::ParseOptions lenient{.strict = false};
    const Bom back = bom::FromJson(doc, lenient);
    EXPECT_EQ(back.extensions.at("x-top").at("n"), i);
    if (!back.components.empty()) {
      const std::string first = doc["components"][0]["bom-ref"];
      EXPECT_EQ(back.FindComponent(first)->extensions.at("x-comp"), "v" + std::to_string(i));
    }
    EXPECT_EQ(bom::ToJson(back), doc) << "case " << i;
    EXPECT_THROW(bom::FromJson(doc), ValidationError);
  }
}

Bom SmallBom() {
  Bom b;
  b.serial_number = "urn:uuid:3e671687-395b-41f5-a30f-a58921a69b79";
  b.version = 3;
  b.metadata.subject = "web-server";
  bom::Component lib;
  lib.bom_ref = "pkg-a";
  lib.name = "a";
  lib.version = "1.0.0";
  b.components.push_back(lib);
  bom::Component alg;
  alg.bom_ref = "alg-aes";
  alg.name = "AES-256-GCM";
  alg.type = bom::ComponentType::kCryptoAsset;
  alg.crypto = bom::CryptoProperties{};
  b.components.push_back(alg);
  return b;
}

TEST(BomCodec, EmitsCycloneDxShape) {
  Bom b = SmallBom();
  b.kind = bom::BomKind::kCbom;
  const json doc = json::parse(bom::SerializeBom(b));
  EXPECT_EQ(doc.at("bomFormat"), "CycloneDX");
  EXPECT_EQ(doc.at("specVersion"), "1.6");
  EXPECT_EQ(doc.at("serialNumber"), b.serial_number);
  EXPECT_EQ(doc.at("version"), 3);
  EXPECT_EQ(doc.at("metadata").at("component").at("name"), "web-server");
  EXPECT_EQ(doc.at("components").at(0).at("bom-ref"), "alg-aes");
  EXPECT_EQ(doc.at("components").at(0).at("type"), "cryptographic-asset");
  EXPECT_EQ(doc.at("components").at(0).at("cryptoProperties").at("assetType"), "algorithm");
  bool kind_found = false;
  for (const auto& p : doc.at("metadata").at("properties")) {
    if (p.at("name") == "twinaudit:bom-kind") kind_found = p.at("value") == "CBOM";
  }
  EXPECT_TRUE(kind_found);
}

TEST(BomCodec, ScoreSurvivesAsTenths) {
  Bom b = SmallBom();
  bom::VulnerabilityEntry v;
  v.cve_id = "CVE-2021-44228";
  v.cvss_score = bom::CvssScore::FromDouble(6.9);
  v.severity = bom::Severity::kMedium;
  v.affects = {"pkg-a"};
  b.vulnerabilities.push_back(v);
  Bom x = b;
  for (int i = 0; i < 20; ++i) x = bom::ParseBom(bom::SerializeBom(x));
  EXPECT_EQ(x.vulnerabilities.at(0).cvss_score.tenths(), 69);
}

TEST(BomCodec, MalformedJsonIsParseError) {
  EXPECT_THROW(bom::ParseBom("{\"bomFormat\": "), ParseError);
  EXPECT_THROW(bom::ParseBom("[1,2"), ParseError);
}

TEST(BomCodec, StrictRejectsUnknownFieldReportingAllViolations) {
  json doc = bom::ToJson(SmallBom());
  doc["surprise"] = 1;
  doc["components"][0]["other"] = true;
  try {
    bom::FromJson(doc);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.violations().size(), 2u);
  }
}

TEST(BomCodec, RejectsBadVersionAndFormat) {
  json doc = bom::ToJson(SmallBom());
  doc["version"] = 0;
  EXPECT_THROW(bom::FromJson(doc), ValidationError);
  doc["version"] = -2;
  EXPECT_THROW(bom::FromJson(doc), ValidationError);
  doc["version"] = "3";
  EXPECT_THROW(bom::FromJson(doc), ValidationError);
  doc = bom::ToJson(SmallBom());
  doc["bomFormat"] = "SPDX";
  EXPECT_THROW(bom::FromJson(doc), ValidationError);
}

TEST(BomCodec, SerializeRefusesInvalidBom) {
  Bom b = SmallBom();
  b.serial_number = "not-a-urn";
  EXPECT_THROW(bom::SerializeBom(b), ValidationError);
}

bool HasViolation(const Bom& b, const std::string& needle) {
  for (const auto& v : bom::ValidateBom(b)) {
    if (v.ToString().find(needle) != std::string::npos) return true;
  }
  return false;
}

TEST(BomValidate, FlagsEachInvariant) {
  EXPECT_TRUE(bom::ValidateBom(SmallBom()).empty());

  Bom dup = SmallBom();
  dup.components[1].bom_ref = "pkg-a";
  EXPECT_TRUE(HasViolation(dup, "duplicate bom-ref"));

  Bom noname = SmallBom();
  noname.components[0].name.clear();
  EXPECT_TRUE(HasViolation(noname, "missing name"));

  Bom nocrypto = SmallBom();
  nocrypto.components[1].crypto.reset();
  EXPECT_TRUE(HasViolation(nocrypto, "cryptoProperties required"));

  Bom stray = SmallBom();
  stray.components[0].crypto = bom::CryptoProperties{};
  EXPECT_TRUE(HasViolation(stray, "only allowed"));

  Bom cert = SmallBom();
  cert.components[1].type = bom::ComponentType::kCertificate;
  cert.components[1].crypto->asset_kind = bom::CryptoAssetKind::kCertificate;
  EXPECT_TRUE(HasViolation(cert, "certificate fields required"));
  cert.components[1].crypto->certificate =
      bom::CertificateFields{"CN=a", "CN=b", "2026-01-01T00:00:00Z", "2025-01-01T00:00:00Z", ""};
  EXPECT_TRUE(HasViolation(cert, "notValidBefore is after notValidAfter"));
  cert.components[1].crypto->certificate->not_after = "2027-01-01";
  EXPECT_TRUE(HasViolation(cert, "not an ISO-8601"));

  Bom proto = SmallBom();
  proto.components[1].crypto->asset_kind = bom::CryptoAssetKind::kProtocol;
  EXPECT_TRUE(HasViolation(proto, "protocol fields required"));
  proto.components[1].crypto->protocol = bom::ProtocolFields{"tls", "1.3", {"missing"}};
  EXPECT_TRUE(HasViolation(proto, "unresolved reference 'missing'"));

  Bom deps = SmallBom();
  deps.dependencies = {{"pkg-a", {"pkg-a", "alg-aes", "alg-aes"}}, {"pkg-a", {}}};
  EXPECT_TRUE(HasViolation(deps, "self-dependency"));
  EXPECT_TRUE(HasViolation(deps, "duplicate edge"));
  EXPECT_TRUE(HasViolation(deps, "duplicate dependency entry"));

  Bom vul = SmallBom();
  bom::VulnerabilityEntry v;
  v.cve_id = "CVE-21-1";
  v.cvss_score = bom::CvssScore::FromDouble(9.8);
  v.severity = bom::Severity::kHigh;
  vul.vulnerabilities = {v, v};
  EXPECT_TRUE(HasViolation(vul, "not a CVE identifier"));
  EXPECT_TRUE(HasViolation(vul, "duplicate vulnerability"));
  EXPECT_TRUE(HasViolation(vul, "inconsistent with score"));
  EXPECT_TRUE(HasViolation(vul, "affects must not be empty"));
}

TEST(BomValidate, AcceptsBomLinkReferences) {
  Bom b = SmallBom();
  const std::string link = "urn:cdx:3e671687-395b-41f5-a30f-a58921a69b70/2#pkg-z";
  b.dependencies = {{"pkg-a", {link}}};
  EXPECT_TRUE(bom::ValidateBom(b).empty());
  b.dependencies = {{"pkg-a", {"urn:cdx:nope/2"}}};
  EXPECT_FALSE(bom::ValidateBom(b).empty());
}

TEST(BomModel, SeverityBands) {
  using bom::CvssScore;
  using bom::Severity;
  EXPECT_EQ(bom::SeverityForScore(CvssScore::FromTenths(0)), Severity::kNone);
  EXPECT_EQ(bom::SeverityForScore(CvssScore::FromTenths(1)), Severity::kLow);
  EXPECT_EQ(bom::SeverityForScore(CvssScore::FromTenths(39)), Severity::kLow);
  EXPECT_EQ(bom::SeverityForScore(CvssScore::FromTenths(40)), Severity::kMedium);
  EXPECT_EQ(bom::SeverityForScore(CvssScore::FromTenths(69)), Severity::kMedium);
  EXPECT_EQ(bom::SeverityForScore(CvssScore::FromTenths(70)), Severity::kHigh);
  EXPECT_EQ(bom::SeverityForScore(CvssScore::FromTenths(89)), Severity::kHigh);
  EXPECT_EQ(bom::SeverityForScore(CvssScore::FromTenths(90)), Severity::kCritical);
  EXPECT_EQ(bom::SeverityForScore(CvssScore::FromTenths(100)), Severity::kCritical);
  EXPECT_THROW(CvssScore::FromDouble(10.5), InvalidArgumentError);
  EXPECT_THROW(CvssScore::FromDouble(-0.1), InvalidArgumentError);
}

TEST(BomModel, CveIdsAndTimestamps) {
  EXPECT_TRUE(bom::IsCveId("CVE-2021-44228"));
  EXPECT_TRUE(bom::IsCveId("CVE-1999-0001"));
  EXPECT_FALSE(bom::IsCveId("CVE-2021-123"));
  EXPECT_FALSE(bom::IsCveId("cve-2021-44228"));
  EXPECT_TRUE(bom::IsIsoTimestamp("2025-01-31T23:59:59Z"));
  EXPECT_FALSE(bom::IsIsoTimestamp("2025-01-31 23:59:59"));
  EXPECT_FALSE(bom::IsIsoTimestamp("2025-13-01T00:00:00Z"));
}

TEST(BomLinkTest, RenderParseRoundTrip) {
  bom::BomLink l{"urn:uuid:3e671687-395b-41f5-a30f-a58921a69b79", 4, "comp-1"};
  EXPECT_EQ(l.Render(), "urn:cdx:3e671687-395b-41f5-a30f-a58921a69b79/4#comp-1");
  EXPECT_EQ(bom::BomLink::Parse(l.Render()), l);
  l.target_bom_ref.reset();
  EXPECT_EQ(bom::BomLink::Parse(l.Render()), l);
  EXPECT_FALSE(bom::BomLink::Parse("urn:cdx:3e671687-395b-41f5-a30f-a58921a69b79/0"));
  EXPECT_FALSE(bom::BomLink::Parse("urn:uuid:3e671687-395b-41f5-a30f-a58921a69b79"));
}

TEST(BomLinkTest, ResolvesAgainstRegistry) {
  Bom b = SmallBom();
  bom::BomRegistry reg({b});
  auto whole = bom::ResolveBomLink({b.serial_number, 3, std::nullopt}, reg);
  EXPECT_EQ(std::get<Bom>(whole).serial_number, b.serial_number);
  auto comp = bom::ResolveBomLink({b.serial_number, 3, "pkg-a"}, reg);
  EXPECT_EQ(std::get<bom::Component>(comp).name, "a");
  EXPECT_THROW(bom::ResolveBomLink({b.serial_number, 2, std::nullopt}, reg), NotFoundError);
  EXPECT_THROW(bom::ResolveBomLink({b.serial_number, 3, "zzz"}, reg), bom::DanglingRefError);
}

}  // namespace
}  // namespace twinaudit
