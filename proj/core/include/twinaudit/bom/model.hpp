#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace twinaudit::bom {

enum class BomKind { kSbom, kCbom, kVex, kMixed };
enum class ComponentType {
  kLibrary,
  kApplication,
  kCryptoAsset,
  kCertificate,
  kFile,
  kOperatingSystemSetting,
};
enum class CryptoAssetKind { kAlgorithm, kCertificate, kProtocol, kKeyMaterial };
enum class Severity { kNone, kLow, kMedium, kHigh, kCritical };
enum class AnalysisState { kInTriage, kExploitable, kNotAffected, kResolved };

std::string_view ToString(BomKind kind);
std::string_view ToString(ComponentType type);
std::string_view ToString(CryptoAssetKind kind);
std::string_view ToString(Severity severity);
std::string_view ToString(AnalysisState state);

std::optional<BomKind> ParseBomKind(std::string_view text);
std::optional<Severity> ParseSeverity(std::string_view text);

// A CVSS base score held as an exact count of tenths, so that 6.9 stays 6.9
// through any number of serialize/parse cycles.
class CvssScore {
 public:
  constexpr CvssScore() = default;

  // Rounds to the nearest tenth. Throws InvalidArgumentError outside [0, 10].
  static CvssScore FromDouble(double value);
  static CvssScore FromTenths(int tenths);

  constexpr int tenths() const noexcept { return tenths_; }
  double value() const noexcept { return tenths_ / 10.0; }
  std::string ToString() const;

  friend constexpr auto operator<=>(CvssScore, CvssScore) = default;

 private:
  constexpr explicit CvssScore(int tenths) : tenths_(tenths) {}
  int tenths_ = 0;
};

struct Property {
  std::string name;
  std::string value;

  friend auto operator<=>(const Property&, const Property&) = default;
};

struct CertificateFields {
  std::string subject;
  std::string issuer;
  std::string not_before;  // ISO-8601 UTC, second precision: 2025-01-01T00:00:00Z
  std::string not_after;
  std::string signature_algorithm_ref;

  friend bool operator==(const CertificateFields&, const CertificateFields&) = default;
};

struct ProtocolFields {
  std::string type = "tls";
  std::string version;  // empty for unversioned protocol classes
  std::vector<std::string> cipher_suite_refs;

  friend bool operator==(const ProtocolFields&, const ProtocolFields&) = default;
};

struct CryptoProperties {
  CryptoAssetKind asset_kind = CryptoAssetKind::kAlgorithm;
  std::optional<std::string> primitive;
  std::optional<std::string> algorithm_family;
  std::optional<std::string> parameter_set;
  std::optional<std::string> mode;
  std::optional<CertificateFields> certificate;  // iff asset_kind == kCertificate
  std::optional<ProtocolFields> protocol;        // iff asset_kind == kProtocol

  friend bool operator==(const CryptoProperties&, const CryptoProperties&) = default;
};

struct Component {
  std::string bom_ref;
  std::string name;
  std::string version;
  ComponentType type = ComponentType::kLibrary;
  std::optional<std::string> package_url;
  std::optional<CryptoProperties> crypto;
  std::vector<Property> properties;
  // Unknown fields kept by lenient parsing; always an object (possibly empty).
  nlohmann::json extensions = nlohmann::json::object();

  // First property value with this name, if any.
  std::optional<std::string> property(std::string_view name) const;

  friend bool operator==(const Component&, const Component&) = default;
};

struct Dependency {
  std::string ref;
  std::vector<std::string> depends_on;

  friend bool operator==(const Dependency&, const Dependency&) = default;
};

// urn:cdx:<uuid>/<version>[#<bom-ref>]
struct BomLink {
  std::string target_serial;  // urn:uuid:...
  std::uint64_t target_version = 1;
  std::optional<std::string> target_bom_ref;

  std::string Render() const;
  static std::optional<BomLink> Parse(std::string_view text);

  friend bool operator==(const BomLink&, const BomLink&) = default;
};

struct VulnerabilityEntry {
  std::string cve_id;
  CvssScore cvss_score;
  std::string cvss_vector;
  Severity severity = Severity::kNone;
  // Each entry is a local bom-ref or a rendered BomLink.
  std::vector<std::string> affects;
  AnalysisState analysis_state = AnalysisState::kInTriage;
  std::string description;

  friend bool operator==(const VulnerabilityEntry&, const VulnerabilityEntry&) = default;
};

struct BomMetadata {
  std::optional<std::string> timestamp;
  std::string subject;  // host id, or profile id for manifests
  std::string subject_type = "device";
  std::vector<Property> properties;

  std::optional<std::string> property(std::string_view name) const;

  friend bool operator==(const BomMetadata&, const BomMetadata&) = default;
};

struct Bom {
  std::string serial_number;
  std::uint64_t version = 1;
  BomKind kind = BomKind::kSbom;
  BomMetadata metadata;
  std::vector<Component> components;
  std::vector<Dependency> dependencies;
  std::vector<VulnerabilityEntry> vulnerabilities;
  std::vector<BomLink> links;
  nlohmann::json extensions = nlohmann::json::object();

  const Component* FindComponent(std::string_view bom_ref) const;

  friend bool operator==(const Bom&, const Bom&) = default;
};

// Sorted components/dependencies/vulnerabilities/links/properties. Serialization
// always emits this form, so parse(serialize(b)) == Canonicalize(b).
Bom Canonicalize(Bom bom);

bool IsCveId(std::string_view text);

// CVSS v3.1 qualitative bands: 0.0 none, 0.1-3.9 low, 4.0-6.9 medium,
// 7.0-8.9 high, 9.0-10.0 critical.
Severity SeverityForScore(CvssScore score);

// YYYY-MM-DDTHH:MM:SSZ
bool IsIsoTimestamp(std::string_view text);

}  // namespace twinaudit::bom
