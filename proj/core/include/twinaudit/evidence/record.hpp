#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace twinaudit::evidence {

enum class Category {
  kCryptoLibrary,
  kCertificate,
  kAlgorithm,
  kOpensslConfig,
  kKernelSetting,
  kSystemLogEvent,
  kSoftwareComponent,
};

inline constexpr Category kAllCategories[] = {
    Category::kCryptoLibrary,  Category::kCertificate,    Category::kAlgorithm,
    Category::kOpensslConfig,  Category::kKernelSetting,  Category::kSystemLogEvent,
    Category::kSoftwareComponent,
};

std::string_view ToString(Category category);
std::optional<Category> ParseCategory(std::string_view text);

// Relationship kinds used by the collectors.
inline constexpr std::string_view kDependsOn = "DEPENDS_ON";
inline constexpr std::string_view kUses = "USES";

struct Relationship {
  std::string kind;
  std::string target_name;
  std::optional<std::string> target_version;

  friend auto operator<=>(const Relationship&, const Relationship&) = default;
};

// Attribute keys shared between collectors and the BOM creator.
namespace attr {
inline constexpr std::string_view kParseError = "parse_error";
inline constexpr std::string_view kKind = "kind";  // protocol | cipher_config on OPENSSL_CONFIG
inline constexpr std::string_view kValue = "value";
inline constexpr std::string_view kCount = "count";
inline constexpr std::string_view kPrimitive = "primitive";
inline constexpr std::string_view kFamily = "family";
inline constexpr std::string_view kParameterSet = "parameter_set";
inline constexpr std::string_view kMode = "mode";
inline constexpr std::string_view kEcosystem = "ecosystem";
inline constexpr std::string_view kPurl = "purl";
inline constexpr std::string_view kRole = "role";  // project | dependency
inline constexpr std::string_view kVersionRange = "version_range";
inline constexpr std::string_view kKeyToken = "key_token";
inline constexpr std::string_view kSignatureDigest = "signature_digest";
}  // namespace attr

struct EvidenceRecord {
  std::string host_id;
  Category category = Category::kSoftwareComponent;
  std::string name;
  std::optional<std::string> version;
  std::map<std::string, std::string> attributes;
  std::string source_path;  // relative to the snapshot root, '/'-separated
  // Every path the artifact was seen at, sorted; source_path is the first.
  std::vector<std::string> occurrences;
  std::vector<Relationship> relationships;

  std::optional<std::string> attribute(std::string_view key) const;
  bool is_warning() const { return attributes.count(std::string(attr::kParseError)) > 0; }

  friend bool operator==(const EvidenceRecord&, const EvidenceRecord&) = default;
};

// Category, then source_path, then name, then version.
bool RecordLess(const EvidenceRecord& a, const EvidenceRecord& b);

nlohmann::json ToJson(const EvidenceRecord& record);
EvidenceRecord RecordFromJson(const nlohmann::json& value);

}  // namespace twinaudit::evidence
