#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "twinaudit/bom/model.hpp"

namespace twinaudit::bom {

inline constexpr std::string_view kBomFormat = "CycloneDX";
inline constexpr std::string_view kSpecVersion = "1.6";
// Reserved metadata property carrying Bom::kind.
inline constexpr std::string_view kKindProperty = "twinaudit:bom-kind";

struct ParseOptions {
  // Strict parsing rejects fields outside the modeled subset. Lenient parsing
  // keeps unknown top-level and component-level fields in `extensions` and
  // ignores unknown fields elsewhere.
  bool strict = true;
  // Run ValidateBom after the structural parse.
  bool validate = true;
};

struct SerializeOptions {
  int indent = -1;  // -1 = compact
};

// Canonical JSON value; does not validate.
nlohmann::json ToJson(const Bom& bom);
nlohmann::json ToJson(const Component& component);
nlohmann::json ToJson(const VulnerabilityEntry& entry);
nlohmann::json ToJson(const Dependency& dependency);

// Validates first and throws ValidationError without emitting anything when
// the Bom is invalid. Output is byte-stable for equal inputs.
std::string SerializeBom(const Bom& bom, const SerializeOptions& options = {});

// Throws ParseError for malformed JSON and ValidationError for schema or
// invariant violations.
Bom ParseBom(std::string_view text, const ParseOptions& options = {});
Bom FromJson(const nlohmann::json& document, const ParseOptions& options = {});

Component ComponentFromJson(const nlohmann::json& value, const ParseOptions& options = {});
VulnerabilityEntry VulnerabilityFromJson(const nlohmann::json& value);
Dependency DependencyFromJson(const nlohmann::json& value);

}  // namespace twinaudit::bom
