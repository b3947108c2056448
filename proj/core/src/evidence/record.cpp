#include "twinaudit/evidence/record.hpp"

#include <tuple>

#include "twinaudit/errors.hpp"

namespace twinaudit::evidence {

using nlohmann::json;

std::string_view ToString(Category category) {
  switch (category) {
    case Category::kCryptoLibrary:
      return "CRYPTO_LIBRARY";
    case Category::kCertificate:
      return "CERTIFICATE";
    case Category::kAlgorithm:
      return "ALGORITHM";
    case Category::kOpensslConfig:
      return "OPENSSL_CONFIG";
    case Category::kKernelSetting:
      return "KERNEL_SETTING";
    case Category::kSystemLogEvent:
      return "SYSTEM_LOG_EVENT";
    case Category::kSoftwareComponent:
      return "SOFTWARE_COMPONENT";
  }
  return "SOFTWARE_COMPONENT";
}

std::optional<Category> ParseCategory(std::string_view text) {
  for (auto c : kAllCategories) {
    if (ToString(c) == text) return c;
  }
  return std::nullopt;
}

std::optional<std::string> EvidenceRecord::attribute(std::string_view key) const {
  auto it = attributes.find(std::string(key));
  if (it == attributes.end()) return std::nullopt;
  return it->second;
}

bool RecordLess(const EvidenceRecord& a, const EvidenceRecord& b) {
  return std::tie(a.category, a.source_path, a.name, a.version) <
         std::tie(b.category, b.source_path, b.name, b.version);
}

json ToJson(const EvidenceRecord& r) {
  json rels = json::array();
  for (const auto& rel : r.relationships) {
    json e = {{"kind", rel.kind}, {"target", rel.target_name}};
    if (rel.target_version) e["targetVersion"] = *rel.target_version;
    rels.push_back(std::move(e));
  }
  json out = {{"hostId", r.host_id},          {"category", ToString(r.category)},
              {"name", r.name},               {"attributes", r.attributes},
              {"sourcePath", r.source_path},  {"occurrences", r.occurrences},
              {"relationships", rels}};
  if (r.version) out["version"] = *r.version;
  return out;
}

EvidenceRecord RecordFromJson(const json& v) {
  try {
    EvidenceRecord r;
    r.host_id = v.at("hostId").get<std::string>();
    auto category = ParseCategory(v.at("category").get<std::string>());
    if (!category) throw InvalidArgumentError("unknown evidence category");
    r.category = *category;
    r.name = v.at("name").get<std::string>();
    if (v.contains("version")) r.version = v.at("version").get<std::string>();
    r.attributes = v.value("attributes", std::map<std::string, std::string>{});
    r.source_path = v.at("sourcePath").get<std::string>();
    r.occurrences = v.value("occurrences", std::vector<std::string>{});
    for (const auto& rel : v.value("relationships", json::array())) {
      Relationship x;
      x.kind = rel.at("kind").get<std::string>();
      x.target_name = rel.at("target").get<std::string>();
      if (rel.contains("targetVersion")) x.target_version = rel.at("targetVersion").get<std::string>();
      r.relationships.push_back(std::move(x));
    }
    return r;
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("malformed evidence record: ") + e.what());
  }
}

}  // namespace twinaudit::evidence
