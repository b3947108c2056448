#include "twinaudit/vuln/store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

namespace twinaudit::vuln {

using nlohmann::json;

namespace {

std::string RequireString(const json& v, const char* key) {
  if (!v.contains(key) || !v.at(key).is_string()) {
    throw InvalidArgumentError(std::string("missing string field '") + key + "'");
  }
  return v.at(key).get<std::string>();
}

std::optional<std::string> OptionalVersion(const json& v, const char* key) {
  if (!v.contains(key) || v.at(key).is_null()) return std::nullopt;
  if (!v.at(key).is_string()) {
    throw InvalidArgumentError(std::string("field '") + key + "' must be a string");
  }
  return v.at(key).get<std::string>();
}

bool PackageLess(const AffectedPackage& a, const AffectedPackage& b) {
  return std::make_tuple(a.name, a.range.ToString()) < std::make_tuple(b.name, b.range.ToString());
}

void SortAffected(std::vector<AffectedPackage>& v) {
  std::sort(v.begin(), v.end(), PackageLess);
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Both inputs share a CVE id. Scalar fields come from the larger record so
// that the winner does not depend on ingest order.
VulnerabilityRecord Merge(VulnerabilityRecord a, VulnerabilityRecord b) {
  auto rank = [](const VulnerabilityRecord& r) {
    return std::make_tuple(r.cvss_score, r.cvss_vector, r.summary);
  };
  VulnerabilityRecord& winner = rank(a) < rank(b) ? b : a;
  VulnerabilityRecord& other = rank(a) < rank(b) ? a : b;
  winner.affected.insert(winner.affected.end(), other.affected.begin(), other.affected.end());
  SortAffected(winner.affected);
  return std::move(winner);
}

}  // namespace

VulnerabilityRecord RecordFromJson(const json& v) {
  if (!v.is_object()) throw InvalidArgumentError("record is not a JSON object");
  VulnerabilityRecord r;
  r.cve_id = RequireString(v, "cve");
  if (!bom::IsCveId(r.cve_id)) throw InvalidArgumentError("malformed CVE id '" + r.cve_id + "'");
  r.summary = v.contains("summary") && v.at("summary").is_string()
                  ? v.at("summary").get<std::string>()
                  : "";
  if (!v.contains("cvss") || !v.at("cvss").is_object()) {
    throw InvalidArgumentError("missing cvss object");
  }
  const json& cvss = v.at("cvss");
  if (!cvss.contains("score") || !cvss.at("score").is_number()) {
    throw InvalidArgumentError("missing numeric cvss.score");
  }
  r.cvss_score = bom::CvssScore::FromDouble(cvss.at("score").get<double>());
  r.cvss_vector = cvss.contains("vector") && cvss.at("vector").is_string()
                      ? cvss.at("vector").get<std::string>()
                      : "";
  if (!v.contains("affects") || !v.at("affects").is_array() || v.at("affects").empty()) {
    throw InvalidArgumentError("affects must be a non-empty array");
  }
  for (const auto& a : v.at("affects")) {
    if (!a.is_object()) throw InvalidArgumentError("affects entry is not an object");
    AffectedPackage p;
    p.name = RequireString(a, "name");
    if (p.name.empty()) throw InvalidArgumentError("empty package name");
    if (auto intro = OptionalVersion(a, "introduced"); intro && *intro != "0") {
      p.range.lower = VersionBound{*intro, true};
    }
    auto fixed = OptionalVersion(a, "fixed");
    auto last = OptionalVersion(a, "lastAffected");
    if (fixed && last) throw InvalidArgumentError("both fixed and lastAffected given");
    if (fixed) p.range.upper = VersionBound{*fixed, false};
    if (last) p.range.upper = VersionBound{*last, true};
    if (!p.range.WellFormed()) {
      throw InvalidArgumentError("ill-formed version range " + p.range.ToString() + " for " +
                                 p.name);
    }
    r.affected.push_back(std::move(p));
  }
  SortAffected(r.affected);
  return r;
}

json ToJson(const VulnerabilityRecord& r) {
  json affects = json::array();
  for (const auto& a : r.affected) {
    json e = {{"name", a.name}};
    if (a.range.lower) e["introduced"] = a.range.lower->version;
    if (a.range.upper) e[a.range.upper->inclusive ? "lastAffected" : "fixed"] = a.range.upper->version;
    affects.push_back(std::move(e));
  }
  return {{"cve", r.cve_id},
          {"summary", r.summary},
          {"cvss", {{"score", r.cvss_score.value()}, {"vector", r.cvss_vector}}},
          {"affects", affects}};
}

bom::Severity ScoreToSeverity(double score) {
  if (!std::isfinite(score) || score < 0.0 || score > 10.0) {
    throw InvalidArgumentError("CVSS score out of range [0, 10]: " + std::to_string(score));
  }
  if (score == 0.0) return bom::Severity::kNone;
  if (score < 4.0) return bom::Severity::kLow;
  if (score < 7.0) return bom::Severity::kMedium;
  if (score < 9.0) return bom::Severity::kHigh;
  return bom::Severity::kCritical;
}

VulnStore VulnStore::FromFeedText(std::string_view text, IngestReport* report) {
  IngestReport local;
  std::map<std::string, VulnerabilityRecord> merged;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    try {
      auto record = RecordFromJson(json::parse(line));
      auto it = merged.find(record.cve_id);
      if (it == merged.end()) {
        merged.emplace(record.cve_id, std::move(record));
      } else {
        it->second = Merge(std::move(it->second), std::move(record));
      }
    } catch (const std::exception& e) {
      ++local.rejects;
      local.reject_reasons.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (end == text.size()) break;
  }

  VulnStore store;
  for (auto& [id, record] : merged) store.records_.push_back(std::move(record));
  for (std::size_t i = 0; i < store.records_.size(); ++i) {
    for (const auto& a : store.records_[i].affected) {
      auto& idx = store.by_name_[NormalizePackageName(a.name)];
      if (idx.empty() || idx.back() != i) idx.push_back(i);
    }
  }
  local.count = store.records_.size();
  if (report) *report = std::move(local);
  return store;
}

VulnStore VulnStore::FromFeedFile(const std::filesystem::path& path, IngestReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestFailed("cannot read vulnerability feed " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return FromFeedText(buf.str(), report);
}

std::vector<VulnerabilityRecord> VulnStore::Lookup(std::string_view name,
                                                   std::string_view version) const {
  std::vector<VulnerabilityRecord> out;
  if (version.empty()) return out;
  const std::string key = NormalizePackageName(name);
  auto it = by_name_.find(key);
  if (it == by_name_.end()) return out;
  for (std::size_t i : it->second) {
    const auto& r = records_[i];
    const bool hit = std::any_of(r.affected.begin(), r.affected.end(), [&](const AffectedPackage& a) {
      return NormalizePackageName(a.name) == key && a.range.Contains(version);
    });
    if (hit) out.push_back(r);
  }
  return out;
}

}  // namespace twinaudit::vuln
