#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "twinaudit/bom/model.hpp"
#include "twinaudit/errors.hpp"
#include "twinaudit/vuln/version.hpp"

namespace twinaudit::vuln {

class IngestFailed : public IoError {
 public:
  explicit IngestFailed(const std::string& message) : IoError(message, "ingest_failed") {}
};

struct AffectedPackage {
  std::string name;  // as written in the feed
  VersionRange range;

  friend bool operator==(const AffectedPackage&, const AffectedPackage&) = default;
};

struct VulnerabilityRecord {
  std::string cve_id;
  std::string summary;
  bom::CvssScore cvss_score;
  std::string cvss_vector;
  std::vector<AffectedPackage> affected;

  friend bool operator==(const VulnerabilityRecord&, const VulnerabilityRecord&) = default;
};

struct IngestReport {
  std::size_t count = 0;    // distinct CVE records indexed
  std::size_t rejects = 0;  // malformed lines
  std::vector<std::string> reject_reasons;  // "line N: reason"
};

// One feed line. Throws InvalidArgumentError describing the first problem.
VulnerabilityRecord RecordFromJson(const nlohmann::json& value);
nlohmann::json ToJson(const VulnerabilityRecord& record);

// CVSS v3.1 qualitative band. Throws InvalidArgumentError outside [0, 10].
bom::Severity ScoreToSeverity(double score);

// Immutable after ingest; safe for concurrent lookups.
class VulnStore {
 public:
  VulnStore() = default;

  // Each non-blank line is one JSON record:
  // {cve, summary, cvss{score, vector}, affects[{name, introduced?, fixed?, lastAffected?}]}
  // `introduced` is inclusive, `fixed` exclusive, `lastAffected` inclusive.
  // Records sharing a CVE id are merged; the result does not depend on line
  // order.
  static VulnStore FromFeedText(std::string_view text, IngestReport* report = nullptr);
  // Throws IngestFailed when the file cannot be read.
  static VulnStore FromFeedFile(const std::filesystem::path& path, IngestReport* report = nullptr);

  // Records with an affected entry whose normalized name equals `name` and
  // whose range contains `version`, ordered by cve_id. An empty version never
  // matches.
  std::vector<VulnerabilityRecord> Lookup(std::string_view name, std::string_view version) const;

  std::size_t size() const { return records_.size(); }
  const std::vector<VulnerabilityRecord>& records() const { return records_; }

 private:
  std::vector<VulnerabilityRecord> records_;  // sorted by cve_id
  std::map<std::string, std::vector<std::size_t>> by_name_;
};

}  // namespace twinaudit::vuln
