#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "twinaudit/ams/run.hpp"
#include "twinaudit/bom/model.hpp"
#include "twinaudit/forge/forge.hpp"

namespace twinaudit::harness {

struct GroupRow {
  std::string group;
  std::vector<std::string> hosts;
  forge::ArtifactCounts counts;
};

struct VulnerabilityLine {
  std::string cve_id;
  bom::CvssScore score;
  bom::Severity severity = bom::Severity::kNone;
  std::string host;
  std::string component;  // name@version
};

struct CertificateLine {
  std::string host;
  std::string subject;
  std::string not_after;
  std::int64_t days_left = 0;
  std::string status;  // expired | expiring | valid
};

struct RunReport {
  std::string run_id;
  std::string profile_id;
  std::string state;
  std::string sdt_id;
  std::uint64_t sdt_version = 0;
  forge::CountReport counts;
  std::vector<GroupRow> groups;
  std::vector<VulnerabilityLine> top_vulnerabilities;
  std::size_t vulnerability_total = 0;
  std::vector<CertificateLine> certificates;
};

// Rows come from CountArtifacts, grouped by GroupForRole of each host's role
// and ordered by GroupOrder; unknown groups follow alphabetically.
std::vector<GroupRow> GroupCounts(const forge::CountReport& counts,
                                  const std::map<std::string, std::string>& host_roles);

inline constexpr std::int64_t kExpiringWithinDays = 30;

RunReport BuildRunReport(const ams::AuditRun& run, const std::vector<bom::Bom>& documents,
                         const std::map<std::string, std::string>& host_roles,
                         std::int64_t now_unix_millis, std::size_t top_n = 10);

std::string RenderMarkdown(const RunReport& report);

// ISO-8601 UTC second-precision timestamp to unix seconds.
std::int64_t ParseIsoSeconds(const std::string& text);

}  // namespace twinaudit::harness
