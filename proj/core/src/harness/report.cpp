#include "twinaudit/harness/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <set>
#include <sstream>
#include <tuple>

#include "twinaudit/errors.hpp"
#include "twinaudit/harness/fixture.hpp"

namespace twinaudit::harness {

std::vector<GroupRow> GroupCounts(const forge::CountReport& counts,
                                  const std::map<std::string, std::string>& host_roles) {
  std::map<std::string, GroupRow> by_group;
  for (const auto& [host, c] : counts.per_host) {
    auto role = host_roles.find(host);
    const std::string group = GroupForRole(role == host_roles.end() ? host : role->second);
    auto& row = by_group[group];
    row.group = group;
    row.hosts.push_back(host);
    row.counts += c;
  }
  std::vector<GroupRow> out;
  for (const auto& g : GroupOrder()) {
    auto it = by_group.find(g);
    if (it == by_group.end()) continue;
    out.push_back(std::move(it->second));
    by_group.erase(it);
  }
  for (auto& [g, row] : by_group) out.push_back(std::move(row));
  return out;
}

std::int64_t ParseIsoSeconds(const std::string& text) {
  std::tm tm{};
  std::istringstream in(text);
  in >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  if (in.fail()) throw InvalidArgumentError("not an ISO-8601 timestamp: " + text);
  return static_cast<std::int64_t>(timegm(&tm));
}

namespace {

std::string HostOf(const bom::Bom& b) {
  return b.metadata.property(forge::prop::kHost).value_or(b.metadata.subject);
}

}  // namespace

RunReport BuildRunReport(const ams::AuditRun& run, const std::vector<bom::Bom>& documents,
                         const std::map<std::string, std::string>& host_roles,
                         std::int64_t now_unix_millis, std::size_t top_n) {
  RunReport r;
  r.run_id = run.run_id;
  r.profile_id = run.profile_id;
  r.state = std::string(ams::ToString(run.state));
  r.sdt_id = run.sdt_id.value_or("");
  r.sdt_version = run.sdt_version;
  r.counts = forge::CountArtifacts(documents);
  r.groups = GroupCounts(r.counts, host_roles);

  const std::int64_t now = now_unix_millis / 1000;
  std::vector<VulnerabilityLine> vulns;
  for (const auto& b : documents) {
    const std::string role = forge::DocumentRole(b);
    const std::string host = HostOf(b);
    if (role == "sbom") {
      for (const auto& v : b.vulnerabilities) {
        std::string component;
        for (const auto& ref : v.affects) {
          if (const auto* c = b.FindComponent(ref)) {
            component += (component.empty() ? "" : ", ") + c->name + "@" + c->version;
          }
        }
        vulns.push_back({v.cve_id, v.cvss_score, v.severity, host, component});
      }
    } else if (role == "cbom") {
      for (const auto& c : b.components) {
        if (c.type != bom::ComponentType::kCertificate || !c.crypto || !c.crypto->certificate) continue;
        const auto& cert = *c.crypto->certificate;
        CertificateLine line{host, cert.subject, cert.not_after, 0, "valid"};
        const std::int64_t seconds_left = ParseIsoSeconds(cert.not_after) - now;
        line.days_left = seconds_left >= 0 ? seconds_left / 86400 : -((-seconds_left + 86399) / 86400);
        if (seconds_left < 0) {
          line.status = "expired";
        } else if (line.days_left < kExpiringWithinDays) {
          line.status = "expiring";
        }
        r.certificates.push_back(std::move(line));
      }
    }
  }
  std::sort(vulns.begin(), vulns.end(), [](const VulnerabilityLine& a, const VulnerabilityLine& b) {
    if (a.score.tenths() != b.score.tenths()) return a.score.tenths() > b.score.tenths();
    return a.cve_id < b.cve_id;
  });
  r.vulnerability_total = vulns.size();
  if (vulns.size() > top_n) vulns.resize(top_n);
  r.top_vulnerabilities = std::move(vulns);
  std::sort(r.certificates.begin(), r.certificates.end(),
            [](const CertificateLine& a, const CertificateLine& b) {
              return std::tie(a.not_after, a.host) < std::tie(b.not_after, b.host);
            });
  return r;
}

namespace {

std::string Cells(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

std::string Rule(std::size_t n) {
  std::string out = "|";
  for (std::size_t i = 0; i < n; ++i) out += "---|";
  return out + "\n";
}

std::vector<std::string> CountCells(const forge::ArtifactCounts& c) {
  return {std::to_string(c.algorithms), std::to_string(c.vulnerabilities),
          std::to_string(c.components), std::to_string(c.certificates)};
}

std::string JoinHosts(const std::vector<std::string>& hosts) {
  std::string out;
  for (const auto& h : hosts) out += (out.empty() ? "" : ", ") + h;
  return out;
}

}  // namespace

std::string RenderMarkdown(const RunReport& r) {
  std::ostringstream o;
  o << "# Audit run " << r.run_id << "\n\n";
  o << "- profile: " << r.profile_id << "\n";
  o << "- state: " << r.state << "\n";
  if (!r.sdt_id.empty()) o << "- sdt: " << r.sdt_id << " (representation v" << r.sdt_version << ")\n";
  o << "\n## Artifact counts by host group\n\n";
  o << Cells({"Host group", "Hosts", "Algorithms", "Vulnerabilities", "Components", "Certificates"});
  o << Rule(6);
  for (const auto& g : r.groups) {
    std::vector<std::string> cells = {g.group, JoinHosts(g.hosts)};
    for (auto& c : CountCells(g.counts)) cells.push_back(c);
    o << Cells(cells);
  }
  {
    std::vector<std::string> cells = {"Total", ""};
    for (auto& c : CountCells(r.counts.total)) cells.push_back(c);
    o << Cells(cells);
  }
  o << "\n## Artifact counts by host\n\n";
  o << Cells({"Host", "Algorithms", "Vulnerabilities", "Components", "Certificates"}) << Rule(5);
  for (const auto& [host, c] : r.counts.per_host) {
    std::vector<std::string> cells = {host};
    for (auto& x : CountCells(c)) cells.push_back(x);
    o << Cells(cells);
  }
  o << "\n## Top vulnerabilities by CVSS (" << r.top_vulnerabilities.size() << " of "
    << r.vulnerability_total << ")\n\n";
  if (r.top_vulnerabilities.empty()) {
    o << "No vulnerabilities recorded.\n";
  } else {
    o << Cells({"CVE", "CVSS", "Severity", "Host", "Component"}) << Rule(5);
    for (const auto& v : r.top_vulnerabilities) {
      o << Cells({v.cve_id, v.score.ToString(), std::string(bom::ToString(v.severity)), v.host,
                  v.component});
    }
  }
  o << "\n## Certificate expiry\n\n";
  if (r.certificates.empty()) {
    o << "No certificates recorded.\n";
  } else {
    o << Cells({"Host", "Subject", "Not after", "Days left", "Status"}) << Rule(5);
    for (const auto& c : r.certificates) {
      o << Cells({c.host, c.subject, c.not_after, std::to_string(c.days_left), c.status});
    }
  }
  return o.str();
}

}  // namespace twinaudit::harness
