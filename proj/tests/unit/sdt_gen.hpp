#pragma once

#include <string>
#include <vector>

#include "support.hpp"
#include "twinaudit/forge/forge.hpp"

namespace twinaudit::testing {

inline std::vector<evidence::EvidenceRecord> PackageRecords(Gen& g, const std::string& host) {
  std::vector<evidence::EvidenceRecord> out;
  for (int i = g.Int(1, 6); i > 0; --i) {
    evidence::EvidenceRecord r;
    r.host_id = host;
    r.category = evidence::Category::kSoftwareComponent;
    r.name = g.Pick(std::vector<std::string>{"express", "lodash", "flask", "requests", "zlib"});
    r.version = g.VersionString();
    r.attributes["ecosystem"] = "npm";
    r.source_path = "srv/app/package.json";
    r.occurrences = {r.source_path};
    out.push_back(r);
  }
  return out;
}

// One SBOM per host, with distinct hosts.
inline std::vector<bom::Bom> HostBoms(Gen& g, int hosts) {
  std::vector<bom::Bom> out;
  for (int h = 0; h < hosts; ++h) {
    const std::string host = "host-" + std::to_string(h);
    out.push_back(forge::BuildSbom(host, PackageRecords(g, host)));
  }
  return out;
}

// Same serial, next version, different package set.
inline bom::Bom NextRevision(Gen& g, const bom::Bom& b) {
  const std::string host = b.metadata.property(forge::prop::kHost).value_or(b.metadata.subject);
  for (;;) {
    bom::Bom next = forge::BuildSbom(host, PackageRecords(g, host), {b.serial_number, b.version + 1});
    if (next.components != b.components) return next;
  }
}

}  // namespace twinaudit::testing
