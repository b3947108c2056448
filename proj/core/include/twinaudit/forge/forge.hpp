#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "twinaudit/bom/model.hpp"
#include "twinaudit/evidence/record.hpp"
#include "twinaudit/forge/graph.hpp"
#include "twinaudit/vuln/store.hpp"

namespace twinaudit::forge {

// Property names written by the BOM creator.
namespace prop {
inline constexpr std::string_view kRole = "twinaudit:document-role";  // sbom | cbom | manifest
inline constexpr std::string_view kHost = "twinaudit:host";
inline constexpr std::string_view kProfile = "twinaudit:profile-id";
inline constexpr std::string_view kLayer = "twinaudit:crypto-layer";
inline constexpr std::string_view kQuarantine = "twinaudit:quarantine";
inline constexpr std::string_view kSourcePath = "twinaudit:source-path";
inline constexpr std::string_view kEcosystem = "twinaudit:ecosystem";
inline constexpr std::string_view kVersionRange = "twinaudit:version-range";
}  // namespace prop

// Serial and version for an emitted document; an empty serial draws a fresh
// urn:uuid.
struct BomIdentity {
  std::string serial_number;
  std::uint64_t version = 1;
};

// SOFTWARE_COMPONENT records of one host to an SBOM. One component per
// distinct (name, version), one dependency edge per DEPENDS_ON relationship.
// Warning records are ignored. Throws InvalidArgumentError when a record
// names another host.
bom::Bom BuildSbom(const std::string& host_id, const std::vector<evidence::EvidenceRecord>& evidence,
                   const BomIdentity& id = {});

// Graph nodes above this host's occurrences become CRYPTO_ASSET components
// (LIBRARY for crypto libraries), occurrences become FILE components, and
// REFINES/USED_BY/DEPENDS_ON edges become dependencies pointing toward the
// primitive layer. CERTIFICATE, KERNEL_SETTING, SYSTEM_LOG_EVENT and cipher
// configuration records are added from `evidence`.
bom::Bom BuildCbom(const std::string& host_id, const CryptoHierarchyGraph& graph,
                   const std::vector<evidence::EvidenceRecord>& evidence, const BomIdentity& id = {});

// Adds one VEX entry per matching CVE to every versioned component. Existing
// entries gain missing affects; nothing else changes, so the operation is
// idempotent. The document kind is left as is.
bom::Bom EnrichWithVulnerabilities(bom::Bom bom, const vuln::VulnStore& store);

struct LinkedBoms {
  bom::Bom manifest;
  std::vector<bom::Bom> boms;  // inputs, each with a back-link to the manifest
};

// Throws InvalidArgumentError on duplicate serial numbers.
LinkedBoms LinkToProfile(std::vector<bom::Bom> boms, const std::string& profile_id,
                         const BomIdentity& manifest_id = {});

// Rebuilds manifest links so they point at the given host documents, keeping
// the manifest serial and using `manifest_version`.
bom::Bom RelinkManifest(const bom::Bom& manifest, const std::vector<bom::Bom>& boms,
                        std::uint64_t manifest_version);

struct ArtifactCounts {
  std::size_t algorithms = 0;
  std::size_t vulnerabilities = 0;
  std::size_t components = 0;
  std::size_t certificates = 0;

  ArtifactCounts& operator+=(const ArtifactCounts& o);
  friend bool operator==(const ArtifactCounts&, const ArtifactCounts&) = default;
};

struct CountReport {
  std::map<std::string, ArtifactCounts> per_host;
  ArtifactCounts total;
};

// algorithms: layer-2 ALGORITHM assets; components: SBOM components;
// vulnerabilities: VEX entries; certificates: CERTIFICATE components. Only
// the highest version of each serial is counted; manifests are skipped.
CountReport CountArtifacts(const std::vector<bom::Bom>& boms);

// Document role property of a Bom: sbom, cbom, manifest, or empty.
std::string DocumentRole(const bom::Bom& bom);

}  // namespace twinaudit::forge
