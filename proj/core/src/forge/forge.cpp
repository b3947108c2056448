#include "twinaudit/forge/forge.hpp"

#include <algorithm>
#include <set>

#include "twinaudit/errors.hpp"
#include "twinaudit/ids.hpp"

namespace twinaudit::forge {

using bom::Bom;
using bom::Component;
using bom::ComponentType;
using bom::CryptoAssetKind;
using evidence::Category;
using evidence::EvidenceRecord;
namespace attr = evidence::attr;

namespace {

void AddProp(std::vector<bom::Property>& props, std::string_view name, std::string value) {
  props.push_back({std::string(name), std::move(value)});
}

Bom NewBom(const BomIdentity& id, bom::BomKind kind, const std::string& subject,
           std::string_view role) {
  Bom b;
  b.serial_number = id.serial_number.empty() ? MakeUrnUuid() : id.serial_number;
  b.version = id.version;
  b.kind = kind;
  b.metadata.subject = subject;
  b.metadata.subject_type = "device";
  AddProp(b.metadata.properties, prop::kRole, std::string(role));
  AddProp(b.metadata.properties, prop::kHost, subject);
  return b;
}

// Unique bom-ref derived from `base`.
std::string Reserve(std::set<std::string>& used, const std::string& base) {
  std::string ref = base;
  for (int i = 2; !used.insert(ref).second; ++i) ref = base + "#" + std::to_string(i);
  return ref;
}

std::string GraphRef(const NodeId& id) {
  if (id.layer == kOccurrenceLayer) {
    // host|token|path
    const auto a = id.name.find('|');
    const auto b = id.name.find('|', a + 1);
    return "occ:" + id.name.substr(a + 1, b - a - 1) + "@" + id.name.substr(b + 1);
  }
  return "crypto:" + std::to_string(id.layer) + ":" + id.name;
}

void CheckHost(const std::string& host_id, const EvidenceRecord& r) {
  if (r.host_id != host_id) {
    throw InvalidArgumentError("evidence record for host '" + r.host_id + "' passed for '" +
                               host_id + "'");
  }
}

}  // namespace

ArtifactCounts& ArtifactCounts::operator+=(const ArtifactCounts& o) {
  algorithms += o.algorithms;
  vulnerabilities += o.vulnerabilities;
  components += o.components;
  certificates += o.certificates;
  return *this;
}

std::string DocumentRole(const Bom& b) { return b.metadata.property(prop::kRole).value_or(""); }

Bom BuildSbom(const std::string& host_id, const std::vector<EvidenceRecord>& evidence,
              const BomIdentity& id) {
  Bom out = NewBom(id, bom::BomKind::kSbom, host_id, "sbom");
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::vector<const EvidenceRecord*>> groups;
  for (const auto& r : evidence) {
    CheckHost(host_id, r);
    if (r.category != Category::kSoftwareComponent || r.is_warning()) continue;
    groups[{r.name, r.version.value_or("")}].push_back(&r);
  }
  std::set<std::string> used;
  std::map<Key, std::string> refs;
  for (auto& [key, records] : groups) {
    std::sort(records.begin(), records.end(),
              [](const EvidenceRecord* a, const EvidenceRecord* b) { return RecordLess(*a, *b); });
    const EvidenceRecord& first = *records.front();
    Component c;
    c.name = key.first;
    c.version = key.second;
    c.type = ComponentType::kLibrary;
    std::set<std::string> paths;
    std::set<std::string> ranges;
    for (const auto* r : records) {
      if (r->attribute(attr::kRole) == "project") c.type = ComponentType::kApplication;
      paths.insert(r->source_path);
      if (auto range = r->attribute(attr::kVersionRange)) ranges.insert(*range);
    }
    const auto purl = first.attribute(attr::kPurl);
    if (purl) c.package_url = *purl;
    c.bom_ref = Reserve(used, purl ? *purl : "component:" + key.first + "@" + key.second);
    if (auto eco = first.attribute(attr::kEcosystem)) AddProp(c.properties, prop::kEcosystem, *eco);
    for (const auto& p : paths) AddProp(c.properties, prop::kSourcePath, p);
    for (const auto& r : ranges) AddProp(c.properties, prop::kVersionRange, r);
    refs[key] = c.bom_ref;
    out.components.push_back(std::move(c));
  }
  std::map<std::string, std::set<std::string>> deps;
  for (const auto& [key, records] : groups) {
    for (const auto* r : records) {
      for (const auto& rel : r->relationships) {
        if (rel.kind != evidence::kDependsOn) continue;
        auto it = refs.find({rel.target_name, rel.target_version.value_or("")});
        if (it == refs.end() || it->second == refs[key]) continue;
        deps[refs[key]].insert(it->second);
      }
    }
  }
  for (auto& [ref, targets] : deps) {
    out.dependencies.push_back({ref, std::vector<std::string>(targets.begin(), targets.end())});
  }
  return bom::Canonicalize(std::move(out));
}

Bom BuildCbom(const std::string& host_id, const CryptoHierarchyGraph& graph,
              const std::vector<EvidenceRecord>& evidence, const BomIdentity& id) {
  Bom out = NewBom(id, bom::BomKind::kCbom, host_id, "cbom");
  std::set<std::string> used;
  std::map<std::string, std::set<std::string>> deps;

  const std::set<NodeId> ancestors = graph.AncestorsForHost(host_id);
  const std::vector<NodeId> occurrences = graph.OccurrencesForHost(host_id);
  std::set<NodeId> included(ancestors.begin(), ancestors.end());
  included.insert(occurrences.begin(), occurrences.end());

  const auto all_edges = graph.edges();
  // Algorithm parameterizations each protocol parameterization relies on here.
  std::map<NodeId, std::set<std::string>> protocol_suites;
  for (const auto& e : all_edges) {
    if (e.kind != EdgeKind::kDependsOn || !included.count(e.from) || !included.count(e.to)) continue;
    const CryptoNode* from = graph.Find(e.from);
    const CryptoNode* to = graph.Find(e.to);
    if (from->node_class == NodeClass::kProtocol && to->node_class == NodeClass::kAlgorithm) {
      protocol_suites[*graph.Parent(e.from)].insert(GraphRef(*graph.Parent(e.to)));
    }
  }

  for (const auto& nid : included) {
    const CryptoNode& n = *graph.Find(nid);
    Component c;
    c.bom_ref = Reserve(used, GraphRef(nid));
    AddProp(c.properties, prop::kLayer, std::to_string(nid.layer));
    if (nid.layer == kOccurrenceLayer) {
      c.type = ComponentType::kFile;
      c.name = n.path;
      AddProp(c.properties, "twinaudit:token", n.token);
      AddProp(c.properties, prop::kSourcePath, n.path);
    } else if (n.node_class == NodeClass::kLibrary) {
      c.type = ComponentType::kLibrary;
      c.name = nid.name;
      if (nid.layer == kParameterLayer) c.version = n.version;
    } else {
      c.type = ComponentType::kCryptoAsset;
      c.name = nid.name;
      bom::CryptoProperties cp;
      cp.primitive = n.primitive;
      if (nid.layer >= kFamilyLayer) cp.algorithm_family = n.family;
      if (nid.layer == kParameterLayer) {
        if (!n.parameter_set.empty()) cp.parameter_set = n.parameter_set;
        if (!n.mode.empty()) cp.mode = n.mode;
      }
      if (n.node_class == NodeClass::kProtocol) {
        cp.asset_kind = CryptoAssetKind::kProtocol;
        bom::ProtocolFields pf;
        pf.type = nid.layer == kPrimitiveLayer ? "tls" : std::string(n.family == "SSL" ? "ssl" : "tls");
        if (nid.layer == kParameterLayer) {
          pf.version = n.version;
          c.version = n.version;
          auto it = protocol_suites.find(nid);
          if (it != protocol_suites.end()) {
            pf.cipher_suite_refs.assign(it->second.begin(), it->second.end());
          }
        }
        cp.protocol = std::move(pf);
      } else {
        cp.asset_kind = CryptoAssetKind::kAlgorithm;
      }
      c.crypto = std::move(cp);
    }
    out.components.push_back(std::move(c));
  }
  for (const auto& e : all_edges) {
    if (!included.count(e.from) || !included.count(e.to)) continue;
    if (e.kind == EdgeKind::kUsedBy) {
      deps[GraphRef(e.to)].insert(GraphRef(e.from));
    } else {
      deps[GraphRef(e.from)].insert(GraphRef(e.to));
    }
  }

  auto l2 = [&](const std::string& token) -> std::optional<std::string> {
    const NodeId nid{kParameterLayer, token};
    if (!included.count(nid)) return std::nullopt;
    return GraphRef(nid);
  };

  for (const auto& r : evidence) {
    CheckHost(host_id, r);
    if (r.is_warning()) continue;
    if (r.category == Category::kCertificate) {
      const auto nb = r.attribute("not_before").value_or("");
      const auto na = r.attribute("not_after").value_or("");
      if (!bom::IsIsoTimestamp(nb) || !bom::IsIsoTimestamp(na)) continue;
      Component c;
      c.type = ComponentType::kCertificate;
      c.name = r.name;
      c.bom_ref = Reserve(used, "cert:" + r.source_path + "#" + r.name);
      bom::CryptoProperties cp;
      cp.asset_kind = CryptoAssetKind::kCertificate;
      bom::CertificateFields cf;
      cf.subject = r.attribute("subject").value_or("");
      cf.issuer = r.attribute("issuer").value_or("");
      cf.not_before = nb;
      cf.not_after = na;
      const auto key_ref = l2(r.attribute(attr::kKeyToken).value_or(""));
      const auto digest_ref = l2(r.attribute(attr::kSignatureDigest).value_or(""));
      if (digest_ref) {
        cf.signature_algorithm_ref = *digest_ref;
      } else if (key_ref) {
        cf.signature_algorithm_ref = *key_ref;
      }
      cp.certificate = std::move(cf);
      c.crypto = std::move(cp);
      for (const char* k : {"serial", "fingerprint_sha256", "key_algorithm", "key_size", "curve",
                            "signature_algorithm", "format"}) {
        if (auto v = r.attribute(k)) AddProp(c.properties, std::string("twinaudit:") + k, *v);
      }
      AddProp(c.properties, prop::kSourcePath, r.source_path);
      for (const auto& ref : {key_ref, digest_ref}) {
        if (ref) deps[c.bom_ref].insert(*ref);
      }
      out.components.push_back(std::move(c));
    } else if (r.category == Category::kKernelSetting) {
      Component c;
      c.type = ComponentType::kOperatingSystemSetting;
      c.name = r.name;
      c.bom_ref = Reserve(used, "setting:" + r.name);
      AddProp(c.properties, "twinaudit:value", r.attribute(attr::kValue).value_or(""));
      AddProp(c.properties, prop::kSourcePath, r.source_path);
      out.components.push_back(std::move(c));
    } else if (r.category == Category::kOpensslConfig &&
               r.attribute(attr::kKind) == "cipher_config") {
      Component c;
      c.type = ComponentType::kOperatingSystemSetting;
      c.name = r.name;
      c.bom_ref = Reserve(used, "tls-config:" + r.source_path + "#" + r.name);
      AddProp(c.properties, "twinaudit:value", r.attribute(attr::kValue).value_or(""));
      AddProp(c.properties, prop::kSourcePath, r.source_path);
      for (const auto& rel : r.relationships) {
        if (auto ref = l2(rel.target_name)) deps[c.bom_ref].insert(*ref);
      }
      out.components.push_back(std::move(c));
    } else if (r.category == Category::kSystemLogEvent) {
      Component c;
      c.type = ComponentType::kFile;
      c.name = r.name;
      c.bom_ref = Reserve(used, "log:" + r.source_path + "#" + r.name);
      AddProp(c.properties, "twinaudit:count", r.attribute(attr::kCount).value_or("0"));
      AddProp(c.properties, prop::kSourcePath, r.source_path);
      out.components.push_back(std::move(c));
    }
  }
  for (auto& [ref, targets] : deps) {
    targets.erase(ref);
    if (targets.empty()) continue;
    out.dependencies.push_back({ref, std::vector<std::string>(targets.begin(), targets.end())});
  }
  for (const auto& q : graph.quarantine()) {
    if (q.host != host_id) continue;
    AddProp(out.metadata.properties, prop::kQuarantine,
            q.name + " (" + q.source_path + "): " + q.reason);
  }
  return bom::Canonicalize(std::move(out));
}

Bom EnrichWithVulnerabilities(Bom b, const vuln::VulnStore& store) {
  std::map<std::string, bom::VulnerabilityEntry> entries;
  for (auto& v : b.vulnerabilities) entries.emplace(v.cve_id, std::move(v));
  for (const auto& c : b.components) {
    if (c.version.empty()) continue;
    for (const auto& rec : store.Lookup(c.name, c.version)) {
      auto it = entries.find(rec.cve_id);
      if (it == entries.end()) {
        bom::VulnerabilityEntry e;
        e.cve_id = rec.cve_id;
        e.cvss_score = rec.cvss_score;
        e.cvss_vector = rec.cvss_vector;
        e.severity = bom::SeverityForScore(rec.cvss_score);
        e.description = rec.summary;
        e.analysis_state = bom::AnalysisState::kInTriage;
        e.affects = {c.bom_ref};
        entries.emplace(rec.cve_id, std::move(e));
      } else if (std::find(it->second.affects.begin(), it->second.affects.end(), c.bom_ref) ==
                 it->second.affects.end()) {
        it->second.affects.push_back(c.bom_ref);
      }
    }
  }
  b.vulnerabilities.clear();
  for (auto& [id, e] : entries) b.vulnerabilities.push_back(std::move(e));
  return bom::Canonicalize(std::move(b));
}

LinkedBoms LinkToProfile(std::vector<Bom> boms, const std::string& profile_id,
                         const BomIdentity& manifest_id) {
  std::set<std::string> serials;
  for (const auto& b : boms) {
    if (!serials.insert(b.serial_number).second) {
      throw InvalidArgumentError("duplicate BOM serial number " + b.serial_number);
    }
  }
  LinkedBoms out;
  Bom& m = out.manifest;
  m.serial_number = manifest_id.serial_number.empty() ? MakeUrnUuid() : manifest_id.serial_number;
  if (serials.count(m.serial_number)) {
    throw InvalidArgumentError("manifest serial collides with a host BOM");
  }
  m.version = manifest_id.version;
  m.kind = bom::BomKind::kMixed;
  m.metadata.subject = profile_id;
  m.metadata.subject_type = "data";
  AddProp(m.metadata.properties, prop::kRole, "manifest");
  AddProp(m.metadata.properties, prop::kProfile, profile_id);
  for (const auto& b : boms) m.links.push_back({b.serial_number, b.version, std::nullopt});
  m = bom::Canonicalize(std::move(m));
  for (auto& b : boms) {
    b.links.push_back({m.serial_number, m.version, std::nullopt});
    out.boms.push_back(bom::Canonicalize(std::move(b)));
  }
  return out;
}

Bom RelinkManifest(const Bom& manifest, const std::vector<Bom>& boms,
                   std::uint64_t manifest_version) {
  Bom m = manifest;
  m.version = manifest_version;
  m.links.clear();
  for (const auto& b : boms) m.links.push_back({b.serial_number, b.version, std::nullopt});
  return bom::Canonicalize(std::move(m));
}

CountReport CountArtifacts(const std::vector<Bom>& boms) {
  std::map<std::string, const Bom*> latest;
  for (const auto& b : boms) {
    auto& slot = latest[b.serial_number];
    if (!slot || slot->version < b.version) slot = &b;
  }
  CountReport report;
  for (const auto& [serial, b] : latest) {
    std::string role = DocumentRole(*b);
    if (role == "manifest") continue;
    if (role.empty()) role = b->kind == bom::BomKind::kCbom ? "cbom" : "sbom";
    const std::string host = b->metadata.property(prop::kHost).value_or(b->metadata.subject);
    ArtifactCounts& c = report.per_host[host];
    c.vulnerabilities += b->vulnerabilities.size();
    if (role == "sbom") c.components += b->components.size();
    if (role == "cbom") {
      for (const auto& comp : b->components) {
        if (comp.type == ComponentType::kCertificate) ++c.certificates;
        if (comp.type == ComponentType::kCryptoAsset && comp.crypto &&
            comp.crypto->asset_kind == CryptoAssetKind::kAlgorithm &&
            comp.property(prop::kLayer) == std::to_string(kParameterLayer)) {
          ++c.algorithms;
        }
      }
    }
  }
  for (const auto& [host, c] : report.per_host) report.total += c;
  return report;
}

}  // namespace twinaudit::forge
