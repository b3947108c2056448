#include "twinaudit/bom/validate.hpp"

#include <set>
#include <unordered_set>

#include "twinaudit/ids.hpp"

namespace twinaudit::bom {

namespace {

std::string Index(std::string_view field, std::size_t i) {
  return std::string(field) + "[" + std::to_string(i) + "]";
}

class Checker {
 public:
  explicit Checker(const Bom& bom) : bom_(bom) {
    for (const auto& c : bom.components) refs_.insert(c.bom_ref);
  }

  std::vector<Violation> Run() {
    CheckHeader();
    CheckComponents();
    CheckDependencies();
    CheckVulnerabilities();
    CheckLinks();
    return std::move(out_);
  }

 private:
  void Add(std::string path, std::string message) {
    out_.push_back({std::move(path), std::move(message)});
  }

  // Local bom-ref or a well-formed BOM-Link into another document.
  bool Resolvable(const std::string& ref) const {
    return refs_.count(ref) > 0 || BomLink::Parse(ref).has_value();
  }

  void CheckHeader() {
    if (bom_.serial_number.empty()) {
      Add("serialNumber", "missing required field serialNumber");
    } else if (!IsUrnUuid(bom_.serial_number)) {
      Add("serialNumber", "'" + bom_.serial_number + "' is not a urn:uuid RFC-4122 value");
    }
    if (bom_.version < 1) Add("version", "version must be a positive integer");
  }

  void CheckComponents() {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < bom_.components.size(); ++i) {
      const auto& c = bom_.components[i];
      const std::string path = Index("components", i);
      if (c.bom_ref.empty()) {
        Add(path + ".bom-ref", "missing bom-ref");
      } else if (!seen.insert(c.bom_ref).second) {
        Add(path + ".bom-ref", "duplicate bom-ref '" + c.bom_ref + "'");
      }
      if (c.name.empty()) Add(path + ".name", "missing name");

      const bool crypto_type =
          c.type == ComponentType::kCryptoAsset || c.type == ComponentType::kCertificate;
      if (crypto_type != c.crypto.has_value()) {
        Add(path + ".cryptoProperties",
            crypto_type ? "cryptoProperties required for crypto asset or certificate"
                        : "cryptoProperties only allowed on crypto assets and certificates");
      }
      if (c.crypto) CheckCrypto(path + ".cryptoProperties", c, *c.crypto);
    }
  }

  void CheckCrypto(const std::string& path, const Component& c, const CryptoProperties& p) {
    const bool is_cert = p.asset_kind == CryptoAssetKind::kCertificate;
    if ((c.type == ComponentType::kCertificate) != is_cert) {
      Add(path + ".assetType", "component type CERTIFICATE requires assetType certificate");
    }
    if (is_cert != p.certificate.has_value()) {
      Add(path + ".certificateProperties",
          is_cert ? "certificate fields required" : "certificate fields only allowed on certificates");
    }
    const bool is_protocol = p.asset_kind == CryptoAssetKind::kProtocol;
    if (is_protocol != p.protocol.has_value()) {
      Add(path + ".protocolProperties",
          is_protocol ? "protocol fields required" : "protocol fields only allowed on protocols");
    }
    if (p.certificate) {
      const auto& cert = *p.certificate;
      const std::string cpath = path + ".certificateProperties";
      bool dates_ok = true;
      if (!IsIsoTimestamp(cert.not_before)) {
        Add(cpath + ".notValidBefore", "not an ISO-8601 UTC timestamp");
        dates_ok = false;
      }
      if (!IsIsoTimestamp(cert.not_after)) {
        Add(cpath + ".notValidAfter", "not an ISO-8601 UTC timestamp");
        dates_ok = false;
      }
      if (dates_ok && cert.not_before > cert.not_after) {
        Add(cpath, "notValidBefore is after notValidAfter");
      }
      if (!cert.signature_algorithm_ref.empty() && !Resolvable(cert.signature_algorithm_ref)) {
        Add(cpath + ".signatureAlgorithmRef",
            "unresolved reference '" + cert.signature_algorithm_ref + "'");
      }
    }
    if (p.protocol) {
      for (const auto& ref : p.protocol->cipher_suite_refs) {
        if (!Resolvable(ref)) {
          Add(path + ".protocolProperties.cipherSuites", "unresolved reference '" + ref + "'");
        }
      }
    }
  }

  void CheckDependencies() {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < bom_.dependencies.size(); ++i) {
      const auto& d = bom_.dependencies[i];
      const std::string path = Index("dependencies", i);
      if (!seen.insert(d.ref).second) {
        Add(path + ".ref", "duplicate dependency entry for '" + d.ref + "'");
      }
      if (!Resolvable(d.ref)) Add(path + ".ref", "unresolved reference '" + d.ref + "'");
      std::set<std::string> targets;
      for (const auto& dep : d.depends_on) {
        if (dep == d.ref) Add(path + ".dependsOn", "self-dependency on '" + dep + "'");
        if (!targets.insert(dep).second) {
          Add(path + ".dependsOn", "duplicate edge to '" + dep + "'");
        }
        if (!Resolvable(dep)) Add(path + ".dependsOn", "unresolved reference '" + dep + "'");
      }
    }
  }

  void CheckVulnerabilities() {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < bom_.vulnerabilities.size(); ++i) {
      const auto& v = bom_.vulnerabilities[i];
      const std::string path = Index("vulnerabilities", i);
      if (!IsCveId(v.cve_id)) Add(path + ".id", "'" + v.cve_id + "' is not a CVE identifier");
      if (!seen.insert(v.cve_id).second) Add(path + ".id", "duplicate vulnerability " + v.cve_id);
      if (SeverityForScore(v.cvss_score) != v.severity) {
        Add(path + ".ratings", "severity " + std::string(ToString(v.severity)) +
                                   " inconsistent with score " + v.cvss_score.ToString());
      }
      if (v.affects.empty()) Add(path + ".affects", "affects must not be empty");
      for (const auto& ref : v.affects) {
        if (!Resolvable(ref)) Add(path + ".affects", "unresolved reference '" + ref + "'");
      }
    }
  }

  void CheckLinks() {
    for (std::size_t i = 0; i < bom_.links.size(); ++i) {
      const auto& l = bom_.links[i];
      const std::string path = Index("externalReferences", i);
      if (!IsUrnUuid(l.target_serial)) Add(path, "link target is not a urn:uuid");
      if (l.target_version < 1) Add(path, "link target version must be positive");
    }
  }

  const Bom& bom_;
  std::unordered_set<std::string> refs_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> ValidateBom(const Bom& bom) { return Checker(bom).Run(); }

std::vector<std::string> ToStrings(const std::vector<Violation>& violations) {
  std::vector<std::string> out;
  out.reserve(violations.size());
  for (const auto& v : violations) out.push_back(v.ToString());
  return out;
}

}  // namespace twinaudit::bom
