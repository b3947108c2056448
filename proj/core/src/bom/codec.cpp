#include "twinaudit/bom/codec.hpp"

#include <algorithm>
#include <initializer_list>
#include <set>

#include "twinaudit/bom/validate.hpp"
#include "twinaudit/errors.hpp"

namespace twinaudit::bom {

using nlohmann::json;

namespace {

std::string_view CdxType(ComponentType type) {
  switch (type) {
    case ComponentType::kLibrary:
      return "library";
    case ComponentType::kApplication:
      return "application";
    case ComponentType::kCryptoAsset:
    case ComponentType::kCertificate:
      return "cryptographic-asset";
    case ComponentType::kFile:
      return "file";
    case ComponentType::kOperatingSystemSetting:
      return "data";
  }
  return "library";
}

std::string_view CdxAssetType(CryptoAssetKind kind) {
  switch (kind) {
    case CryptoAssetKind::kAlgorithm:
      return "algorithm";
    case CryptoAssetKind::kCertificate:
      return "certificate";
    case CryptoAssetKind::kProtocol:
      return "protocol";
    case CryptoAssetKind::kKeyMaterial:
      return "related-crypto-material";
  }
  return "algorithm";
}

json PropertiesToJson(const std::vector<Property>& props) {
  std::vector<Property> sorted = props;
  std::sort(sorted.begin(), sorted.end());
  json out = json::array();
  for (const auto& p : sorted) out.push_back({{"name", p.name}, {"value", p.value}});
  return out;
}

json CryptoToJson(const CryptoProperties& p) {
  json out = json::object();
  out["assetType"] = CdxAssetType(p.asset_kind);
  json alg = json::object();
  if (p.primitive) alg["primitive"] = *p.primitive;
  if (p.algorithm_family) alg["algorithmFamily"] = *p.algorithm_family;
  if (p.parameter_set) alg["parameterSetIdentifier"] = *p.parameter_set;
  if (p.mode) alg["mode"] = *p.mode;
  if (!alg.empty()) out["algorithmProperties"] = std::move(alg);
  if (p.certificate) {
    const auto& c = *p.certificate;
    out["certificateProperties"] = {
        {"subjectName", c.subject},
        {"issuerName", c.issuer},
        {"notValidBefore", c.not_before},
        {"notValidAfter", c.not_after},
        {"signatureAlgorithmRef", c.signature_algorithm_ref},
        {"certificateFormat", "X.509"},
    };
  }
  if (p.protocol) {
    auto refs = p.protocol->cipher_suite_refs;
    std::sort(refs.begin(), refs.end());
    refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
    out["protocolProperties"] = {
        {"type", p.protocol->type},
        {"version", p.protocol->version},
        {"cipherSuites", json::array({{{"name", "configured"}, {"algorithms", refs}}})},
    };
  }
  return out;
}

// Accumulates violations while walking a document; every accessor records a
// violation and returns a neutral value on mismatch so parsing continues.
class Reader {
 public:
  explicit Reader(bool strict) : strict_(strict) {}

  void Violate(const std::string& path, const std::string& message) {
    violations_.push_back(path.empty() ? message : path + ": " + message);
  }

  std::vector<std::string>& violations() { return violations_; }

  bool ExpectObject(const json& v, const std::string& path) {
    if (v.is_object()) return true;
    Violate(path, "expected object");
    return false;
  }

  bool ExpectArray(const json& v, const std::string& path) {
    if (v.is_array()) return true;
    Violate(path, "expected array");
    return false;
  }

  // Unknown keys: violation in strict mode; copied into `sink` when given.
  void CheckKeys(const json& obj, const std::string& path,
                 std::initializer_list<std::string_view> known, json* sink = nullptr) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (auto k : known) {
        if (it.key() == k) {
          ok = true;
          break;
        }
      }
      if (ok) continue;
      if (strict_) {
        Violate(Join(path, it.key()), "unknown field '" + it.key() + "'");
      } else if (sink != nullptr) {
        (*sink)[it.key()] = it.value();
      }
    }
  }

  std::optional<std::string> OptString(const json& obj, std::string_view key,
                                       const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_string()) {
      Violate(Join(path, key), "expected string");
      return std::nullopt;
    }
    return it->get<std::string>();
  }

  std::string ReqString(const json& obj, std::string_view key, const std::string& path) {
    if (!obj.contains(key)) {
      Violate(path, "missing required field " + Join(path, key));
      return {};
    }
    return OptString(obj, key, path).value_or("");
  }

  static std::string Join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }

  static std::string Index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
  }

  bool strict() const { return strict_; }

 private:
  bool strict_;
  std::vector<std::string> violations_;
};

std::vector<Property> ReadProperties(Reader& r, const json& obj, const std::string& path) {
  std::vector<Property> out;
  auto it = obj.find("properties");
  if (it == obj.end()) return out;
  const std::string ppath = Reader::Join(path, "properties");
  if (!r.ExpectArray(*it, ppath)) return out;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto& p = (*it)[i];
    const std::string ip = Reader::Index(ppath, i);
    if (!r.ExpectObject(p, ip)) continue;
    r.CheckKeys(p, ip, {"name", "value"});
    out.push_back({r.ReqString(p, "name", ip), r.OptString(p, "value", ip).value_or("")});
  }
  return out;
}

std::optional<CryptoProperties> ReadCrypto(Reader& r, const json& obj, const std::string& path) {
  if (!r.ExpectObject(obj, path)) return std::nullopt;
  r.CheckKeys(obj, path,
              {"assetType", "algorithmProperties", "certificateProperties", "protocolProperties"});
  CryptoProperties p;
  const std::string asset = r.ReqString(obj, "assetType", path);
  if (asset == "algorithm") {
    p.asset_kind = CryptoAssetKind::kAlgorithm;
  } else if (asset == "certificate") {
    p.asset_kind = CryptoAssetKind::kCertificate;
  } else if (asset == "protocol") {
    p.asset_kind = CryptoAssetKind::kProtocol;
  } else if (asset == "related-crypto-material") {
    p.asset_kind = CryptoAssetKind::kKeyMaterial;
  } else if (!asset.empty()) {
    r.Violate(Reader::Join(path, "assetType"), "unknown assetType '" + asset + "'");
  }
  if (auto it = obj.find("algorithmProperties"); it != obj.end()) {
    const std::string ap = Reader::Join(path, "algorithmProperties");
    if (r.ExpectObject(*it, ap)) {
      r.CheckKeys(*it, ap, {"primitive", "algorithmFamily", "parameterSetIdentifier", "mode"});
      p.primitive = r.OptString(*it, "primitive", ap);
      p.algorithm_family = r.OptString(*it, "algorithmFamily", ap);
      p.parameter_set = r.OptString(*it, "parameterSetIdentifier", ap);
      p.mode = r.OptString(*it, "mode", ap);
    }
  }
  if (auto it = obj.find("certificateProperties"); it != obj.end()) {
    const std::string cp = Reader::Join(path, "certificateProperties");
    if (r.ExpectObject(*it, cp)) {
      r.CheckKeys(*it, cp,
                  {"subjectName", "issuerName", "notValidBefore", "notValidAfter",
                   "signatureAlgorithmRef", "certificateFormat"});
      CertificateFields c;
      c.subject = r.ReqString(*it, "subjectName", cp);
      c.issuer = r.ReqString(*it, "issuerName", cp);
      c.not_before = r.ReqString(*it, "notValidBefore", cp);
      c.not_after = r.ReqString(*it, "notValidAfter", cp);
      c.signature_algorithm_ref = r.OptString(*it, "signatureAlgorithmRef", cp).value_or("");
      if (auto fmt = r.OptString(*it, "certificateFormat", cp); fmt && *fmt != "X.509") {
        r.Violate(Reader::Join(cp, "certificateFormat"), "only X.509 is supported");
      }
      p.certificate = std::move(c);
    }
  }
  if (auto it = obj.find("protocolProperties"); it != obj.end()) {
    const std::string pp = Reader::Join(path, "protocolProperties");
    if (r.ExpectObject(*it, pp)) {
      r.CheckKeys(*it, pp, {"type", "version", "cipherSuites"});
      ProtocolFields f;
      f.type = r.OptString(*it, "type", pp).value_or("tls");
      f.version = r.OptString(*it, "version", pp).value_or("");
      if (auto cs = it->find("cipherSuites"); cs != it->end()) {
        const std::string csp = Reader::Join(pp, "cipherSuites");
        if (r.ExpectArray(*cs, csp)) {
          for (std::size_t i = 0; i < cs->size(); ++i) {
            const auto& suite = (*cs)[i];
            const std::string sp = Reader::Index(csp, i);
            if (!r.ExpectObject(suite, sp)) continue;
            r.CheckKeys(suite, sp, {"name", "algorithms"});
            if (auto al = suite.find("algorithms"); al != suite.end()) {
              if (!r.ExpectArray(*al, Reader::Join(sp, "algorithms"))) continue;
              for (const auto& ref : *al) {
                if (ref.is_string()) {
                  f.cipher_suite_refs.push_back(ref.get<std::string>());
                } else {
                  r.Violate(Reader::Join(sp, "algorithms"), "expected string reference");
                }
              }
            }
          }
        }
      }
      p.protocol = std::move(f);
    }
  }
  return p;
}

Component ReadComponent(Reader& r, const json& obj, const std::string& path) {
  Component c;
  if (!r.ExpectObject(obj, path)) return c;
  r.CheckKeys(obj, path,
              {"bom-ref", "type", "name", "version", "purl", "cryptoProperties", "properties"},
              &c.extensions);
  c.bom_ref = r.ReqString(obj, "bom-ref", path);
  c.name = r.ReqString(obj, "name", path);
  c.version = r.OptString(obj, "version", path).value_or("");
  c.package_url = r.OptString(obj, "purl", path);
  if (auto it = obj.find("cryptoProperties"); it != obj.end()) {
    c.crypto = ReadCrypto(r, *it, Reader::Join(path, "cryptoProperties"));
  }
  const std::string type = r.ReqString(obj, "type", path);
  if (type == "library") {
    c.type = ComponentType::kLibrary;
  } else if (type == "application") {
    c.type = ComponentType::kApplication;
  } else if (type == "cryptographic-asset") {
    c.type = c.crypto && c.crypto->asset_kind == CryptoAssetKind::kCertificate
                 ? ComponentType::kCertificate
                 : ComponentType::kCryptoAsset;
  } else if (type == "file") {
    c.type = ComponentType::kFile;
  } else if (type == "data") {
    c.type = ComponentType::kOperatingSystemSetting;
  } else if (!type.empty()) {
    r.Violate(Reader::Join(path, "type"), "unsupported component type '" + type + "'");
  }
  c.properties = ReadProperties(r, obj, path);
  return c;
}

Dependency ReadDependency(Reader& r, const json& obj, const std::string& path) {
  Dependency d;
  if (!r.ExpectObject(obj, path)) return d;
  r.CheckKeys(obj, path, {"ref", "dependsOn"});
  d.ref = r.ReqString(obj, "ref", path);
  if (auto it = obj.find("dependsOn"); it != obj.end()) {
    if (r.ExpectArray(*it, Reader::Join(path, "dependsOn"))) {
      for (const auto& dep : *it) {
        if (dep.is_string()) {
          d.depends_on.push_back(dep.get<std::string>());
        } else {
          r.Violate(Reader::Join(path, "dependsOn"), "expected string reference");
        }
      }
    }
  }
  return d;
}

VulnerabilityEntry ReadVulnerability(Reader& r, const json& obj, const std::string& path) {
  VulnerabilityEntry v;
  if (!r.ExpectObject(obj, path)) return v;
  r.CheckKeys(obj, path, {"id", "description", "ratings", "affects", "analysis"});
  v.cve_id = r.ReqString(obj, "id", path);
  v.description = r.OptString(obj, "description", path).value_or("");
  auto ratings = obj.find("ratings");
  const std::string rp = Reader::Join(path, "ratings");
  if (ratings == obj.end()) {
    r.Violate(path, "missing required field " + rp);
  } else if (r.ExpectArray(*ratings, rp)) {
    if (ratings->size() != 1) {
      r.Violate(rp, "exactly one CVSSv31 rating expected");
    } else {
      const auto& rating = (*ratings)[0];
      const std::string ip = Reader::Index(rp, 0);
      if (r.ExpectObject(rating, ip)) {
        r.CheckKeys(rating, ip, {"score", "severity", "method", "vector"});
        auto score = rating.find("score");
        if (score == rating.end() || !score->is_number()) {
          r.Violate(Reader::Join(ip, "score"), "expected number");
        } else {
          try {
            v.cvss_score = CvssScore::FromDouble(score->get<double>());
          } catch (const InvalidArgumentError& e) {
            r.Violate(Reader::Join(ip, "score"), e.what());
          }
        }
        const std::string sev = r.ReqString(rating, "severity", ip);
        if (auto s = ParseSeverity(sev)) {
          v.severity = *s;
        } else if (!sev.empty()) {
          r.Violate(Reader::Join(ip, "severity"), "unknown severity '" + sev + "'");
        }
        if (auto m = r.OptString(rating, "method", ip); m && *m != "CVSSv31") {
          r.Violate(Reader::Join(ip, "method"), "only CVSSv31 ratings are supported");
        }
        v.cvss_vector = r.OptString(rating, "vector", ip).value_or("");
      }
    }
  }
  if (auto it = obj.find("affects"); it != obj.end()) {
    const std::string ap = Reader::Join(path, "affects");
    if (r.ExpectArray(*it, ap)) {
      for (std::size_t i = 0; i < it->size(); ++i) {
        const auto& a = (*it)[i];
        const std::string ip = Reader::Index(ap, i);
        if (!r.ExpectObject(a, ip)) continue;
        r.CheckKeys(a, ip, {"ref"});
        v.affects.push_back(r.ReqString(a, "ref", ip));
      }
    }
  }
  if (auto it = obj.find("analysis"); it != obj.end()) {
    const std::string anp = Reader::Join(path, "analysis");
    if (r.ExpectObject(*it, anp)) {
      r.CheckKeys(*it, anp, {"state"});
      const std::string state = r.OptString(*it, "state", anp).value_or("in_triage");
      bool found = false;
      for (auto s : {AnalysisState::kInTriage, AnalysisState::kExploitable,
                     AnalysisState::kNotAffected, AnalysisState::kResolved}) {
        if (ToString(s) == state) {
          v.analysis_state = s;
          found = true;
        }
      }
      if (!found) r.Violate(Reader::Join(anp, "state"), "unknown analysis state '" + state + "'");
    }
  }
  return v;
}

void ReadMetadata(Reader& r, const json& obj, Bom& bom) {
  const std::string path = "metadata";
  if (!r.ExpectObject(obj, path)) return;
  r.CheckKeys(obj, path, {"timestamp", "component", "properties"});
  bom.metadata.timestamp = r.OptString(obj, "timestamp", path);
  if (auto it = obj.find("component"); it != obj.end()) {
    const std::string cp = "metadata.component";
    if (r.ExpectObject(*it, cp)) {
      r.CheckKeys(*it, cp, {"type", "name"});
      bom.metadata.subject = r.OptString(*it, "name", cp).value_or("");
      bom.metadata.subject_type = r.OptString(*it, "type", cp).value_or("device");
    }
  }
  bom.kind = BomKind::kMixed;
  for (auto& p : ReadProperties(r, obj, path)) {
    if (p.name == kKindProperty) {
      if (auto k = ParseBomKind(p.value)) {
        bom.kind = *k;
      } else {
        r.Violate("metadata.properties", "unknown BOM kind '" + p.value + "'");
      }
    } else {
      bom.metadata.properties.push_back(std::move(p));
    }
  }
}

}  // namespace

json ToJson(const Component& c) {
  json out = c.extensions.is_object() ? c.extensions : json::object();
  out["bom-ref"] = c.bom_ref;
  out["type"] = CdxType(c.type);
  out["name"] = c.name;
  if (!c.version.empty()) out["version"] = c.version;
  if (c.package_url) out["purl"] = *c.package_url;
  if (c.crypto) out["cryptoProperties"] = CryptoToJson(*c.crypto);
  if (!c.properties.empty()) out["properties"] = PropertiesToJson(c.properties);
  return out;
}

json ToJson(const Dependency& d) {
  auto deps = d.depends_on;
  std::sort(deps.begin(), deps.end());
  deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
  return {{"ref", d.ref}, {"dependsOn", deps}};
}

json ToJson(const VulnerabilityEntry& v) {
  auto affects = v.affects;
  std::sort(affects.begin(), affects.end());
  affects.erase(std::unique(affects.begin(), affects.end()), affects.end());
  json aff = json::array();
  for (const auto& a : affects) aff.push_back({{"ref", a}});
  json out = {
      {"id", v.cve_id},
      {"ratings", json::array({{{"score", v.cvss_score.value()},
                                {"severity", ToString(v.severity)},
                                {"method", "CVSSv31"},
                                {"vector", v.cvss_vector}}})},
      {"affects", std::move(aff)},
      {"analysis", {{"state", ToString(v.analysis_state)}}},
  };
  if (!v.description.empty()) out["description"] = v.description;
  return out;
}

json ToJson(const Bom& input) {
  const Bom bom = Canonicalize(input);
  json out = bom.extensions.is_object() ? bom.extensions : json::object();
  out["bomFormat"] = kBomFormat;
  out["specVersion"] = kSpecVersion;
  out["serialNumber"] = bom.serial_number;
  out["version"] = bom.version;

  json meta = json::object();
  if (bom.metadata.timestamp) meta["timestamp"] = *bom.metadata.timestamp;
  meta["component"] = {{"type", bom.metadata.subject_type}, {"name", bom.metadata.subject}};
  auto props = bom.metadata.properties;
  props.push_back({std::string(kKindProperty), std::string(ToString(bom.kind))});
  meta["properties"] = PropertiesToJson(props);
  out["metadata"] = std::move(meta);

  json components = json::array();
  for (const auto& c : bom.components) components.push_back(ToJson(c));
  out["components"] = std::move(components);

  json deps = json::array();
  for (const auto& d : bom.dependencies) deps.push_back(ToJson(d));
  out["dependencies"] = std::move(deps);

  json vulns = json::array();
  for (const auto& v : bom.vulnerabilities) vulns.push_back(ToJson(v));
  out["vulnerabilities"] = std::move(vulns);

  json refs = json::array();
  for (const auto& l : bom.links) refs.push_back({{"type", "bom"}, {"url", l.Render()}});
  out["externalReferences"] = std::move(refs);
  return out;
}

std::string SerializeBom(const Bom& bom, const SerializeOptions& options) {
  if (auto violations = ValidateBom(bom); !violations.empty()) {
    throw ValidationError(ToStrings(violations));
  }
  return ToJson(bom).dump(options.indent);
}

Bom FromJson(const json& doc, const ParseOptions& options) {
  Reader r(options.strict);
  Bom bom;
  if (!doc.is_object()) throw ValidationError({"document: expected a JSON object"});
  r.CheckKeys(doc, "",
              {"bomFormat", "specVersion", "serialNumber", "version", "metadata", "components",
               "dependencies", "vulnerabilities", "externalReferences"},
              &bom.extensions);

  if (r.ReqString(doc, "bomFormat", "") != kBomFormat && doc.contains("bomFormat")) {
    r.Violate("bomFormat", "expected \"CycloneDX\"");
  }
  if (r.ReqString(doc, "specVersion", "") != kSpecVersion && doc.contains("specVersion")) {
    r.Violate("specVersion", "expected \"1.6\"");
  }
  bom.serial_number = r.ReqString(doc, "serialNumber", "");
  if (auto it = doc.find("version"); it == doc.end()) {
    r.Violate("", "missing required field version");
  } else if (!it->is_number_unsigned() || it->get<std::uint64_t>() == 0) {
    r.Violate("version", "expected a positive integer");
  } else {
    bom.version = it->get<std::uint64_t>();
  }

  if (auto it = doc.find("metadata"); it != doc.end()) {
    ReadMetadata(r, *it, bom);
  } else {
    bom.kind = BomKind::kMixed;
  }

  auto read_list = [&](std::string_view key, auto&& fn) {
    auto it = doc.find(key);
    if (it == doc.end()) return;
    const std::string path(key);
    if (!r.ExpectArray(*it, path)) return;
    for (std::size_t i = 0; i < it->size(); ++i) fn((*it)[i], Reader::Index(path, i));
  };

  read_list("components", [&](const json& v, const std::string& p) {
    bom.components.push_back(ReadComponent(r, v, p));
  });
  read_list("dependencies", [&](const json& v, const std::string& p) {
    bom.dependencies.push_back(ReadDependency(r, v, p));
  });
  read_list("vulnerabilities", [&](const json& v, const std::string& p) {
    bom.vulnerabilities.push_back(ReadVulnerability(r, v, p));
  });
  read_list("externalReferences", [&](const json& v, const std::string& p) {
    if (!r.ExpectObject(v, p)) return;
    r.CheckKeys(v, p, {"type", "url"});
    const std::string type = r.ReqString(v, "type", p);
    const std::string url = r.ReqString(v, "url", p);
    if (type != "bom") {
      if (r.strict()) r.Violate(Reader::Join(p, "type"), "only BOM-Link references are modeled");
      return;
    }
    if (auto link = BomLink::Parse(url)) {
      bom.links.push_back(std::move(*link));
    } else {
      r.Violate(Reader::Join(p, "url"), "malformed BOM-Link '" + url + "'");
    }
  });

  if (!r.violations().empty()) throw ValidationError(std::move(r.violations()));
  bom = Canonicalize(std::move(bom));
  if (options.validate) {
    if (auto violations = ValidateBom(bom); !violations.empty()) {
      throw ValidationError(ToStrings(violations));
    }
  }
  return bom;
}

Bom ParseBom(std::string_view text, const ParseOptions& options) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  return FromJson(doc, options);
}

Component ComponentFromJson(const json& value, const ParseOptions& options) {
  Reader r(options.strict);
  Component c = ReadComponent(r, value, "component");
  if (!r.violations().empty()) throw ValidationError(std::move(r.violations()));
  std::sort(c.properties.begin(), c.properties.end());
  return c;
}

VulnerabilityEntry VulnerabilityFromJson(const json& value) {
  Reader r(true);
  auto v = ReadVulnerability(r, value, "vulnerability");
  if (!r.violations().empty()) throw ValidationError(std::move(r.violations()));
  std::sort(v.affects.begin(), v.affects.end());
  return v;
}

Dependency DependencyFromJson(const json& value) {
  Reader r(true);
  auto d = ReadDependency(r, value, "dependency");
  if (!r.violations().empty()) throw ValidationError(std::move(r.violations()));
  std::sort(d.depends_on.begin(), d.depends_on.end());
  return d;
}

}  // namespace twinaudit::bom
