#include "twinaudit/bom/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "twinaudit/errors.hpp"
#include "twinaudit/ids.hpp"

namespace twinaudit::bom {

std::string_view ToString(BomKind kind) {
  switch (kind) {
    case BomKind::kSbom:
      return "SBOM";
    case BomKind::kCbom:
      return "CBOM";
    case BomKind::kVex:
      return "VEX";
    case BomKind::kMixed:
      return "MIXED";
  }
  return "MIXED";
}

std::string_view ToString(ComponentType type) {
  switch (type) {
    case ComponentType::kLibrary:
      return "LIBRARY";
    case ComponentType::kApplication:
      return "APPLICATION";
    case ComponentType::kCryptoAsset:
      return "CRYPTO_ASSET";
    case ComponentType::kCertificate:
      return "CERTIFICATE";
    case ComponentType::kFile:
      return "FILE";
    case ComponentType::kOperatingSystemSetting:
      return "OPERATING_SYSTEM_SETTING";
  }
  return "LIBRARY";
}

std::string_view ToString(CryptoAssetKind kind) {
  switch (kind) {
    case CryptoAssetKind::kAlgorithm:
      return "ALGORITHM";
    case CryptoAssetKind::kCertificate:
      return "CERTIFICATE";
    case CryptoAssetKind::kProtocol:
      return "PROTOCOL";
    case CryptoAssetKind::kKeyMaterial:
      return "KEY_MATERIAL";
  }
  return "ALGORITHM";
}

std::string_view ToString(Severity severity) {
  switch (severity) {
    case Severity::kNone:
      return "none";
    case Severity::kLow:
      return "low";
    case Severity::kMedium:
      return "medium";
    case Severity::kHigh:
      return "high";
    case Severity::kCritical:
      return "critical";
  }
  return "none";
}

std::string_view ToString(AnalysisState state) {
  switch (state) {
    case AnalysisState::kInTriage:
      return "in_triage";
    case AnalysisState::kExploitable:
      return "exploitable";
    case AnalysisState::kNotAffected:
      return "not_affected";
    case AnalysisState::kResolved:
      return "resolved";
  }
  return "in_triage";
}

std::optional<BomKind> ParseBomKind(std::string_view text) {
  for (auto k : {BomKind::kSbom, BomKind::kCbom, BomKind::kVex, BomKind::kMixed}) {
    if (ToString(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<Severity> ParseSeverity(std::string_view text) {
  for (auto s : {Severity::kNone, Severity::kLow, Severity::kMedium, Severity::kHigh,
                 Severity::kCritical}) {
    if (ToString(s) == text) return s;
  }
  return std::nullopt;
}

CvssScore CvssScore::FromDouble(double value) {
  if (!std::isfinite(value) || value < 0.0 || value > 10.0) {
    throw InvalidArgumentError("CVSS score out of range [0, 10]: " + std::to_string(value));
  }
  return CvssScore(static_cast<int>(std::lround(value * 10.0)));
}

CvssScore CvssScore::FromTenths(int tenths) {
  if (tenths < 0 || tenths > 100) {
    throw InvalidArgumentError("CVSS score out of range [0, 10]");
  }
  return CvssScore(tenths);
}

std::string CvssScore::ToString() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%d.%d", tenths_ / 10, tenths_ % 10);
  return buf;
}

namespace {

std::optional<std::string> FindProperty(const std::vector<Property>& props,
                                        std::string_view name) {
  for (const auto& p : props) {
    if (p.name == name) return p.value;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> Component::property(std::string_view name) const {
  return FindProperty(properties, name);
}

std::optional<std::string> BomMetadata::property(std::string_view name) const {
  return FindProperty(properties, name);
}

const Component* Bom::FindComponent(std::string_view bom_ref) const {
  for (const auto& c : components) {
    if (c.bom_ref == bom_ref) return &c;
  }
  return nullptr;
}

std::string BomLink::Render() const {
  std::string uuid = target_serial;
  constexpr std::string_view kUrn = "urn:uuid:";
  if (uuid.rfind(kUrn, 0) == 0) uuid = uuid.substr(kUrn.size());
  std::string out = "urn:cdx:" + uuid + "/" + std::to_string(target_version);
  if (target_bom_ref) out += "#" + *target_bom_ref;
  return out;
}

std::optional<BomLink> BomLink::Parse(std::string_view text) {
  constexpr std::string_view kPrefix = "urn:cdx:";
  if (text.substr(0, kPrefix.size()) != kPrefix) return std::nullopt;
  text.remove_prefix(kPrefix.size());
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  const std::string_view uuid = text.substr(0, slash);
  if (!IsUuid(uuid)) return std::nullopt;
  std::string_view rest = text.substr(slash + 1);
  std::optional<std::string> fragment;
  if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
    fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
    if (fragment->empty()) return std::nullopt;
  }
  if (rest.empty() || rest.front() == '0') return std::nullopt;
  std::uint64_t version = 0;
  const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), version);
  if (ec != std::errc() || ptr != rest.data() + rest.size() || version == 0) {
    return std::nullopt;
  }
  return BomLink{"urn:uuid:" + std::string(uuid), version, std::move(fragment)};
}

bool IsCveId(std::string_view text) {
  // CVE-\d{4}-\d{4,}
  if (text.size() < 13 || text.substr(0, 4) != "CVE-" || text[8] != '-') return false;
  auto digits = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  return digits(text.substr(4, 4)) && digits(text.substr(9)) && text.size() - 9 >= 4;
}

Bom Canonicalize(Bom bom) {
  for (auto& c : bom.components) {
    std::sort(c.properties.begin(), c.properties.end());
    if (c.crypto && c.crypto->protocol) {
      auto& refs = c.crypto->protocol->cipher_suite_refs;
      std::sort(refs.begin(), refs.end());
      refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
    }
  }
  std::sort(bom.components.begin(), bom.components.end(),
            [](const Component& a, const Component& b) { return a.bom_ref < b.bom_ref; });
  for (auto& d : bom.dependencies) {
    std::sort(d.depends_on.begin(), d.depends_on.end());
    d.depends_on.erase(std::unique(d.depends_on.begin(), d.depends_on.end()), d.depends_on.end());
  }
  std::sort(bom.dependencies.begin(), bom.dependencies.end(),
            [](const Dependency& a, const Dependency& b) { return a.ref < b.ref; });
  for (auto& v : bom.vulnerabilities) {
    std::sort(v.affects.begin(), v.affects.end());
    v.affects.erase(std::unique(v.affects.begin(), v.affects.end()), v.affects.end());
  }
  std::sort(bom.vulnerabilities.begin(), bom.vulnerabilities.end(),
            [](const VulnerabilityEntry& a, const VulnerabilityEntry& b) {
              return a.cve_id < b.cve_id;
            });
  std::sort(bom.links.begin(), bom.links.end(),
            [](const BomLink& a, const BomLink& b) { return a.Render() < b.Render(); });
  std::sort(bom.metadata.properties.begin(), bom.metadata.properties.end());
  return bom;
}

}  // namespace twinaudit::bom

namespace twinaudit::bom {

Severity SeverityForScore(CvssScore score) {
  const int t = score.tenths();
  if (t == 0) return Severity::kNone;
  if (t < 40) return Severity::kLow;
  if (t < 70) return Severity::kMedium;
  if (t < 90) return Severity::kHigh;
  return Severity::kCritical;
}

bool IsIsoTimestamp(std::string_view text) {
  constexpr std::string_view kShape = "dddd-dd-ddTdd:dd:ddZ";
  if (text.size() != kShape.size()) return false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (kShape[i] == 'd') {
      if (text[i] < '0' || text[i] > '9') return false;
    } else if (text[i] != kShape[i]) {
      return false;
    }
  }
  auto num = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (text[i] - '0');
    return v;
  };
  const int month = num(5, 2), day = num(8, 2);
  return month >= 1 && month <= 12 && day >= 1 && day <= 31 && num(11, 2) <= 23 &&
         num(14, 2) <= 59 && num(17, 2) <= 60;
}

}  // namespace twinaudit::bom
