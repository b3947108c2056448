#include "twinaudit/forge/graph.hpp"

#include "twinaudit/vuln/version.hpp"

#include <functional>

namespace twinaudit::forge {

using evidence::Category;
using evidence::EvidenceRecord;
namespace attr = evidence::attr;

CryptoHierarchyGraph::CryptoHierarchyGraph() : matcher_(evidence::DefaultTokenTable()) {}

CryptoHierarchyGraph::CryptoHierarchyGraph(std::vector<evidence::AlgorithmToken> table)
    : matcher_(std::move(table)) {}

NodeId CryptoHierarchyGraph::OccurrenceId(const std::string& host, const std::string& token,
                                          const std::string& path) {
  return {kOccurrenceLayer, host + "|" + token + "|" + path};
}

NodeId CryptoHierarchyGraph::AddChain(const Chain& c) {
  const NodeId l0{kPrimitiveLayer, c.primitive};
  const NodeId l1{kFamilyLayer, c.family};
  const NodeId l2{kParameterLayer, c.parameter};
  auto put = [&](const NodeId& id, bool family, bool params) {
    CryptoNode node;
    node.id = id;
    node.node_class = c.node_class;
    node.primitive = c.primitive;
    if (family) node.family = c.family;
    if (params) {
      node.parameter_set = c.parameter_set;
      node.mode = c.mode;
      node.version = c.version;
    }
    auto [it, inserted] = nodes_.emplace(id, std::move(node));
    // Merged nodes keep the newest version seen.
    if (!inserted && params && vuln::CompareVersions(c.version, it->second.version) > 0) {
      it->second.version = c.version;
    }
  };
  put(l0, false, false);
  put(l1, true, false);
  put(l2, true, true);
  structural_.insert({EdgeKind::kRefines, l1, l0});
  structural_.insert({EdgeKind::kRefines, l2, l1});
  return l2;
}

NodeId CryptoHierarchyGraph::AddOccurrence(const NodeId& parameter, const std::string& host,
                                           const std::string& path, const std::string& version) {
  const NodeId occ = OccurrenceId(host, parameter.name, path);
  const CryptoNode& p = nodes_.at(parameter);
  CryptoNode node = p;
  node.id = occ;
  node.host = host;
  node.token = parameter.name;
  node.path = path;
  node.version = version;
  auto [it, inserted] = nodes_.emplace(occ, std::move(node));
  if (!inserted && vuln::CompareVersions(version, it->second.version) > 0) it->second.version = version;
  structural_.insert({EdgeKind::kUsedBy, parameter, occ});
  return occ;
}

std::optional<CryptoHierarchyGraph::Chain> CryptoHierarchyGraph::AlgorithmChain(
    const std::string& token, const EvidenceRecord* record) const {
  Chain c{NodeClass::kAlgorithm, "", "", token, "", "", ""};
  if (const auto* t = matcher_.Find(token)) {
    c.primitive = t->primitive;
    c.family = t->family;
    c.parameter_set = t->parameter_set;
    c.mode = t->mode;
  }
  if (record) {
    if (auto v = record->attribute(attr::kPrimitive)) c.primitive = *v;
    if (auto v = record->attribute(attr::kFamily)) c.family = *v;
    if (auto v = record->attribute(attr::kParameterSet)) c.parameter_set = *v;
    if (auto v = record->attribute(attr::kMode)) c.mode = *v;
  }
  if (c.primitive.empty() || c.family.empty() || token.empty()) return std::nullopt;
  return c;
}

void CryptoHierarchyGraph::Quarantine(const EvidenceRecord& r, std::string reason) {
  quarantine_.insert({r.host_id, r.name, r.source_path, std::move(reason)});
}

void CryptoHierarchyGraph::Insert(const EvidenceRecord& r) {
  auto paths = r.occurrences;
  if (paths.empty()) paths.push_back(r.source_path);

  switch (r.category) {
    case Category::kAlgorithm: {
      auto chain = AlgorithmChain(r.name, &r);
      if (!chain) return Quarantine(r, "unknown algorithm token");
      const NodeId p = AddChain(*chain);
      for (const auto& path : paths) AddOccurrence(p, r.host_id, path);
      return;
    }
    case Category::kCertificate: {
      if (r.is_warning()) return Quarantine(r, "undecodable certificate");
      bool any = false;
      std::vector<NodeId> occs;
      for (auto key : {attr::kKeyToken, attr::kSignatureDigest}) {
        auto token = r.attribute(key);
        if (!token) continue;
        auto chain = AlgorithmChain(*token, nullptr);
        if (!chain) continue;
        occs.push_back(AddOccurrence(AddChain(*chain), r.host_id, r.source_path));
        any = true;
      }
      if (!any) return Quarantine(r, "certificate key and signature algorithms unrecognized");
      if (occs.size() == 2) intents_.insert({EdgeKind::kDependsOn, occs[0], occs[1]});
      return;
    }
    case Category::kOpensslConfig: {
      const auto kind = r.attribute(attr::kKind).value_or("");
      if (kind == "protocol") {
        const std::string family = r.attribute("protocol").value_or("tls") == "ssl" ? "SSL" : "TLS";
        Chain c{NodeClass::kProtocol, "protocol", family, r.name, "", "", r.version.value_or("")};
        const NodeId p = AddChain(c);
        for (const auto& path : paths) {
          const NodeId occ = AddOccurrence(p, r.host_id, path, c.version);
          for (const auto& rel : r.relationships) {
            intents_.insert({EdgeKind::kDependsOn, occ, OccurrenceId(r.host_id, rel.target_name, path)});
          }
        }
        return;
      }
      if (kind == "cipher_config") {
        bool any = false;
        for (const auto& rel : r.relationships) {
          auto chain = AlgorithmChain(rel.target_name, nullptr);
          if (!chain) continue;
          const NodeId p = AddChain(*chain);
          for (const auto& path : paths) AddOccurrence(p, r.host_id, path);
          any = true;
        }
        if (!any) {
          return Quarantine(r, "no recognizable algorithm in cipher configuration '" +
                                   r.attribute(attr::kValue).value_or("") + "'");
        }
        return;
      }
      return Quarantine(r, "unrecognized configuration record");
    }
    case Category::kCryptoLibrary: {
      const std::string major = r.attribute("major_version").value_or("");
      Chain c{NodeClass::kLibrary, "library", r.name,
              major.empty() ? r.name : r.name + " " + major, "", "", r.version.value_or("")};
      const NodeId p = AddChain(c);
      for (const auto& path : paths) AddOccurrence(p, r.host_id, path, c.version);
      return;
    }
    default:
      return Quarantine(r, "not cryptographic material");
  }
}

std::set<Edge> CryptoHierarchyGraph::edges() const {
  std::set<Edge> out = structural_;
  for (const auto& e : intents_) {
    if (e.from != e.to && nodes_.count(e.from) && nodes_.count(e.to)) out.insert(e);
  }
  return out;
}

const CryptoNode* CryptoHierarchyGraph::Find(const NodeId& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

std::optional<NodeId> CryptoHierarchyGraph::Parent(const NodeId& id) const {
  if (id.layer == kOccurrenceLayer) {
    const CryptoNode* n = Find(id);
    if (!n) return std::nullopt;
    return NodeId{kParameterLayer, n->token};
  }
  auto it = structural_.lower_bound({EdgeKind::kRefines, id, NodeId{-1, ""}});
  if (it != structural_.end() && it->kind == EdgeKind::kRefines && it->from == id) return it->to;
  return std::nullopt;
}

std::vector<NodeId> CryptoHierarchyGraph::Layer(int layer) const {
  std::vector<NodeId> out;
  for (const auto& [id, node] : nodes_) {
    if (id.layer == layer) out.push_back(id);
  }
  return out;
}

std::vector<NodeId> CryptoHierarchyGraph::OccurrencesForHost(const std::string& host) const {
  std::vector<NodeId> out;
  for (const auto& [id, node] : nodes_) {
    if (id.layer == kOccurrenceLayer && node.host == host) out.push_back(id);
  }
  return out;
}

std::set<NodeId> CryptoHierarchyGraph::AncestorsForHost(const std::string& host) const {
  std::set<NodeId> out;
  for (const auto& occ : OccurrencesForHost(host)) {
    for (auto p = Parent(occ); p; p = Parent(*p)) out.insert(*p);
  }
  return out;
}

bool CryptoHierarchyGraph::IsAcyclic() const {
  const auto all = edges();
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const auto& e : all) adj[e.from].push_back(e.to);
  // 0 unvisited, 1 on stack, 2 done
  std::map<NodeId, int> color;
  std::function<bool(const NodeId&)> visit = [&](const NodeId& n) {
    color[n] = 1;
    for (const auto& m : adj[n]) {
      const int c = color[m];
      if (c == 1) return false;
      if (c == 0 && !visit(m)) return false;
    }
    color[n] = 2;
    return true;
  };
  for (const auto& [id, node] : nodes_) {
    if (color[id] == 0 && !visit(id)) return false;
  }
  return true;
}

}  // namespace twinaudit::forge
