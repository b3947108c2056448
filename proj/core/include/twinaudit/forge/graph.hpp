#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "twinaudit/bom/model.hpp"
#include "twinaudit/evidence/record.hpp"
#include "twinaudit/evidence/tokens.hpp"

namespace twinaudit::forge {

// 0 primitive, 1 family, 2 parameterization, 3 occurrence.
inline constexpr int kPrimitiveLayer = 0;
inline constexpr int kFamilyLayer = 1;
inline constexpr int kParameterLayer = 2;
inline constexpr int kOccurrenceLayer = 3;

struct NodeId {
  int layer = 0;
  std::string name;  // occurrences: host|token|path

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

enum class NodeClass { kAlgorithm, kProtocol, kLibrary };

struct CryptoNode {
  NodeId id;
  NodeClass node_class = NodeClass::kAlgorithm;
  std::string primitive;
  std::string family;
  std::string parameter_set;
  std::string mode;
  std::string version;  // protocols and libraries; newest seen when merged
  // Occurrences only.
  std::string host;
  std::string token;
  std::string path;

  friend bool operator==(const CryptoNode&, const CryptoNode&) = default;
};

enum class EdgeKind { kRefines, kUsedBy, kDependsOn };

struct Edge {
  EdgeKind kind;
  NodeId from;
  NodeId to;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct QuarantineEntry {
  std::string host;
  std::string name;
  std::string source_path;
  std::string reason;

  friend auto operator<=>(const QuarantineEntry&, const QuarantineEntry&) = default;
};

// Layered graph of cryptographic material. REFINES runs child to parent
// between layers 0..2, USED_BY from a parameterization to each of its
// occurrences (the occurrence's single parent), DEPENDS_ON between
// occurrences. Node identity is (layer, name), so inserting the same
// material twice merges. The final graph does not depend on insertion order.
class CryptoHierarchyGraph {
 public:
  CryptoHierarchyGraph();
  explicit CryptoHierarchyGraph(std::vector<evidence::AlgorithmToken> table);

  // Records of other categories, and records that cannot be classified, are
  // quarantined; the graph is otherwise unchanged.
  void Insert(const evidence::EvidenceRecord& record);

  const std::map<NodeId, CryptoNode>& nodes() const { return nodes_; }
  // REFINES and USED_BY edges, plus DEPENDS_ON edges whose endpoints exist.
  std::set<Edge> edges() const;
  const std::set<QuarantineEntry>& quarantine() const { return quarantine_; }

  const CryptoNode* Find(const NodeId& id) const;
  std::optional<NodeId> Parent(const NodeId& id) const;
  std::vector<NodeId> Layer(int layer) const;
  std::vector<NodeId> OccurrencesForHost(const std::string& host) const;
  // Layer 0..2 nodes on the REFINES path above this host's occurrences.
  std::set<NodeId> AncestorsForHost(const std::string& host) const;
  bool IsAcyclic() const;

  static NodeId OccurrenceId(const std::string& host, const std::string& token,
                             const std::string& path);

  friend bool operator==(const CryptoHierarchyGraph& a, const CryptoHierarchyGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges() == b.edges() && a.quarantine_ == b.quarantine_;
  }

 private:
  struct Chain {
    NodeClass node_class;
    std::string primitive;
    std::string family;
    std::string parameter;  // layer-2 name
    std::string parameter_set;
    std::string mode;
    std::string version;
  };

  NodeId AddChain(const Chain& chain);
  NodeId AddOccurrence(const NodeId& parameter, const std::string& host, const std::string& path,
                       const std::string& version = "");
  std::optional<Chain> AlgorithmChain(const std::string& token,
                                      const evidence::EvidenceRecord* record) const;
  void Quarantine(const evidence::EvidenceRecord& record, std::string reason);

  evidence::TokenMatcher matcher_;
  std::map<NodeId, CryptoNode> nodes_;
  std::set<Edge> structural_;
  std::set<Edge> intents_;  // DEPENDS_ON, materialized when both ends exist
  std::set<QuarantineEntry> quarantine_;
};

}  // namespace twinaudit::forge
