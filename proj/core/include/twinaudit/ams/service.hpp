#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twinaudit/ams/run.hpp"
#include "twinaudit/ams/store.hpp"
#include "twinaudit/ams/topology.hpp"
#include "twinaudit/bom/model.hpp"
#include "twinaudit/evidence/collector.hpp"
#include "twinaudit/forge/forge.hpp"
#include "twinaudit/sdt/manager.hpp"
#include "twinaudit/vuln/store.hpp"

namespace twinaudit::ams {

struct AmsOptions {
  // Base collector configuration; enabled categories come from host profiles.
  evidence::CollectorConfig collector = evidence::CollectorConfig::Default();
  // Forwarded as CreateRequest options (e.g. {"tokens": {...}}).
  nlohmann::json sdt_options = nlohmann::json::object();
  bool parallel_collection = true;
};

using TransitionObserver =
    std::function<void(const std::string& run_id, RunState from, RunState to)>;

class AuditManagementService {
 public:
  AuditManagementService(std::shared_ptr<DocumentStore> store,
                         std::shared_ptr<sdt::SdtManagerClient> manager,
                         std::shared_ptr<const vuln::VulnStore> feed, AmsOptions options = {});

  // Upserts hosts by host_id and relationships by (from, kind, to).
  TopologyGraph IngestInventory(const TopologyGraph& topology);
  TopologyGraph IngestInventoryFile(const std::filesystem::path& path);
  TopologyGraph Topology() const;

  // Persists the profile and one HostProfile per selected host.
  AuditProfile CreateProfile(const AuditProfile& profile);
  AuditProfile GetProfile(const std::string& profile_id) const;
  std::vector<AuditProfile> ListProfiles() const;
  std::vector<HostProfile> HostProfiles(const std::string& profile_id) const;

  AuditRun CreateRun(const std::string& profile_id);
  // Drives a CREATED run to SDT_READY, or to FAILED with a cause.
  AuditRun ExecuteRun(const std::string& run_id);
  AuditRun RunAudit(const std::string& profile_id);
  AuditRun GetRun(const std::string& run_id) const;
  std::vector<AuditRun> ListRuns() const;

  // Rescans `changed_hosts`, sends BomDeltas, returns to SDT_READY. An empty
  // change set returns the run untouched without contacting the manager.
  AuditRun UpdateAudit(const std::string& run_id, const std::vector<std::string>& changed_hosts);

  // Operator/test hook: moves a non-failed run to FAILED.
  AuditRun FailRun(const std::string& run_id, const std::string& cause, const std::string& message);

  // Current documents of a run: manifest first, then per-host SBOM and CBOM.
  std::vector<bom::Bom> RunDocuments(const std::string& run_id) const;
  std::optional<bom::Bom> LoadBom(const std::string& serial, std::uint64_t version) const;
  std::vector<evidence::EvidenceRecord> RunEvidence(const std::string& run_id,
                                                    const std::string& host_id) const;
  forge::CountReport Counts(const std::string& run_id) const;

  // Body of the most recent update request sent for the run.
  std::optional<nlohmann::json> LastUpdateRequest(const std::string& run_id) const;
  // Body of the create request for the run; built, not re-sent.
  nlohmann::json CreateRequestBody(const std::string& run_id) const;

  // PERIODIC profiles: runs in SDT_READY whose last sync is at least the
  // interval old get UpdateAudit over all their hosts. Returns updated ids.
  std::vector<std::string> Tick(std::int64_t now_millis);

  void SetTransitionObserver(TransitionObserver observer);

  DocumentStore& store() { return *store_; }
  const std::shared_ptr<const vuln::VulnStore>& feed() const { return feed_; }

 private:
  struct HostScan;
  struct HostBoms {
    bom::Bom sbom;
    bom::Bom cbom;
  };

  std::shared_ptr<std::mutex> RunMutex(const std::string& run_id);
  void Persist(const AuditRun& run);
  void Move(AuditRun& run, RunState next);
  void Fail(AuditRun& run, const std::string& cause, const std::string& message);
  std::vector<HostScan> Collect(const std::vector<HostRecord>& hosts,
                                const std::map<std::string, std::set<evidence::Category>>& categories);
  HostBoms BuildHostBoms(const std::string& host_id,
                         const std::vector<evidence::EvidenceRecord>& records,
                         const forge::BomIdentity& sbom_id, const forge::BomIdentity& cbom_id) const;
  void PutBom(const bom::Bom& b);
  bom::Bom RequireBom(const DocumentRef& ref) const;

  std::shared_ptr<DocumentStore> store_;
  std::shared_ptr<sdt::SdtManagerClient> manager_;
  std::shared_ptr<const vuln::VulnStore> feed_;
  AmsOptions options_;

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> run_mutexes_;
  std::map<std::string, nlohmann::json> last_updates_;
  TransitionObserver observer_;
};

}  // namespace twinaudit::ams
