#include "twinaudit/ams/service.hpp"

#include <future>
#include <set>

#include "twinaudit/bom/codec.hpp"
#include "twinaudit/bom/diff.hpp"
#include "twinaudit/errors.hpp"
#include "twinaudit/evidence/snapshot.hpp"
#include "twinaudit/forge/graph.hpp"
#include "twinaudit/ids.hpp"

namespace twinaudit::ams {

using nlohmann::json;

struct AuditManagementService::HostScan {
  std::string host_id;
  std::vector<evidence::EvidenceRecord> records;
  std::optional<std::string> error;
};

namespace {

std::string BomKey(const std::string& serial, std::uint64_t version) {
  return serial + "@" + std::to_string(version);
}

std::string EvidenceKey(const std::string& run_id, const std::string& host_id) {
  return run_id + "|" + host_id;
}

std::string HostProfileKey(const std::string& profile_id, const std::string& host_id) {
  return profile_id + "|" + host_id;
}

void SetBackLink(bom::Bom& b, const DocumentRef& manifest) {
  b.links.clear();
  b.links.push_back({manifest.serial_number, manifest.version, std::nullopt});
  b = bom::Canonicalize(std::move(b));
}

}  // namespace

AuditManagementService::AuditManagementService(std::shared_ptr<DocumentStore> store,
                                               std::shared_ptr<sdt::SdtManagerClient> manager,
                                               std::shared_ptr<const vuln::VulnStore> feed,
                                               AmsOptions options)
    : store_(std::move(store)),
      manager_(std::move(manager)),
      feed_(std::move(feed)),
      options_(std::move(options)) {
  if (!store_) throw InvalidArgumentError("AMS needs a document store");
}

TopologyGraph AuditManagementService::IngestInventory(const TopologyGraph& topology) {
  topology.Validate();
  std::lock_guard lock(mu_);
  std::set<std::string> known;
  for (const auto& key : store_->Keys(collection::kHosts)) known.insert(key);
  for (const auto& h : topology.hosts) known.insert(h.host_id);
  for (const auto& r : topology.relationships) {
    if (!known.count(r.from) || !known.count(r.to)) {
      throw InvalidArgumentError("relationship " + r.Key() + " references an unknown host");
    }
  }
  for (const auto& h : topology.hosts) store_->Put(collection::kHosts, h.host_id, h.ToJson());
  for (const auto& r : topology.relationships) {
    store_->Put(collection::kRelationships, r.Key(), r.ToJson());
  }
  TopologyGraph out;
  for (const auto& [k, v] : store_->Query(collection::kHosts)) out.hosts.push_back(HostRecord::FromJson(v));
  for (const auto& [k, v] : store_->Query(collection::kRelationships)) {
    out.relationships.push_back(TopologyRelationship::FromJson(v));
  }
  return out;
}

TopologyGraph AuditManagementService::IngestInventoryFile(const std::filesystem::path& path) {
  return IngestInventory(LoadInventoryFile(path));
}

TopologyGraph AuditManagementService::Topology() const {
  TopologyGraph out;
  for (const auto& [k, v] : store_->Query(collection::kHosts)) out.hosts.push_back(HostRecord::FromJson(v));
  for (const auto& [k, v] : store_->Query(collection::kRelationships)) {
    out.relationships.push_back(TopologyRelationship::FromJson(v));
  }
  return out;
}

AuditProfile AuditManagementService::CreateProfile(const AuditProfile& profile) {
  profile.Validate();
  const TopologyGraph topology = Topology();
  const auto hosts = SelectHosts(topology, profile.host_selector);
  std::lock_guard lock(mu_);
  for (const auto& [key, hp] : store_->Query(collection::kHostProfiles, [&](const json& v) {
         return v.value("profile_id", "") == profile.profile_id;
       })) {
    store_->Erase(collection::kHostProfiles, key);
  }
  store_->Put(collection::kProfiles, profile.profile_id, profile.ToJson());
  for (const auto* h : hosts) {
    HostProfile hp{profile.profile_id, h->host_id, profile.categories};
    store_->Put(collection::kHostProfiles, HostProfileKey(profile.profile_id, h->host_id), hp.ToJson());
  }
  return profile;
}

AuditProfile AuditManagementService::GetProfile(const std::string& profile_id) const {
  auto doc = store_->Get(collection::kProfiles, profile_id);
  if (!doc) throw NotFoundError("unknown profile '" + profile_id + "'");
  return AuditProfile::FromJson(*doc);
}

std::vector<AuditProfile> AuditManagementService::ListProfiles() const {
  std::vector<AuditProfile> out;
  for (const auto& [k, v] : store_->Query(collection::kProfiles)) out.push_back(AuditProfile::FromJson(v));
  return out;
}

std::vector<HostProfile> AuditManagementService::HostProfiles(const std::string& profile_id) const {
  std::vector<HostProfile> out;
  for (const auto& [k, v] : store_->Query(collection::kHostProfiles, [&](const json& d) {
         return d.value("profile_id", "") == profile_id;
       })) {
    out.push_back(HostProfile::FromJson(v));
  }
  return out;
}

std::shared_ptr<std::mutex> AuditManagementService::RunMutex(const std::string& run_id) {
  std::lock_guard lock(mu_);
  auto& m = run_mutexes_[run_id];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

void AuditManagementService::SetTransitionObserver(TransitionObserver observer) {
  std::lock_guard lock(mu_);
  observer_ = std::move(observer);
}

void AuditManagementService::Persist(const AuditRun& run) {
  store_->Put(collection::kRuns, run.run_id, run.ToJson());
}

void AuditManagementService::Move(AuditRun& run, RunState next) {
  const RunState from = run.state;
  run.TransitionTo(next, NowUnixMillis());
  Persist(run);
  TransitionObserver obs;
  {
    std::lock_guard lock(mu_);
    obs = observer_;
  }
  if (obs) obs(run.run_id, from, next);
}

void AuditManagementService::Fail(AuditRun& run, const std::string& cause, const std::string& message) {
  run.error_cause = cause;
  run.error_message = message;
  Move(run, RunState::kFailed);
}

AuditRun AuditManagementService::CreateRun(const std::string& profile_id) {
  GetProfile(profile_id);
  AuditRun run;
  run.run_id = MakeUuid();
  run.profile_id = profile_id;
  run.transitions.push_back({RunState::kCreated, NowUnixMillis()});
  Persist(run);
  return run;
}

AuditRun AuditManagementService::GetRun(const std::string& run_id) const {
  auto doc = store_->Get(collection::kRuns, run_id);
  if (!doc) throw NotFoundError("unknown run '" + run_id + "'");
  return AuditRun::FromJson(*doc);
}

std::vector<AuditRun> AuditManagementService::ListRuns() const {
  std::vector<AuditRun> out;
  for (const auto& [k, v] : store_->Query(collection::kRuns)) out.push_back(AuditRun::FromJson(v));
  std::sort(out.begin(), out.end(), [](const AuditRun& a, const AuditRun& b) {
    return std::pair(a.transitions.front().at_millis, a.run_id) <
           std::pair(b.transitions.front().at_millis, b.run_id);
  });
  return out;
}

std::vector<AuditManagementService::HostScan> AuditManagementService::Collect(
    const std::vector<HostRecord>& hosts,
    const std::map<std::string, std::set<evidence::Category>>& categories) {
  auto scan = [this, &categories](const HostRecord& h) {
    HostScan out;
    out.host_id = h.host_id;
    try {
      if (h.snapshot_ref.empty()) throw evidence::ScanFailed("host has no snapshot_ref");
      auto snapshot = evidence::HostSnapshot::Open(h.snapshot_ref, h.host_id);
      evidence::CollectorConfig config = options_.collector;
      config.enabled_categories = categories.at(h.host_id);
      out.records = evidence::ScanHost(snapshot, config).records;
    } catch (const std::exception& e) {
      out.error = e.what();
      out.records.clear();
    }
    return out;
  };
  std::vector<HostScan> results;
  if (!options_.parallel_collection || hosts.size() < 2) {
    for (const auto& h : hosts) results.push_back(scan(h));
    return results;
  }
  std::vector<std::future<HostScan>> futures;
  for (const auto& h : hosts) futures.push_back(std::async(std::launch::async, scan, std::cref(h)));
  for (auto& f : futures) results.push_back(f.get());
  return results;
}

AuditManagementService::HostBoms AuditManagementService::BuildHostBoms(
    const std::string& host_id, const std::vector<evidence::EvidenceRecord>& records,
    const forge::BomIdentity& sbom_id, const forge::BomIdentity& cbom_id) const {
  forge::CryptoHierarchyGraph graph(options_.collector.algorithm_token_table);
  for (const auto& r : records) graph.Insert(r);
  HostBoms out;
  out.sbom = forge::BuildSbom(host_id, records, sbom_id);
  if (feed_) out.sbom = forge::EnrichWithVulnerabilities(std::move(out.sbom), *feed_);
  out.cbom = forge::BuildCbom(host_id, graph, records, cbom_id);
  return out;
}

void AuditManagementService::PutBom(const bom::Bom& b) {
  store_->Put(collection::kBoms, BomKey(b.serial_number, b.version), bom::ToJson(b));
}

std::optional<bom::Bom> AuditManagementService::LoadBom(const std::string& serial,
                                                        std::uint64_t version) const {
  auto doc = store_->Get(collection::kBoms, BomKey(serial, version));
  if (!doc) return std::nullopt;
  return bom::FromJson(*doc);
}

bom::Bom AuditManagementService::RequireBom(const DocumentRef& ref) const {
  auto b = LoadBom(ref.serial_number, ref.version);
  if (!b) throw NotFoundError("missing stored BOM " + BomKey(ref.serial_number, ref.version));
  return *b;
}

AuditRun AuditManagementService::ExecuteRun(const std::string& run_id) {
  auto run_mu = RunMutex(run_id);
  std::lock_guard run_lock(*run_mu);
  AuditRun run = GetRun(run_id);
  if (run.state != RunState::kCreated) {
    throw ConflictError("run " + run_id + " is " + std::string(ToString(run.state)), "invalid_state");
  }

  std::vector<HostRecord> hosts;
  std::map<std::string, std::set<evidence::Category>> categories;
  try {
    const AuditProfile profile = GetProfile(run.profile_id);
    const TopologyGraph topology = Topology();
    for (const auto* h : SelectHosts(topology, profile.host_selector)) hosts.push_back(*h);
    for (const auto& h : hosts) categories[h.host_id] = profile.categories;
    for (const auto& hp : HostProfiles(profile.profile_id)) {
      if (categories.count(hp.host_id)) categories[hp.host_id] = hp.categories;
    }
  } catch (const Error& e) {
    Fail(run, "selection", e.what());
    return run;
  }
  for (const auto& h : hosts) run.hosts.push_back(h.host_id);
  Move(run, RunState::kCollecting);

  std::vector<HostScan> scans = Collect(hosts, categories);
  std::vector<const HostScan*> usable;
  for (const auto& s : scans) {
    if (s.error) {
      run.host_errors[s.host_id] = *s.error;
    } else {
      usable.push_back(&s);
      json records = json::array();
      for (const auto& r : s.records) records.push_back(evidence::ToJson(r));
      store_->Put(collection::kEvidence, EvidenceKey(run.run_id, s.host_id), records);
    }
  }
  if (usable.empty()) {
    Fail(run, "no_evidence", "no host produced evidence");
    return run;
  }

  std::vector<bom::Bom> host_boms;
  try {
    for (const auto* s : usable) {
      HostBoms hb = BuildHostBoms(s->host_id, s->records, {}, {});
      run.documents[s->host_id] = {{hb.sbom.serial_number, hb.sbom.version},
                                   {hb.cbom.serial_number, hb.cbom.version}};
      host_boms.push_back(std::move(hb.sbom));
      host_boms.push_back(std::move(hb.cbom));
    }
    auto linked = forge::LinkToProfile(std::move(host_boms), run.profile_id);
    for (const auto& b : linked.boms) PutBom(b);
    PutBom(linked.manifest);
    run.manifest = DocumentRef{linked.manifest.serial_number, linked.manifest.version};
  } catch (const Error& e) {
    run.documents.clear();
    Fail(run, "bom_build", e.what());
    return run;
  }
  Move(run, RunState::kBomsBuilt);

  const json body = CreateRequestBody(run_id);
  Move(run, RunState::kSdtRequested);
  if (!manager_) {
    Fail(run, "transport", "no SDT manager configured");
    return run;
  }
  try {
    const json reply = manager_->Create(body);
    run.sdt_id = reply.at("sdtId").get<std::string>();
    run.sdt_version = 1;
  } catch (const TransportError& e) {
    Fail(run, "transport", e.what());
    return run;
  } catch (const std::exception& e) {
    Fail(run, "sdt_create", e.what());
    return run;
  }
  Move(run, RunState::kSdtReady);
  return run;
}

AuditRun AuditManagementService::RunAudit(const std::string& profile_id) {
  return ExecuteRun(CreateRun(profile_id).run_id);
}

json AuditManagementService::CreateRequestBody(const std::string& run_id) const {
  const AuditRun run = GetRun(run_id);
  json boms = json::array();
  for (const auto& b : RunDocuments(run_id)) boms.push_back(bom::ToJson(b));
  return {{"profileId", run.profile_id}, {"boms", boms}, {"options", options_.sdt_options}};
}

std::vector<bom::Bom> AuditManagementService::RunDocuments(const std::string& run_id) const {
  const AuditRun run = GetRun(run_id);
  std::vector<bom::Bom> out;
  if (run.manifest) out.push_back(RequireBom(*run.manifest));
  for (const auto& [host, d] : run.documents) {
    out.push_back(RequireBom(d.sbom));
    out.push_back(RequireBom(d.cbom));
  }
  return out;
}

std::vector<evidence::EvidenceRecord> AuditManagementService::RunEvidence(
    const std::string& run_id, const std::string& host_id) const {
  auto doc = store_->Get(collection::kEvidence, EvidenceKey(run_id, host_id));
  if (!doc) throw NotFoundError("no evidence for host '" + host_id + "' in run " + run_id);
  std::vector<evidence::EvidenceRecord> out;
  for (const auto& r : *doc) out.push_back(evidence::RecordFromJson(r));
  return out;
}

forge::CountReport AuditManagementService::Counts(const std::string& run_id) const {
  return forge::CountArtifacts(RunDocuments(run_id));
}

std::optional<json> AuditManagementService::LastUpdateRequest(const std::string& run_id) const {
  std::lock_guard lock(mu_);
  auto it = last_updates_.find(run_id);
  if (it == last_updates_.end()) return std::nullopt;
  return it->second;
}

AuditRun AuditManagementService::UpdateAudit(const std::string& run_id,
                                             const std::vector<std::string>& changed_hosts) {
  auto run_mu = RunMutex(run_id);
  std::lock_guard run_lock(*run_mu);
  AuditRun run = GetRun(run_id);
  if (changed_hosts.empty()) return run;
  if (run.state != RunState::kSdtReady) {
    throw ConflictError("run " + run_id + " is " + std::string(ToString(run.state)), "invalid_state");
  }
  const std::set<std::string> changed(changed_hosts.begin(), changed_hosts.end());
  for (const auto& h : changed) {
    if (!run.documents.count(h)) {
      throw InvalidArgumentError("host '" + h + "' has no documents in run " + run_id);
    }
  }
  Move(run, RunState::kUpdating);

  std::vector<HostRecord> hosts;
  std::map<std::string, std::set<evidence::Category>> categories;
  try {
    const AuditProfile profile = GetProfile(run.profile_id);
    const TopologyGraph topology = Topology();
    for (const auto& id : changed) {
      const HostRecord* h = topology.FindHost(id);
      if (!h) throw NotFoundError("host '" + id + "' left the topology");
      hosts.push_back(*h);
      categories[id] = profile.categories;
    }
    for (const auto& hp : HostProfiles(profile.profile_id)) {
      if (categories.count(hp.host_id)) categories[hp.host_id] = hp.categories;
    }
  } catch (const Error& e) {
    Fail(run, "selection", e.what());
    return run;
  }

  auto scans = Collect(hosts, categories);
  for (const auto& s : scans) {
    if (s.error) {
      run.host_errors[s.host_id] = *s.error;
      Fail(run, "collection", "rescan of '" + s.host_id + "' failed: " + *s.error);
      return run;
    }
  }

  std::vector<bom::Bom> new_boms;
  std::vector<bom::Bom> current;
  json deltas = json::array();
  std::map<std::string, HostDocuments> next_docs = run.documents;
  DocumentRef next_manifest;
  try {
    const bom::Bom old_manifest = RequireBom(*run.manifest);
    next_manifest = {old_manifest.serial_number, old_manifest.version + 1};
    for (const auto& s : scans) {
      const HostDocuments& old = run.documents.at(s.host_id);
      HostBoms hb = BuildHostBoms(s.host_id, s.records, {old.sbom.serial_number, old.sbom.version + 1},
                                  {old.cbom.serial_number, old.cbom.version + 1});
      SetBackLink(hb.sbom, next_manifest);
      SetBackLink(hb.cbom, next_manifest);
      deltas.push_back(bom::ToJson(bom::DiffBoms(RequireBom(old.sbom), hb.sbom)));
      deltas.push_back(bom::ToJson(bom::DiffBoms(RequireBom(old.cbom), hb.cbom)));
      next_docs[s.host_id] = {{hb.sbom.serial_number, hb.sbom.version},
                              {hb.cbom.serial_number, hb.cbom.version}};
      new_boms.push_back(std::move(hb.sbom));
      new_boms.push_back(std::move(hb.cbom));
    }
    for (const auto& [host, d] : next_docs) {
      if (changed.count(host)) continue;
      current.push_back(RequireBom(d.sbom));
      current.push_back(RequireBom(d.cbom));
    }
    for (const auto& b : new_boms) current.push_back(b);
    bom::Bom manifest = forge::RelinkManifest(old_manifest, current, next_manifest.version);
    deltas.push_back(bom::ToJson(bom::DiffBoms(old_manifest, manifest)));
    new_boms.push_back(std::move(manifest));
  } catch (const Error& e) {
    Fail(run, "bom_build", e.what());
    return run;
  }

  const json body = {{"expectedVersion", run.sdt_version}, {"delta", deltas}};
  {
    std::lock_guard lock(mu_);
    last_updates_[run_id] = body;
  }
  if (!manager_ || !run.sdt_id) {
    Fail(run, "transport", "no SDT manager configured");
    return run;
  }
  try {
    const json reply = manager_->Update(*run.sdt_id, body);
    run.sdt_version = reply.at("representationVersion").get<std::uint64_t>();
  } catch (const TransportError& e) {
    Fail(run, "transport", e.what());
    return run;
  } catch (const std::exception& e) {
    Fail(run, "update_rejected", e.what());
    return run;
  }
  for (const auto& b : new_boms) PutBom(b);
  for (const auto& s : scans) {
    json records = json::array();
    for (const auto& r : s.records) records.push_back(evidence::ToJson(r));
    store_->Put(collection::kEvidence, EvidenceKey(run.run_id, s.host_id), records);
  }
  run.documents = std::move(next_docs);
  run.manifest = next_manifest;
  Move(run, RunState::kSdtReady);
  return run;
}

AuditRun AuditManagementService::FailRun(const std::string& run_id, const std::string& cause,
                                         const std::string& message) {
  auto run_mu = RunMutex(run_id);
  std::lock_guard run_lock(*run_mu);
  AuditRun run = GetRun(run_id);
  if (run.state == RunState::kFailed) {
    throw ConflictError("run " + run_id + " already failed", "invalid_transition");
  }
  Fail(run, cause, message);
  return run;
}

std::vector<std::string> AuditManagementService::Tick(std::int64_t now_millis) {
  std::vector<std::string> updated;
  for (const auto& run : ListRuns()) {
    if (run.state != RunState::kSdtReady) continue;
    AuditProfile profile;
    try {
      profile = GetProfile(run.profile_id);
    } catch (const NotFoundError&) {
      continue;
    }
    if (profile.sync_policy.kind != SyncKind::kPeriodic) continue;
    const std::int64_t last = run.transitions.back().at_millis;
    if (now_millis - last < profile.sync_policy.interval_seconds * 1000) continue;
    std::vector<std::string> hosts;
    for (const auto& [h, d] : run.documents) hosts.push_back(h);
    UpdateAudit(run.run_id, hosts);
    updated.push_back(run.run_id);
  }
  return updated;
}

}  // namespace twinaudit::ams
