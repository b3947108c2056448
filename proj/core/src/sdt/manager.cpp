#include "twinaudit/sdt/manager.hpp"

#include <algorithm>

#include "twinaudit/bom/codec.hpp"
#include "twinaudit/ids.hpp"

namespace twinaudit::sdt {

using nlohmann::json;

std::string_view ToString(SdtState state) {
  switch (state) {
    case SdtState::kDeploying:
      return "DEPLOYING";
    case SdtState::kReady:
      return "READY";
    case SdtState::kUpdating:
      return "UPDATING";
    case SdtState::kDestroyed:
      return "DESTROYED";
    case SdtState::kError:
      return "ERROR";
  }
  return "ERROR";
}

std::optional<SdtState> ParseSdtState(std::string_view text) {
  for (auto s : {SdtState::kDeploying, SdtState::kReady, SdtState::kUpdating,
                 SdtState::kDestroyed, SdtState::kError}) {
    if (ToString(s) == text) return s;
  }
  return std::nullopt;
}

json SdtDescriptor::ToJson() const {
  json out = {{"sdtId", sdt_id},
              {"state", ToString(state)},
              {"endpoint", endpoint},
              {"profileId", profile_id},
              {"createdAt", created_at},
              {"updatedAt", updated_at},
              {"representationVersion", representation_version}};
  if (error_cause) out["error"] = {{"cause", *error_cause}, {"message", error_message}};
  return out;
}

SdtDescriptor SdtDescriptor::FromJson(const json& v) {
  SdtDescriptor d;
  d.sdt_id = v.at("sdtId").get<std::string>();
  auto state = ParseSdtState(v.at("state").get<std::string>());
  if (!state) throw InvalidArgumentError("unknown SDT state " + v.at("state").dump());
  d.state = *state;
  d.endpoint = v.value("endpoint", "");
  d.profile_id = v.value("profileId", "");
  d.created_at = v.value("createdAt", "");
  d.updated_at = v.value("updatedAt", "");
  d.representation_version = v.value("representationVersion", std::uint64_t{0});
  if (v.contains("error")) {
    d.error_cause = v.at("error").at("cause").get<std::string>();
    d.error_message = v.at("error").value("message", "");
  }
  return d;
}

namespace {

bom::Bom BomFromValue(const json& v) {
  if (v.is_string()) return bom::ParseBom(v.get<std::string>());
  if (v.is_object()) return bom::FromJson(v);
  throw InvalidArgumentError("each BOM must be a JSON object or a serialized document");
}

}  // namespace

CreateRequest CreateRequest::FromJson(const json& body) {
  if (!body.is_object()) throw InvalidArgumentError("create request must be a JSON object");
  CreateRequest r;
  if (!body.contains("profileId") || !body["profileId"].is_string()) {
    throw InvalidArgumentError("profileId is required");
  }
  r.profile_id = body["profileId"].get<std::string>();
  if (!body.contains("boms") || !body["boms"].is_array() || body["boms"].empty()) {
    throw InvalidArgumentError("boms must be a non-empty list");
  }
  for (const auto& b : body["boms"]) r.boms.push_back(BomFromValue(b));
  r.options = body.value("options", json::object());
  if (!r.options.is_object()) throw InvalidArgumentError("options must be an object");
  return r;
}

json CreateRequest::ToJson() const {
  json boms_json = json::array();
  for (const auto& b : boms) boms_json.push_back(bom::ToJson(b));
  return {{"profileId", profile_id}, {"boms", boms_json}, {"options", options}};
}

UpdateRequest UpdateRequest::FromJson(const json& body) {
  if (!body.is_object()) throw InvalidArgumentError("update request must be a JSON object");
  UpdateRequest r;
  if (!body.contains("expectedVersion") || !body["expectedVersion"].is_number_unsigned()) {
    throw InvalidArgumentError("expectedVersion is required");
  }
  r.expected_version = body["expectedVersion"].get<std::uint64_t>();
  if (body.contains("delta") && body.contains("boms")) {
    throw InvalidArgumentError("delta and boms are mutually exclusive");
  }
  if (body.contains("delta")) {
    if (!body["delta"].is_array()) throw InvalidArgumentError("delta must be a list");
    for (const auto& d : body["delta"]) r.deltas.push_back(bom::DeltaFromJson(d));
  }
  if (body.contains("boms")) {
    if (!body["boms"].is_array()) throw InvalidArgumentError("boms must be a list");
    for (const auto& b : body["boms"]) r.boms.push_back(BomFromValue(b));
  }
  return r;
}

json UpdateRequest::ToJson() const {
  if (!boms.empty() && !deltas.empty()) {
    throw InvalidArgumentError("delta and boms are mutually exclusive");
  }
  json out = {{"expectedVersion", expected_version}};
  if (!boms.empty()) {
    json arr = json::array();
    for (const auto& b : boms) arr.push_back(bom::ToJson(b));
    out["boms"] = std::move(arr);
  } else {
    json arr = json::array();
    for (const auto& d : deltas) arr.push_back(bom::ToJson(d));
    out["delta"] = std::move(arr);
  }
  return out;
}

void RecordingTracer::OnStage(std::string_view operation, std::string_view stage) {
  std::lock_guard lock(mu_);
  log_.emplace_back(operation, stage);
  if (fail_times_ > 0 && operation == fail_operation_ && stage == fail_stage_) {
    --fail_times_;
    throw InjectedFailure(std::string(stage));
  }
}

std::vector<std::string> RecordingTracer::Stages(std::string_view operation) const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [op, st] : log_) {
    if (op == operation) out.push_back(st);
  }
  return out;
}

void RecordingTracer::Clear() {
  std::lock_guard lock(mu_);
  log_.clear();
}

void RecordingTracer::FailAt(std::string operation, std::string stage, int times) {
  std::lock_guard lock(mu_);
  fail_operation_ = std::move(operation);
  fail_stage_ = std::move(stage);
  fail_times_ = times;
}

InProcessRuntime::~InProcessRuntime() {
  std::lock_guard lock(mu_);
  for (auto& [ep, server] : instances_) server->Stop();
}

std::string InProcessRuntime::Deploy(const InstanceConfig& config) {
  {
    std::lock_guard lock(mu_);
    if (fail_next_deploy_) {
      fail_next_deploy_ = false;
      throw Error("deploy_failed", "runtime refused to deploy " + config.sdt_id);
    }
  }
  auto controller = std::make_shared<SdtController>(config.sdt_id, config.policy);
  auto server = std::make_unique<SdtInstanceServer>(controller);
  server->Start();
  const std::string endpoint = server->endpoint();
  std::lock_guard lock(mu_);
  instances_[endpoint] = std::move(server);
  return endpoint;
}

void InProcessRuntime::Destroy(const std::string& endpoint) {
  std::unique_ptr<SdtInstanceServer> server;
  {
    std::lock_guard lock(mu_);
    auto it = instances_.find(endpoint);
    if (it == instances_.end()) return;
    server = std::move(it->second);
    instances_.erase(it);
  }
  server->Stop();
}

bool InProcessRuntime::Probe(const std::string& endpoint) {
  std::lock_guard lock(mu_);
  auto it = instances_.find(endpoint);
  return it != instances_.end() && it->second->running();
}

std::shared_ptr<SdtController> InProcessRuntime::ControllerFor(const std::string& endpoint) {
  std::lock_guard lock(mu_);
  auto it = instances_.find(endpoint);
  return it == instances_.end() ? nullptr : it->second->controller();
}

std::size_t InProcessRuntime::LiveCount() const {
  std::lock_guard lock(mu_);
  return std::count_if(instances_.begin(), instances_.end(),
                       [](const auto& kv) { return kv.second->running(); });
}

void InProcessRuntime::Crash(const std::string& endpoint) {
  std::lock_guard lock(mu_);
  auto it = instances_.find(endpoint);
  if (it != instances_.end()) it->second->Stop();
}

struct SdtManager::Entry {
  std::mutex mu;
  SdtDescriptor descriptor;
  std::uint64_t sequence = 0;
  std::vector<bom::Bom> boms;
  RuntimeAdapter* runtime = nullptr;
  std::string token;
};

namespace {

ApiResponse ErrorResponse(int status, const std::string& code, const std::string& message) {
  return {status, {{"code", code}, {"message", message}}};
}

ApiResponse FromException(std::exception_ptr ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const ValidationError& e) {
    auto r = ErrorResponse(400, e.code(), e.what());
    r.body["violations"] = e.violations();
    return r;
  } catch (const ParseError& e) {
    return ErrorResponse(400, e.code(), e.what());
  } catch (const InvalidArgumentError& e) {
    return ErrorResponse(400, e.code(), e.what());
  } catch (const NotFoundError& e) {
    return ErrorResponse(404, e.code(), e.what());
  } catch (const ConflictError& e) {
    return ErrorResponse(409, e.code(), e.what());
  } catch (const DeniedError& e) {
    return ErrorResponse(403, e.code(), e.what());
  } catch (const Error& e) {
    return ErrorResponse(500, e.code(), e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(500, "internal", e.what());
  }
}

json ParseBody(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw InvalidArgumentError(std::string("malformed JSON body: ") + e.what(), "malformed_json");
  }
}

ApiResponse NotFound(const std::string& sdt_id) {
  return ErrorResponse(404, "not_found", "unknown SDT '" + sdt_id + "'");
}

}  // namespace

SdtManager::SdtManager() : SdtManager({std::make_shared<InProcessRuntime>()}) {}

SdtManager::SdtManager(std::vector<std::shared_ptr<RuntimeAdapter>> runtimes,
                       std::unique_ptr<PlacementStrategy> placement)
    : runtimes_(std::move(runtimes)), placement_(std::move(placement)) {
  if (runtimes_.empty()) throw InvalidArgumentError("SdtManager needs at least one runtime");
  if (!placement_) placement_ = std::make_unique<SingleTargetPlacement>();
}

SdtManager::~SdtManager() {
  for (auto& [id, entry] : entries_) {
    std::lock_guard lock(entry->mu);
    if (entry->runtime && !entry->descriptor.endpoint.empty()) {
      entry->runtime->Destroy(entry->descriptor.endpoint);
    }
  }
}

void SdtManager::SetTracer(std::shared_ptr<Tracer> tracer) { tracer_ = std::move(tracer); }

void SdtManager::Trace(std::string_view operation, std::string_view stage) {
  if (tracer_) tracer_->OnStage(operation, stage);
}

std::string SdtManager::AllocateId() {
  std::unique_lock lock(registry_mu_);
  for (;;) {
    std::string id = RandomHex(16);
    if (issued_ids_.insert(id).second) return id;
  }
}

std::shared_ptr<SdtManager::Entry> SdtManager::Find(const std::string& sdt_id) const {
  std::shared_lock lock(registry_mu_);
  auto it = entries_.find(sdt_id);
  return it == entries_.end() ? nullptr : it->second;
}

ApiResponse SdtManager::HandleCreate(const std::string& body) {
  constexpr std::string_view op = "create";
  CreateRequest request;
  std::shared_ptr<AccessPolicy> policy;
  try {
    Trace(op, stage::kInterface);
    request = CreateRequest::FromJson(ParseBody(body));
    policy = std::make_shared<AccessPolicy>(
        AccessPolicy::ParseTokens(request.options.value("tokens", json::object())));
  } catch (...) {
    return FromException(std::current_exception());
  }

  std::shared_ptr<Entry> entry;
  std::unique_lock<std::mutex> lock;
  RuntimeAdapter* runtime = nullptr;
  std::string endpoint;
  std::string phase = "internal";
  try {
    Trace(op, stage::kCore);
    entry = std::make_shared<Entry>();
    lock = std::unique_lock(entry->mu);
    const std::string id = AllocateId();
    const std::string now = NowIso8601();
    entry->descriptor.sdt_id = id;
    entry->descriptor.profile_id = request.profile_id;
    entry->descriptor.created_at = now;
    entry->descriptor.updated_at = now;
    {
      std::unique_lock reg(registry_mu_);
      entry->sequence = next_sequence_++;
      entries_[id] = entry;
    }

    phase = "deploy";
    Trace(op, stage::kLcm);
    runtime = runtimes_.at(placement_->Select(request, runtimes_.size())).get();
    entry->runtime = runtime;
    entry->token = RandomHex(16);
    policy->Grant(entry->token, {Scope::kRead, Scope::kWriteRepresentation, Scope::kAdmin});
    endpoint = runtime->Deploy({id, policy});
    entry->descriptor.endpoint = endpoint;
    Trace(op, stage::kDeploy);

    phase = "representation";
    Trace(op, stage::kCore);
    Trace(op, stage::kDataAdapter);
    auto controller = runtime->ControllerFor(endpoint);
    if (!controller) throw Error("unreachable", "deployed instance has no controller");
    entry->boms = request.boms;
    Trace(op, stage::kController);
    controller->Build(entry->token, entry->boms);

    phase = "internal";
    Trace(op, stage::kConfirm);
    entry->descriptor.state = SdtState::kReady;
    entry->descriptor.representation_version = 1;
    entry->descriptor.updated_at = NowIso8601();
    Trace(op, stage::kRespond);
    return {201,
            {{"sdtId", id}, {"state", ToString(SdtState::kReady)}, {"endpoint", endpoint}}};
  } catch (...) {
    auto ep = std::current_exception();
    if (runtime && !endpoint.empty()) runtime->Destroy(endpoint);
    if (!entry) return FromException(ep);
    if (!lock.owns_lock()) lock = std::unique_lock(entry->mu);
    std::string message = "create failed";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    }
    auto& d = entry->descriptor;
    d.state = SdtState::kError;
    d.error_cause = phase;
    d.error_message = message;
    d.endpoint.clear();
    d.representation_version = 0;
    d.updated_at = NowIso8601();
    entry->boms.clear();
    auto r = ErrorResponse(500, phase + "_failed", message);
    r.body["sdtId"] = d.sdt_id;
    if (phase == "representation") {
      // Bad input content: surface the client-side classification.
      auto mapped = FromException(ep);
      if (mapped.status == 400) r.status = 422;
    }
    return r;
  }
}

ApiResponse SdtManager::HandleUpdate(const std::string& sdt_id, const std::string& body) {
  constexpr std::string_view op = "update";
  UpdateRequest request;
  try {
    Trace(op, stage::kInterface);
    request = UpdateRequest::FromJson(ParseBody(body));
  } catch (...) {
    return FromException(std::current_exception());
  }
  auto entry = Find(sdt_id);
  if (!entry) return NotFound(sdt_id);
  std::lock_guard lock(entry->mu);
  auto& d = entry->descriptor;
  try {
    Trace(op, stage::kCore);
  } catch (...) {
    return FromException(std::current_exception());
  }
  if (d.state != SdtState::kReady) {
    return ErrorResponse(409, "invalid_state",
                         "SDT '" + sdt_id + "' is " + std::string(ToString(d.state)));
  }
  if (request.expected_version != d.representation_version) {
    return ErrorResponse(409, "conflict",
                         "expected version " + std::to_string(request.expected_version) +
                             ", SDT is at " + std::to_string(d.representation_version));
  }
  if (!entry->runtime->Probe(d.endpoint)) {
    d.state = SdtState::kError;
    d.error_cause = "unreachable";
    d.error_message = "instance failed its health probe";
    d.updated_at = NowIso8601();
    return ErrorResponse(503, "unreachable", d.error_message);
  }
  d.state = SdtState::kUpdating;
  try {
    Trace(op, stage::kDataAdapter);
    std::vector<bom::Bom> next = entry->boms;
    auto slot = [&](const std::string& serial) -> bom::Bom& {
      for (auto& b : next) {
        if (b.serial_number == serial) return b;
      }
      throw InvalidArgumentError("update references unknown document " + serial, "unknown_thing");
    };
    for (const auto& delta : request.deltas) {
      auto& b = slot(delta.serial_number);
      b = bom::ApplyDelta(b, delta);
    }
    for (const auto& replacement : request.boms) slot(replacement.serial_number) = replacement;
    auto states = DeriveThings(next);
    auto controller = entry->runtime->ControllerFor(d.endpoint);
    if (!controller) throw Error("unreachable", "instance controller is gone");
    Trace(op, stage::kController);
    controller->ApplyUpdate(entry->token, states, d.representation_version + 1);
    entry->boms = std::move(next);
    d.representation_version += 1;
    d.state = SdtState::kReady;
    d.updated_at = NowIso8601();
    Trace(op, stage::kRespond);
    return {200, {{"sdtId", sdt_id}, {"representationVersion", d.representation_version}}};
  } catch (...) {
    if (d.state == SdtState::kUpdating) d.state = SdtState::kReady;
    return FromException(std::current_exception());
  }
}

ApiResponse SdtManager::HandleDestroy(const std::string& sdt_id) {
  constexpr std::string_view op = "destroy";
  try {
    Trace(op, stage::kInterface);
  } catch (...) {
    return FromException(std::current_exception());
  }
  auto entry = Find(sdt_id);
  if (!entry) return NotFound(sdt_id);
  std::lock_guard lock(entry->mu);
  auto& d = entry->descriptor;
  if (d.state == SdtState::kDestroyed) return {204, nullptr};
  try {
    Trace(op, stage::kCore);
    Trace(op, stage::kLcm);
  } catch (...) {
    return FromException(std::current_exception());
  }
  if (entry->runtime && !d.endpoint.empty()) entry->runtime->Destroy(d.endpoint);
  d.state = SdtState::kDestroyed;
  d.updated_at = NowIso8601();
  entry->boms.clear();
  return {204, nullptr};
}

ApiResponse SdtManager::HandleGet(const std::string& sdt_id) {
  auto d = Descriptor(sdt_id);
  if (!d) return NotFound(sdt_id);
  return {200, d->ToJson()};
}

ApiResponse SdtManager::HandleList() {
  json out = json::array();
  for (const auto& d : Descriptors()) out.push_back(d.ToJson());
  return {200, out};
}

ApiResponse SdtManager::HandleFootprint(const std::string& sdt_id) {
  auto entry = Find(sdt_id);
  if (!entry) return NotFound(sdt_id);
  std::lock_guard lock(entry->mu);
  const auto& d = entry->descriptor;
  if (d.state != SdtState::kReady) {
    return ErrorResponse(409, "invalid_state",
                         "SDT '" + sdt_id + "' is " + std::string(ToString(d.state)));
  }
  auto controller = entry->runtime->ControllerFor(d.endpoint);
  if (!controller) return ErrorResponse(503, "unreachable", "instance controller is gone");
  try {
    return {200,
            {{"sdtId", sdt_id},
             {"footprintBytes", controller->FootprintBytes(entry->token)},
             {"representationVersion", d.representation_version}}};
  } catch (...) {
    return FromException(std::current_exception());
  }
}

ApiResponse SdtManager::Dispatch(std::string_view method, std::string_view path,
                                 const std::string& body) {
  constexpr std::string_view kRoot = "/sdts";
  if (path.substr(0, kRoot.size()) != kRoot) {
    return ErrorResponse(404, "not_found", "no such route " + std::string(path));
  }
  std::string_view rest = path.substr(kRoot.size());
  if (rest.empty() || rest == "/") {
    if (method == "POST") return HandleCreate(body);
    if (method == "GET") return HandleList();
    return ErrorResponse(405, "method_not_allowed", std::string(method) + " " + std::string(path));
  }
  if (rest.front() != '/') return ErrorResponse(404, "not_found", "no such route");
  rest.remove_prefix(1);
  const auto slash = rest.find('/');
  const std::string id(rest.substr(0, slash));
  if (slash != std::string_view::npos) {
    if (rest.substr(slash) == "/footprint") {
      if (method == "GET") return HandleFootprint(id);
      return ErrorResponse(405, "method_not_allowed", std::string(method) + " " + std::string(path));
    }
    return ErrorResponse(404, "not_found", "no such route " + std::string(path));
  }
  if (method == "GET") return HandleGet(id);
  if (method == "PUT") return HandleUpdate(id, body);
  if (method == "DELETE") return HandleDestroy(id);
  return ErrorResponse(405, "method_not_allowed", std::string(method) + " " + std::string(path));
}

std::optional<SdtDescriptor> SdtManager::Descriptor(const std::string& sdt_id) const {
  auto entry = Find(sdt_id);
  if (!entry) return std::nullopt;
  std::lock_guard lock(entry->mu);
  return entry->descriptor;
}

std::vector<SdtDescriptor> SdtManager::Descriptors() const {
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::shared_lock lock(registry_mu_);
    for (const auto& [id, e] : entries_) entries.push_back(e);
  }
  std::vector<std::pair<std::pair<std::string, std::uint64_t>, SdtDescriptor>> rows;
  for (const auto& e : entries) {
    std::lock_guard lock(e->mu);
    rows.push_back({{e->descriptor.created_at, e->sequence}, e->descriptor});
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<SdtDescriptor> out;
  for (auto& [key, d] : rows) out.push_back(std::move(d));
  return out;
}

std::shared_ptr<SdtController> SdtManager::Controller(const std::string& sdt_id) const {
  auto entry = Find(sdt_id);
  if (!entry) return nullptr;
  std::lock_guard lock(entry->mu);
  if (!entry->runtime || entry->descriptor.endpoint.empty()) return nullptr;
  return entry->runtime->ControllerFor(entry->descriptor.endpoint);
}

std::optional<std::string> SdtManager::ServiceToken(const std::string& sdt_id) const {
  auto entry = Find(sdt_id);
  if (!entry) return std::nullopt;
  std::lock_guard lock(entry->mu);
  return entry->token;
}

}  // namespace twinaudit::sdt
