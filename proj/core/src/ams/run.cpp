#include "twinaudit/ams/run.hpp"

#include <algorithm>

#include "twinaudit/errors.hpp"

namespace twinaudit::ams {

using nlohmann::json;

std::string_view ToString(RunState state) {
  switch (state) {
    case RunState::kCreated:
      return "CREATED";
    case RunState::kCollecting:
      return "COLLECTING";
    case RunState::kBomsBuilt:
      return "BOMS_BUILT";
    case RunState::kSdtRequested:
      return "SDT_REQUESTED";
    case RunState::kSdtReady:
      return "SDT_READY";
    case RunState::kUpdating:
      return "UPDATING";
    case RunState::kFailed:
      return "FAILED";
  }
  return "FAILED";
}

std::optional<RunState> ParseRunState(std::string_view text) {
  for (auto s : {RunState::kCreated, RunState::kCollecting, RunState::kBomsBuilt,
                 RunState::kSdtRequested, RunState::kSdtReady, RunState::kUpdating,
                 RunState::kFailed}) {
    if (ToString(s) == text) return s;
  }
  return std::nullopt;
}

bool IsAllowedTransition(RunState from, RunState to) {
  if (from == RunState::kFailed) return false;
  if (to == RunState::kFailed) return true;
  switch (from) {
    case RunState::kCreated:
      return to == RunState::kCollecting;
    case RunState::kCollecting:
      return to == RunState::kBomsBuilt;
    case RunState::kBomsBuilt:
      return to == RunState::kSdtRequested;
    case RunState::kSdtRequested:
      return to == RunState::kSdtReady;
    case RunState::kSdtReady:
      return to == RunState::kUpdating;
    case RunState::kUpdating:
      return to == RunState::kSdtReady;
    case RunState::kFailed:
      return false;
  }
  return false;
}

void AuditRun::TransitionTo(RunState next, std::int64_t now_millis) {
  if (!IsAllowedTransition(state, next)) {
    throw ConflictError("run " + run_id + " cannot move from " + std::string(ToString(state)) +
                            " to " + std::string(ToString(next)),
                        "invalid_transition");
  }
  const std::int64_t at =
      transitions.empty() ? now_millis : std::max(now_millis, transitions.back().at_millis);
  transitions.push_back({next, at});
  state = next;
}

void AuditRun::Fail(std::string cause, std::string message, std::int64_t now_millis) {
  TransitionTo(RunState::kFailed, now_millis);
  error_cause = std::move(cause);
  error_message = std::move(message);
}

namespace {

json RefJson(const DocumentRef& r) { return {{"serialNumber", r.serial_number}, {"version", r.version}}; }

DocumentRef RefFromJson(const json& v) {
  return {v.at("serialNumber").get<std::string>(), v.at("version").get<std::uint64_t>()};
}

}  // namespace

json AuditRun::ToJson() const {
  json trans = json::array();
  for (const auto& t : transitions) trans.push_back({{"state", ToString(t.state)}, {"atMillis", t.at_millis}});
  json docs = json::object();
  for (const auto& [host, d] : documents) docs[host] = {{"sbom", RefJson(d.sbom)}, {"cbom", RefJson(d.cbom)}};
  json out = {{"runId", run_id},
              {"profileId", profile_id},
              {"state", ToString(state)},
              {"transitions", trans},
              {"hosts", hosts},
              {"hostErrors", host_errors},
              {"documents", docs}};
  if (sdt_id) out["sdtId"] = *sdt_id;
  if (sdt_version) out["sdtVersion"] = sdt_version;
  if (error_cause) out["error"] = {{"cause", *error_cause}, {"message", error_message}};
  if (manifest) out["manifest"] = RefJson(*manifest);
  return out;
}

AuditRun AuditRun::FromJson(const json& v) {
  AuditRun r;
  r.run_id = v.at("runId").get<std::string>();
  r.profile_id = v.at("profileId").get<std::string>();
  auto state = ParseRunState(v.at("state").get<std::string>());
  if (!state) throw InvalidArgumentError("unknown run state");
  r.state = *state;
  for (const auto& t : v.value("transitions", json::array())) {
    auto s = ParseRunState(t.at("state").get<std::string>());
    if (!s) throw InvalidArgumentError("unknown run state in transitions");
    r.transitions.push_back({*s, t.at("atMillis").get<std::int64_t>()});
  }
  r.hosts = v.value("hosts", std::vector<std::string>{});
  r.host_errors = v.value("hostErrors", std::map<std::string, std::string>{});
  const json docs = v.value("documents", json::object());
  for (const auto& [host, d] : docs.items()) {
    r.documents[host] = {RefFromJson(d.at("sbom")), RefFromJson(d.at("cbom"))};
  }
  if (v.contains("sdtId")) r.sdt_id = v.at("sdtId").get<std::string>();
  r.sdt_version = v.value("sdtVersion", std::uint64_t{0});
  if (v.contains("error")) {
    r.error_cause = v.at("error").at("cause").get<std::string>();
    r.error_message = v.at("error").value("message", "");
  }
  if (v.contains("manifest")) r.manifest = RefFromJson(v.at("manifest"));
  return r;
}

}  // namespace twinaudit::ams
