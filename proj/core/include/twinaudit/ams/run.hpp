#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace twinaudit::ams {

enum class RunState {
  kCreated,
  kCollecting,
  kBomsBuilt,
  kSdtRequested,
  kSdtReady,
  kUpdating,
  kFailed,
};

std::string_view ToString(RunState state);
std::optional<RunState> ParseRunState(std::string_view text);

// CREATED→COLLECTING→BOMS_BUILT→SDT_REQUESTED→SDT_READY, SDT_READY↔UPDATING,
// and FAILED from any state but FAILED.
bool IsAllowedTransition(RunState from, RunState to);

struct RunTransition {
  RunState state = RunState::kCreated;
  std::int64_t at_millis = 0;  // non-decreasing along a run
  friend bool operator==(const RunTransition&, const RunTransition&) = default;
};

struct DocumentRef {
  std::string serial_number;
  std::uint64_t version = 1;
  friend bool operator==(const DocumentRef&, const DocumentRef&) = default;
};

struct HostDocuments {
  DocumentRef sbom;
  DocumentRef cbom;
  friend bool operator==(const HostDocuments&, const HostDocuments&) = default;
};

struct AuditRun {
  std::string run_id;
  std::string profile_id;
  RunState state = RunState::kCreated;
  std::optional<std::string> sdt_id;
  std::uint64_t sdt_version = 0;  // representation version last acknowledged
  std::vector<RunTransition> transitions;
  std::optional<std::string> error_cause;  // transport, no_evidence, update_rejected, ...
  std::string error_message;
  std::vector<std::string> hosts;
  std::map<std::string, std::string> host_errors;
  std::map<std::string, HostDocuments> documents;
  std::optional<DocumentRef> manifest;

  // Appends a transition; throws ConflictError("invalid_transition") when
  // the relation forbids it.
  void TransitionTo(RunState next, std::int64_t now_millis);
  void Fail(std::string cause, std::string message, std::int64_t now_millis);

  nlohmann::json ToJson() const;
  static AuditRun FromJson(const nlohmann::json& value);
  friend bool operator==(const AuditRun&, const AuditRun&) = default;
};

}  // namespace twinaudit::ams
