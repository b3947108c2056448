#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "twinaudit/bom/diff.hpp"
#include "twinaudit/bom/model.hpp"
#include "twinaudit/errors.hpp"
#include "twinaudit/sdt/instance.hpp"

namespace httplib {
class Server;
}

namespace twinaudit::sdt {

enum class SdtState { kDeploying, kReady, kUpdating, kDestroyed, kError };

std::string_view ToString(SdtState state);
std::optional<SdtState> ParseSdtState(std::string_view text);

struct SdtDescriptor {
  std::string sdt_id;
  SdtState state = SdtState::kDeploying;
  std::string endpoint;
  std::string profile_id;
  std::string created_at;
  std::string updated_at;
  std::uint64_t representation_version = 0;
  std::optional<std::string> error_cause;  // deploy | representation | unreachable | internal
  std::string error_message;

  nlohmann::json ToJson() const;
  static SdtDescriptor FromJson(const nlohmann::json& value);
  friend bool operator==(const SdtDescriptor&, const SdtDescriptor&) = default;
};

struct CreateRequest {
  std::string profile_id;
  std::vector<bom::Bom> boms;
  nlohmann::json options = nlohmann::json::object();

  // Accepts boms as objects or as serialized strings. Throws
  // InvalidArgumentError, ParseError or ValidationError.
  static CreateRequest FromJson(const nlohmann::json& body);
  nlohmann::json ToJson() const;
};

struct UpdateRequest {
  std::uint64_t expected_version = 0;
  std::vector<bom::BomDelta> deltas;
  std::vector<bom::Bom> boms;  // full replacements, matched by serial number

  // Deltas and replacements are mutually exclusive; both throw
  // InvalidArgumentError when both are present.
  static UpdateRequest FromJson(const nlohmann::json& body);
  nlohmann::json ToJson() const;
};

// Interaction stages, in the order a create passes them.
namespace stage {
inline constexpr std::string_view kInterface = "Interface";
inline constexpr std::string_view kCore = "Core";
inline constexpr std::string_view kLcm = "LCM";
inline constexpr std::string_view kDeploy = "deploy";
inline constexpr std::string_view kDataAdapter = "DataAdapter";
inline constexpr std::string_view kController = "Controller";
inline constexpr std::string_view kConfirm = "confirm";
inline constexpr std::string_view kRespond = "respond";
}  // namespace stage

// Instrumentation hook. OnStage may throw to inject a failure at that stage.
class Tracer {
 public:
  virtual ~Tracer() = default;
  virtual void OnStage(std::string_view operation, std::string_view stage) = 0;
};

class InjectedFailure : public Error {
 public:
  explicit InjectedFailure(const std::string& stage)
      : Error("injected_failure", "injected failure at " + stage) {}
};

// Records (operation, stage) pairs; optionally fails at one stage of one
// operation.
class RecordingTracer : public Tracer {
 public:
  void OnStage(std::string_view operation, std::string_view stage) override;

  std::vector<std::string> Stages(std::string_view operation) const;
  void Clear();
  void FailAt(std::string operation, std::string stage, int times = 1);

 private:
  mutable std::mutex mu_;
  std::vector<std::pair<std::string, std::string>> log_;
  std::string fail_operation_;
  std::string fail_stage_;
  int fail_times_ = 0;
};

struct InstanceConfig {
  std::string sdt_id;
  std::shared_ptr<AccessPolicy> policy;
};

// Deployment seam. Deploy is all-or-nothing; Destroy is idempotent.
class RuntimeAdapter {
 public:
  virtual ~RuntimeAdapter() = default;
  virtual std::string Deploy(const InstanceConfig& config) = 0;
  virtual void Destroy(const std::string& endpoint) = 0;
  virtual bool Probe(const std::string& endpoint) = 0;
  // Controller reachable by the Data Adapter, or nullptr.
  virtual std::shared_ptr<SdtController> ControllerFor(const std::string& endpoint) = 0;
  virtual std::size_t LiveCount() const = 0;
};

// Each instance is an SdtInstanceServer on its own loopback port.
class InProcessRuntime : public RuntimeAdapter {
 public:
  ~InProcessRuntime() override;
  std::string Deploy(const InstanceConfig& config) override;
  void Destroy(const std::string& endpoint) override;
  bool Probe(const std::string& endpoint) override;
  std::shared_ptr<SdtController> ControllerFor(const std::string& endpoint) override;
  std::size_t LiveCount() const override;

  // Test seams.
  void FailNextDeploy() { fail_next_deploy_ = true; }
  // Stops the server but keeps it registered, so probes report unhealthy.
  void Crash(const std::string& endpoint);

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<SdtInstanceServer>> instances_;
  bool fail_next_deploy_ = false;
};

class PlacementStrategy {
 public:
  virtual ~PlacementStrategy() = default;
  virtual std::size_t Select(const CreateRequest& request, std::size_t runtime_count) = 0;
};

class SingleTargetPlacement : public PlacementStrategy {
 public:
  std::size_t Select(const CreateRequest&, std::size_t) override { return 0; }
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;  // null for 204
};

class SdtManager {
 public:
  // Defaults to one InProcessRuntime and SingleTargetPlacement.
  SdtManager();
  explicit SdtManager(std::vector<std::shared_ptr<RuntimeAdapter>> runtimes,
                      std::unique_ptr<PlacementStrategy> placement = nullptr);
  ~SdtManager();

  void SetTracer(std::shared_ptr<Tracer> tracer);

  // HTTP-shaped entry points; every documented error becomes a status code.
  ApiResponse HandleCreate(const std::string& body);
  ApiResponse HandleUpdate(const std::string& sdt_id, const std::string& body);
  ApiResponse HandleDestroy(const std::string& sdt_id);
  ApiResponse HandleGet(const std::string& sdt_id);
  ApiResponse HandleList();
  ApiResponse HandleFootprint(const std::string& sdt_id);

  // Routes method + path to the handlers above.
  ApiResponse Dispatch(std::string_view method, std::string_view path, const std::string& body);

  std::string AllocateId();

  // Direct accessors for in-process callers and tests.
  std::optional<SdtDescriptor> Descriptor(const std::string& sdt_id) const;
  std::vector<SdtDescriptor> Descriptors() const;
  std::shared_ptr<SdtController> Controller(const std::string& sdt_id) const;
  // Manager-held token with every scope on that instance.
  std::optional<std::string> ServiceToken(const std::string& sdt_id) const;
  const std::vector<std::shared_ptr<RuntimeAdapter>>& runtimes() const { return runtimes_; }

 private:
  struct Entry;
  std::shared_ptr<Entry> Find(const std::string& sdt_id) const;
  void Trace(std::string_view operation, std::string_view stage);

  std::vector<std::shared_ptr<RuntimeAdapter>> runtimes_;
  std::unique_ptr<PlacementStrategy> placement_;
  std::shared_ptr<Tracer> tracer_;
  mutable std::shared_mutex registry_mu_;
  std::map<std::string, std::shared_ptr<Entry>> entries_;
  std::set<std::string> issued_ids_;
  std::uint64_t next_sequence_ = 1;
};

// HTTP front end for an SdtManager.
class SdtManagerServer {
 public:
  explicit SdtManagerServer(SdtManager& manager);
  ~SdtManagerServer();
  SdtManagerServer(const SdtManagerServer&) = delete;
  SdtManagerServer& operator=(const SdtManagerServer&) = delete;

  void Start(const std::string& host = "127.0.0.1", int port = 0);
  void Stop();
  // Blocks serving until Stop is called from elsewhere.
  void Run(const std::string& host, int port);
  int port() const { return port_; }
  std::string base_url() const;

 private:
  void Install();

  SdtManager& manager_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = 0;
};

// AMS-side view of the manager protocol. Non-2xx responses become typed
// errors: 400 InvalidArgumentError, 404 NotFoundError, 409 ConflictError,
// anything else Error(code). Connection failures are TransportError.
class SdtManagerClient {
 public:
  virtual ~SdtManagerClient() = default;
  virtual ApiResponse Send(std::string_view method, const std::string& path,
                           const std::optional<nlohmann::json>& body) = 0;

  nlohmann::json Create(const nlohmann::json& request);
  nlohmann::json Update(const std::string& sdt_id, const nlohmann::json& request);
  void Destroy(const std::string& sdt_id);
  nlohmann::json Get(const std::string& sdt_id);
  nlohmann::json List();
  nlohmann::json Footprint(const std::string& sdt_id);
};

class HttpSdtManagerClient : public SdtManagerClient {
 public:
  explicit HttpSdtManagerClient(std::string base_url, int timeout_seconds = 30);
  ApiResponse Send(std::string_view method, const std::string& path,
                   const std::optional<nlohmann::json>& body) override;

 private:
  std::string base_url_;
  int timeout_seconds_;
};

class LocalSdtManagerClient : public SdtManagerClient {
 public:
  explicit LocalSdtManagerClient(SdtManager& manager) : manager_(manager) {}
  ApiResponse Send(std::string_view method, const std::string& path,
                   const std::optional<nlohmann::json>& body) override;

 private:
  SdtManager& manager_;
};

// Throws the typed error for a non-2xx response; returns otherwise.
void ThrowForStatus(const ApiResponse& response);

}  // namespace twinaudit::sdt
