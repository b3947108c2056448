#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "twinaudit/sdt/access.hpp"
#include "twinaudit/sdt/representation.hpp"

namespace httplib {
class Server;
}

namespace twinaudit::sdt {

struct RevisionInfo {
  std::uint64_t revision = 0;
  std::int64_t timestamp_ns = 0;
  std::uint64_t representation_version = 0;
};

// Point-in-time selector for QueryThing.
struct At {
  std::optional<std::uint64_t> revision;
  std::optional<std::int64_t> timestamp_ns;
};

// SDT Controller: the only path to the stored representation. Every public
// call taking a token is authorized first and throws DeniedError on deny.
class SdtController {
 public:
  SdtController(std::string sdt_id, std::shared_ptr<AccessPolicy> policy);

  const std::string& sdt_id() const { return sdt_id_; }
  AccessPolicy& policy() { return *policy_; }

  // Builds version 1. Throws on duplicate hosts, empty input, or when already
  // built.
  void Build(const std::string& token, const std::vector<bom::Bom>& boms);

  std::vector<std::string> ListThings(const std::string& token);
  Revision QueryThing(const std::string& token, const std::string& thing_id, const At& at = {});
  std::vector<RevisionInfo> History(const std::string& token, const std::string& thing_id);

  // Serialized writer. `states` holds full new states for things to compare
  // against their latest revision; unknown ids reject the whole update.
  std::vector<std::string> ApplyUpdate(const std::string& token,
                                       const std::map<std::string, ThingState>& states,
                                       std::uint64_t new_version);

  std::uint64_t CurrentVersion(const std::string& token);
  // Size of the full serialized representation, history included.
  std::size_t FootprintBytes(const std::string& token);
  nlohmann::json Dump(const std::string& token);

  bool built() const;

  // Test seam: called inside ApplyUpdate after validation, before commit.
  // Throwing aborts the update with nothing applied.
  void SetCommitHook(std::function<void()> hook);

 private:
  void Require(const std::string& token, std::string_view action, std::string_view target,
               Scope scope);

  std::string sdt_id_;
  std::shared_ptr<AccessPolicy> policy_;
  mutable std::shared_mutex mu_;
  std::optional<StoredRepresentation> repr_;
  std::function<void()> commit_hook_;
};

// HTTP+JSON service interface of one instance, bound to 127.0.0.1.
class SdtInstanceServer {
 public:
  explicit SdtInstanceServer(std::shared_ptr<SdtController> controller);
  ~SdtInstanceServer();
  SdtInstanceServer(const SdtInstanceServer&) = delete;
  SdtInstanceServer& operator=(const SdtInstanceServer&) = delete;

  // Binds a free port (or `port`) and starts serving. Throws IoError.
  void Start(int port = 0);
  void Stop();
  bool running() const;
  int port() const { return port_; }
  std::string endpoint() const;
  const std::shared_ptr<SdtController>& controller() const { return controller_; }

 private:
  std::shared_ptr<SdtController> controller_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace twinaudit::sdt
