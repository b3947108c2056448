#include "twinaudit/sdt/instance.hpp"

#include <charconv>
#include <chrono>
#include <mutex>

#include <httplib.h>

#include "twinaudit/errors.hpp"
#include "twinaudit/ids.hpp"

namespace twinaudit::sdt {

using nlohmann::json;

SdtController::SdtController(std::string sdt_id, std::shared_ptr<AccessPolicy> policy)
    : sdt_id_(std::move(sdt_id)), policy_(std::move(policy)) {
  if (!policy_) policy_ = std::make_shared<AccessPolicy>();
}

void SdtController::Require(const std::string& token, std::string_view action,
                            std::string_view target, Scope scope) {
  if (!policy_->Authorize(token, action, target, scope)) {
    throw DeniedError("token lacks " + std::string(ToString(scope)) + " for " +
                      std::string(action));
  }
}

bool SdtController::built() const {
  std::shared_lock lock(mu_);
  return repr_.has_value();
}

void SdtController::SetCommitHook(std::function<void()> hook) {
  std::unique_lock lock(mu_);
  commit_hook_ = std::move(hook);
}

void SdtController::Build(const std::string& token, const std::vector<bom::Bom>& boms) {
  Require(token, "build_representation", sdt_id_, Scope::kWriteRepresentation);
  auto things = DeriveThings(boms);
  std::unique_lock lock(mu_);
  if (repr_) throw ConflictError("representation already built", "invalid_state");
  repr_ = StoredRepresentation::Build(std::move(things), MonotonicNanos());
}

namespace {

const StoredRepresentation& Built(const std::optional<StoredRepresentation>& r) {
  if (!r) throw ConflictError("representation not built", "invalid_state");
  return *r;
}

}  // namespace

std::vector<std::string> SdtController::ListThings(const std::string& token) {
  Require(token, "list_things", sdt_id_, Scope::kRead);
  std::shared_lock lock(mu_);
  return Built(repr_).ThingIds();
}

Revision SdtController::QueryThing(const std::string& token, const std::string& thing_id,
                                   const At& at) {
  Require(token, "query_thing", thing_id, Scope::kRead);
  if (at.revision && at.timestamp_ns) {
    throw InvalidArgumentError("rev and at are mutually exclusive");
  }
  std::shared_lock lock(mu_);
  const auto& r = Built(repr_);
  if (at.revision) return r.AtRevision(thing_id, *at.revision);
  if (at.timestamp_ns) return r.AtTime(thing_id, *at.timestamp_ns);
  return r.Latest(thing_id);
}

std::vector<RevisionInfo> SdtController::History(const std::string& token,
                                                 const std::string& thing_id) {
  Require(token, "thing_history", thing_id, Scope::kRead);
  std::shared_lock lock(mu_);
  std::vector<RevisionInfo> out;
  for (const auto& rev : Built(repr_).History(thing_id)) {
    out.push_back({rev.revision, rev.timestamp_ns, rev.representation_version});
  }
  return out;
}

std::vector<std::string> SdtController::ApplyUpdate(const std::string& token,
                                                    const std::map<std::string, ThingState>& states,
                                                    std::uint64_t new_version) {
  Require(token, "apply_update", sdt_id_, Scope::kWriteRepresentation);
  std::unique_lock lock(mu_);
  // Stage on a copy so a failure anywhere leaves the live representation intact.
  StoredRepresentation next = Built(repr_);
  auto changed = next.Apply(states, new_version, MonotonicNanos());
  if (commit_hook_) commit_hook_();
  repr_ = std::move(next);
  return changed;
}

std::uint64_t SdtController::CurrentVersion(const std::string& token) {
  Require(token, "current_version", sdt_id_, Scope::kRead);
  std::shared_lock lock(mu_);
  return Built(repr_).current_version();
}

std::size_t SdtController::FootprintBytes(const std::string& token) {
  Require(token, "footprint", sdt_id_, Scope::kAdmin);
  std::shared_lock lock(mu_);
  return Built(repr_).ToJson().dump().size();
}

json SdtController::Dump(const std::string& token) {
  Require(token, "dump", sdt_id_, Scope::kAdmin);
  std::shared_lock lock(mu_);
  return Built(repr_).ToJson();
}

namespace {

void SendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, int status, const std::string& code,
               const std::string& message) {
  SendJson(res, status, {{"code", code}, {"message", message}});
}

std::string BearerToken(const httplib::Request& req) {
  const std::string header = req.get_header_value("Authorization");
  constexpr std::string_view kBearer = "Bearer ";
  if (header.rfind(kBearer, 0) != 0) return "";
  return header.substr(kBearer.size());
}

template <typename T>
std::optional<T> ParseNumber(const std::string& text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

json RevisionJson(const Revision& r) {
  json out = r.state.ToJson();
  out["revision"] = r.revision;
  out["timestamp"] = r.timestamp_ns;
  out["representationVersion"] = r.representation_version;
  return out;
}

// Runs `fn`, mapping library errors to status codes.
template <typename Fn>
void Guarded(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const DeniedError& e) {
    if (req.get_header_value("Authorization").empty()) {
      SendError(res, 401, "unauthenticated", "missing bearer token");
    } else {
      SendError(res, 403, e.code(), e.what());
    }
  } catch (const NotFoundError& e) {
    SendError(res, 404, e.code(), e.what());
  } catch (const InvalidArgumentError& e) {
    SendError(res, 400, e.code(), e.what());
  } catch (const ConflictError& e) {
    SendError(res, 409, e.code(), e.what());
  } catch (const std::exception& e) {
    SendError(res, 500, "internal", e.what());
  }
}

}  // namespace

SdtInstanceServer::SdtInstanceServer(std::shared_ptr<SdtController> controller)
    : controller_(std::move(controller)) {}

SdtInstanceServer::~SdtInstanceServer() { Stop(); }

void SdtInstanceServer::Start(int port) {
  if (server_) throw ConflictError("instance server already started", "invalid_state");
  auto server = std::make_unique<httplib::Server>();
  server->new_task_queue = [] { return new httplib::ThreadPool(1); };
  auto ctl = controller_;

  server->Get("/things", [ctl](const httplib::Request& req, httplib::Response& res) {
    Guarded(req, res, [&] { SendJson(res, 200, ctl->ListThings(BearerToken(req))); });
  });
  server->Get(R"(/things/([^/]+))", [ctl](const httplib::Request& req, httplib::Response& res) {
    Guarded(req, res, [&] {
      At at;
      if (req.has_param("rev")) {
        at.revision = ParseNumber<std::uint64_t>(req.get_param_value("rev"));
        if (!at.revision || *at.revision == 0) throw InvalidArgumentError("rev must be a positive integer");
      }
      if (req.has_param("at")) {
        at.timestamp_ns = ParseNumber<std::int64_t>(req.get_param_value("at"));
        if (!at.timestamp_ns) throw InvalidArgumentError("at must be an integer timestamp");
      }
      SendJson(res, 200, RevisionJson(ctl->QueryThing(BearerToken(req), req.matches[1], at)));
    });
  });
  server->Get(R"(/things/([^/]+)/history)",
              [ctl](const httplib::Request& req, httplib::Response& res) {
                Guarded(req, res, [&] {
                  json out = json::array();
                  for (const auto& r : ctl->History(BearerToken(req), req.matches[1])) {
                    out.push_back({{"revision", r.revision},
                                   {"timestamp", r.timestamp_ns},
                                   {"representationVersion", r.representation_version}});
                  }
                  SendJson(res, 200, out);
                });
              });
  server->set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      SendError(res, res.status, res.status == 404 ? "not_found" : "error", "no such route");
    }
  });

  int bound = port == 0 ? server->bind_to_any_port("127.0.0.1")
                        : (server->bind_to_port("127.0.0.1", port) ? port : -1);
  if (bound <= 0) throw IoError("cannot bind instance service port");
  port_ = bound;
  server_ = std::move(server);
  thread_ = std::thread([s = server_.get()] { s->listen_after_bind(); });
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  while (!server_->is_running()) {
    if (std::chrono::steady_clock::now() > deadline) {
      Stop();
      throw IoError("instance service did not start listening");
    }
    std::this_thread::yield();
  }
}

void SdtInstanceServer::Stop() {
  if (!server_) return;
  server_->stop();
  if (thread_.joinable()) thread_.join();
  server_.reset();
}

bool SdtInstanceServer::running() const { return server_ && server_->is_running(); }

std::string SdtInstanceServer::endpoint() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

}  // namespace twinaudit::sdt
