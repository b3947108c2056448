#include <httplib.h>

#include "twinaudit/sdt/manager.hpp"

namespace twinaudit::sdt {

using nlohmann::json;

namespace {

void Reply(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  if (r.status != 204 && !r.body.is_null()) res.set_content(r.body.dump(), "application/json");
}

}  // namespace

SdtManagerServer::SdtManagerServer(SdtManager& manager) : manager_(manager) {}

SdtManagerServer::~SdtManagerServer() { Stop(); }

void SdtManagerServer::Install() {
  server_ = std::make_unique<httplib::Server>();
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    Reply(res, manager_.Dispatch(req.method, req.path, req.body));
  };
  server_->Get(".*", route);
  server_->Post(".*", route);
  server_->Put(".*", route);
  server_->Delete(".*", route);
  server_->Patch(".*", route);
}

void SdtManagerServer::Start(const std::string& host, int port) {
  if (server_) throw ConflictError("manager server already started", "invalid_state");
  Install();
  host_ = host;
  const int bound = port == 0 ? server_->bind_to_any_port(host)
                              : (server_->bind_to_port(host, port) ? port : -1);
  if (bound <= 0) {
    server_.reset();
    throw IoError("cannot bind manager port on " + host);
  }
  port_ = bound;
  thread_ = std::thread([s = server_.get()] { s->listen_after_bind(); });
  server_->wait_until_ready();
}

void SdtManagerServer::Run(const std::string& host, int port) {
  Start(host, port);
  if (thread_.joinable()) thread_.join();
}

void SdtManagerServer::Stop() {
  if (!server_) return;
  server_->stop();
  if (thread_.joinable()) thread_.join();
  server_.reset();
}

std::string SdtManagerServer::base_url() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

void ThrowForStatus(const ApiResponse& r) {
  if (r.status >= 200 && r.status < 300) return;
  std::string code = "http_" + std::to_string(r.status);
  std::string message = "request failed with status " + std::to_string(r.status);
  if (r.body.is_object()) {
    code = r.body.value("code", code);
    message = r.body.value("message", message);
  }
  switch (r.status) {
    case 400:
    case 422:
      throw InvalidArgumentError(message, code);
    case 404:
      throw NotFoundError(message, code);
    case 409:
      throw ConflictError(message, code);
    default:
      throw Error(code, message);
  }
}

json SdtManagerClient::Create(const json& request) {
  auto r = Send("POST", "/sdts", request);
  ThrowForStatus(r);
  return r.body;
}

json SdtManagerClient::Update(const std::string& sdt_id, const json& request) {
  auto r = Send("PUT", "/sdts/" + sdt_id, request);
  ThrowForStatus(r);
  return r.body;
}

void SdtManagerClient::Destroy(const std::string& sdt_id) {
  ThrowForStatus(Send("DELETE", "/sdts/" + sdt_id, std::nullopt));
}

json SdtManagerClient::Get(const std::string& sdt_id) {
  auto r = Send("GET", "/sdts/" + sdt_id, std::nullopt);
  ThrowForStatus(r);
  return r.body;
}

json SdtManagerClient::List() {
  auto r = Send("GET", "/sdts", std::nullopt);
  ThrowForStatus(r);
  return r.body;
}

json SdtManagerClient::Footprint(const std::string& sdt_id) {
  auto r = Send("GET", "/sdts/" + sdt_id + "/footprint", std::nullopt);
  ThrowForStatus(r);
  return r.body;
}

HttpSdtManagerClient::HttpSdtManagerClient(std::string base_url, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

ApiResponse HttpSdtManagerClient::Send(std::string_view method, const std::string& path,
                                       const std::optional<json>& body) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  client.set_write_timeout(timeout_seconds_);
  const std::string payload = body ? body->dump() : std::string();
  httplib::Result res;
  if (method == "GET") {
    res = client.Get(path);
  } else if (method == "POST") {
    res = client.Post(path, payload, "application/json");
  } else if (method == "PUT") {
    res = client.Put(path, payload, "application/json");
  } else if (method == "DELETE") {
    res = client.Delete(path);
  } else {
    throw InvalidArgumentError("unsupported method " + std::string(method));
  }
  if (!res) {
    throw TransportError("cannot reach SDT manager at " + base_url_ + ": " +
                         httplib::to_string(res.error()));
  }
  ApiResponse out;
  out.status = res->status;
  if (!res->body.empty()) {
    try {
      out.body = json::parse(res->body);
    } catch (const json::parse_error&) {
      out.body = {{"code", "bad_response"}, {"message", res->body}};
    }
  }
  return out;
}

ApiResponse LocalSdtManagerClient::Send(std::string_view method, const std::string& path,
                                        const std::optional<json>& body) {
  return manager_.Dispatch(method, path, body ? body->dump() : std::string());
}

}  // namespace twinaudit::sdt
