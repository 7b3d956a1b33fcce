// Copyright 2026 The genhub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "genhub/stub_server.hpp"

#include <httplib.h>

#include "genhub/digest.hpp"
#include "genhub/error.hpp"

namespace genhub {

using nlohmann::json;

namespace {

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

bool bearer_ok(const httplib::Request& req, const std::string& token) {
  return req.get_header_value("Authorization") == "Bearer " + token;
}

}  // namespace

StubServer::StubServer(StubServerOptions options)
    : options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

StubServer::~StubServer() { stop(); }

std::string StubServer::base_url() const {
  return "http://" + options_.host + ":" + std::to_string(port_);
}

void StubServer::install_routes() {
  server_->set_payload_max_length(static_cast<std::size_t>(options_.max_upload_bytes) + (1 << 20));
  server_->set_pre_routing_handler([this](const httplib::Request&, httplib::Response& res) {
    if (seen_.fetch_add(1) < options_.drop_first_requests) {
      ++dropped_;
      reply_json(res, 503, {{"error", "temporarily unavailable"}});
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  server_->Post("/records", [this](const httplib::Request& req, httplib::Response& res) {
    if (!bearer_ok(req, options_.storage_token)) {
      reply_json(res, 401, {{"error", "bad token"}});
      return;
    }
    if (!req.has_file("archive")) {
      reply_json(res, 400, {{"error", "missing archive field"}});
      return;
    }
    const auto file = req.get_file_value("archive");
    if (static_cast<std::int64_t>(file.content.size()) > options_.max_upload_bytes) {
      reply_json(res, 413, {{"error", "archive too large"}});
      return;
    }
    std::string id;
    {
      std::lock_guard lock(mutex_);
      id = "rec-" + std::to_string(records_.size() + 1);
      records_[id] = file.content;
    }
    ++uploads_;
    reply_json(res, 201,
               {{"record_id", id},
                {"download_url", base_url() + "/records/" + id + "/file"},
                {"checksum", sha256_hex(file.content)},
                {"size_bytes", file.content.size()}});
  });

  server_->Get(R"(/records/([^/]+)/file)", [this](const httplib::Request& req,
                                                  httplib::Response& res) {
    std::lock_guard lock(mutex_);
    auto it = records_.find(req.matches[1]);
    if (it == records_.end()) {
      reply_json(res, 404, {{"error", "no such record"}});
      return;
    }
    ++downloads_;
    res.status = 200;
    res.set_content(it->second, "application/zip");
  });

  server_->Post("/issues", [this](const httplib::Request& req, httplib::Response& res) {
    if (!bearer_ok(req, options_.tracker_token)) {
      reply_json(res, 401, {{"error", "bad token"}});
      return;
    }
    json body = json::parse(req.body, nullptr, false);
    if (!body.is_object() || !body.contains("title") || !body.contains("body")) {
      reply_json(res, 400, {{"error", "expected {title, body}"}});
      return;
    }
    std::string id;
    {
      std::lock_guard lock(mutex_);
      id = std::to_string(issues_.size() + 1);
      body["issue_id"] = id;
      body["state"] = "open";
      issues_[id] = body;
    }
    ++issues_created_;
    reply_json(res, 201, {{"issue_id", id}});
  });

  server_->Get(R"(/issues/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    auto it = issues_.find(req.matches[1]);
    if (it == issues_.end()) {
      reply_json(res, 404, {{"error", "no such issue"}});
      return;
    }
    reply_json(res, 200, it->second);
  });
}

void StubServer::bind() {
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
  } else {
    port_ = server_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
  }
  if (port_ <= 0) {
    throw Error(ErrorKind::kBind, "cannot bind " + options_.host + ":" +
                                      std::to_string(options_.port));
  }
}

void StubServer::start() {
  bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void StubServer::run() {
  bind();
  server_->listen_after_bind();
}

void StubServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::optional<json> StubServer::issue(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = issues_.find(id);
  if (it == issues_.end()) return std::nullopt;
  return std::optional<json>(std::in_place, it->second);
}

}  // namespace genhub
