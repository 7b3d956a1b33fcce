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

#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

namespace httplib {
class Server;
}

namespace genhub {

struct StubServerOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0: any free port
  std::string storage_token = "storage-token";
  std::string tracker_token = "tracker-token";
  // The first N requests (of any route) are answered 503.
  int drop_first_requests = 0;
  std::int64_t max_upload_bytes = 256ll << 20;
};

// In-memory storage and issue-tracker backend for offline contribution runs.
//   POST /records            multipart "archive" -> {record_id, download_url, checksum, size_bytes}
//   GET  /records/{id}/file  archive bytes
//   POST /issues             {title, body} -> {issue_id}
//   GET  /issues/{id}        stored issue
class StubServer {
 public:
  explicit StubServer(StubServerOptions options = {});
  ~StubServer();
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  // Binds and serves on a background thread. Throws Error(kBind).
  void start();
  void stop();
  // Blocks serving on the calling thread (for the CLI).
  void run();

  int port() const { return port_; }
  std::string base_url() const;

  int uploads() const { return uploads_; }
  int downloads() const { return downloads_; }
  int issues_created() const { return issues_created_; }
  int dropped() const { return dropped_; }
  std::optional<nlohmann::json> issue(const std::string& id) const;

 private:
  void bind();
  void install_routes();

  StubServerOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> uploads_{0};
  std::atomic<int> downloads_{0};
  std::atomic<int> issues_created_{0};
  std::atomic<int> dropped_{0};
  std::atomic<int> seen_{0};
  mutable std::mutex mutex_;
  std::map<std::string, std::string> records_;
  std::map<std::string, nlohmann::json> issues_;
};

}  // namespace genhub
