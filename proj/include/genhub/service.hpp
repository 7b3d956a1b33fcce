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
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "genhub/error.hpp"
#include "genhub/executor.hpp"

namespace httplib {
class Server;
}

namespace genhub {

inline constexpr int kDefaultServicePort = 8490;
inline constexpr std::int64_t kAsyncThreshold = 64;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = kDefaultServicePort;  // 0: any free port
  std::filesystem::path static_dir;  // served at /; empty: built-in page
  std::filesystem::path output_root;  // generate output; empty: <cache>/service-output
  std::int64_t async_threshold = kAsyncThreshold;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
  std::string content_type = "application/json";
  std::string raw;  // non-JSON bodies (static assets)
};

// {"error": {code, message, detail}} with the kind's HTTP status.
ApiResponse error_response(const Error& error);

// Endpoint logic, independent of the HTTP transport. Handlers never throw;
// failures become error responses.
class Service {
 public:
  Service(Hub& hub, ServiceConfig config = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  ApiResponse list_models() const;
  ApiResponse get_model(const std::string& id) const;
  ApiResponse search(const std::string& body) const;
  ApiResponse rank(const std::string& body) const;
  ApiResponse generate(const std::string& id, const std::string& body);
  ApiResponse explore(const std::string& id, const std::string& body);
  ApiResponse job(const std::string& id) const;
  ApiResponse static_asset(const std::string& path) const;

  // Routes a request the way the HTTP server does.
  ApiResponse dispatch(const std::string& method, const std::string& path,
                       const std::string& body = "");

  // Binds and serves in the background. Throws Error(kBind).
  void start();
  // Blocks until stop() is called from another thread or a signal handler.
  void run();
  // Stops accepting requests and waits for in-flight jobs.
  void stop();
  int port() const { return port_; }
  std::string base_url() const;

  // Waits for every queued job to finish.
  void wait_for_jobs();

 private:
  struct Job {
    std::string id;
    std::string state = "queued";  // queued, running, done, failed
    nlohmann::json result;
    nlohmann::json error;
  };

  nlohmann::json run_generate(const std::string& id, const nlohmann::json& req,
                              const std::string& out_tag);
  void bind();
  void install_routes();

  Hub& hub_;
  ServiceConfig config_;
  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;
  int port_ = 0;
  mutable std::mutex jobs_mutex_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::vector<std::thread> job_threads_;
};

}  // namespace genhub
