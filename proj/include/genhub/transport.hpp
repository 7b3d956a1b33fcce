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

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace genhub {

// Retries kNetwork errors marked retryable; the k-th retry waits
// base_delay * 2^k (1s, 2s, 4s by default).
struct RetryPolicy {
  int retries = 3;
  std::chrono::milliseconds base_delay{1000};
};

void with_retry(const RetryPolicy& policy, const std::function<void()>& attempt);

// Fetches a resource by URL into a local file. The package store and the
// registry loader go through this seam so tests can count and corrupt
// traffic.
class Transport {
 public:
  virtual ~Transport() = default;
  // Throws Error(kNetwork); detail.retryable tells with_retry whether a
  // further attempt makes sense.
  virtual void fetch(const std::string& url,
                     const std::filesystem::path& dest) = 0;
};

// http://, https:// (via cpp-httplib), file:// and bare filesystem paths.
class DefaultTransport : public Transport {
 public:
  explicit DefaultTransport(std::chrono::seconds timeout = std::chrono::seconds(60))
      : timeout_(timeout) {}
  void fetch(const std::string& url, const std::filesystem::path& dest) override;

 private:
  std::chrono::seconds timeout_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

struct MultipartField {
  std::string name;
  std::string content;
  std::string filename;
  std::string content_type;
};

using Headers = std::map<std::string, std::string>;

// Throw Error(kNetwork, retryable) when the connection fails; any HTTP
// status is returned to the caller.
HttpResponse http_get(const std::string& url, const Headers& headers = {});
HttpResponse http_post(const std::string& url, const std::string& body,
                       const std::string& content_type,
                       const Headers& headers = {});
HttpResponse http_post_multipart(const std::string& url,
                                 const std::vector<MultipartField>& fields,
                                 const Headers& headers = {});

// Reads a document from a URL or a local path.
std::string read_source(const std::string& source, Transport& transport);

bool is_remote_url(const std::string& source);

}  // namespace genhub
