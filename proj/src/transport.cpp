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

#include "genhub/transport.hpp"

#include <httplib.h>

#include <fstream>
#include <thread>

#include "genhub/error.hpp"
#include "genhub/fs_util.hpp"

namespace genhub {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // /path?query
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::kNetwork, "not a URL: " + url,
                json{{"retryable", false}});
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

httplib::Client make_client(const std::string& origin) {
  httplib::Client cli(origin);
  cli.set_connection_timeout(std::chrono::seconds(10));
  cli.set_read_timeout(std::chrono::seconds(120));
  cli.set_write_timeout(std::chrono::seconds(120));
  cli.set_follow_location(true);
  return cli;
}

httplib::Headers to_headers(const Headers& headers) {
  httplib::Headers out;
  for (const auto& [k, v] : headers) out.emplace(k, v);
  return out;
}

[[noreturn]] void connection_failed(const std::string& url, httplib::Error err) {
  throw Error(ErrorKind::kNetwork,
              "request to " + url + " failed: " + httplib::to_string(err),
              json{{"retryable", true}, {"url", url}});
}

HttpResponse finish(const std::string& url, const httplib::Result& res) {
  if (!res) connection_failed(url, res.error());
  return HttpResponse{res->status, res->body};
}

fs::path local_path_of(const std::string& source) {
  if (source.rfind("file://", 0) == 0) return fs::path(source.substr(7));
  return expand_home(source);
}

}  // namespace

void with_retry(const RetryPolicy& policy, const std::function<void()>& attempt) {
  for (int i = 0;; ++i) {
    try {
      attempt();
      return;
    } catch (const Error& e) {
      const bool retryable = e.kind() == ErrorKind::kNetwork &&
                             e.detail().is_object() &&
                             e.detail().value("retryable", false);
      if (!retryable || i >= policy.retries) throw;
      std::this_thread::sleep_for(policy.base_delay * (1 << i));
    }
  }
}

bool is_remote_url(const std::string& source) {
  return source.rfind("http://", 0) == 0 || source.rfind("https://", 0) == 0;
}

void DefaultTransport::fetch(const std::string& url, const fs::path& dest) {
  if (!is_remote_url(url)) {
    const fs::path src = local_path_of(url);
    std::error_code ec;
    fs::copy_file(src, dest, fs::copy_options::overwrite_existing, ec);
    if (ec) {
      throw Error(ErrorKind::kNetwork, "cannot fetch " + url + ": " + ec.message(),
                  json{{"retryable", false}, {"url", url}});
    }
    return;
  }

  const SplitUrl parts = split_url(url);
  auto cli = make_client(parts.origin);
  cli.set_read_timeout(timeout_);
  std::ofstream out(dest, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + dest.string());
  int status = 0;
  auto res = cli.Get(
      parts.path,
      [&](const httplib::Response& r) {
        status = r.status;
        return true;
      },
      [&](const char* data, std::size_t len) {
        if (status == 200) out.write(data, static_cast<std::streamsize>(len));
        return true;
      });
  if (!res) connection_failed(url, res.error());
  out.close();
  if (res->status != 200) {
    throw Error(ErrorKind::kNetwork,
                "GET " + url + " returned HTTP " + std::to_string(res->status),
                json{{"retryable", res->status >= 500 || res->status == 429},
                     {"status", res->status},
                     {"url", url}});
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + dest.string());
}

HttpResponse http_get(const std::string& url, const Headers& headers) {
  const SplitUrl parts = split_url(url);
  auto cli = make_client(parts.origin);
  return finish(url, cli.Get(parts.path, to_headers(headers)));
}

HttpResponse http_post(const std::string& url, const std::string& body,
                       const std::string& content_type, const Headers& headers) {
  const SplitUrl parts = split_url(url);
  auto cli = make_client(parts.origin);
  return finish(url, cli.Post(parts.path, to_headers(headers), body, content_type));
}

HttpResponse http_post_multipart(const std::string& url,
                                 const std::vector<MultipartField>& fields,
                                 const Headers& headers) {
  const SplitUrl parts = split_url(url);
  auto cli = make_client(parts.origin);
  httplib::MultipartFormDataItems items;
  for (const auto& f : fields) {
    items.push_back({f.name, f.content, f.filename, f.content_type});
  }
  return finish(url, cli.Post(parts.path, to_headers(headers), items));
}

std::string read_source(const std::string& source, Transport& transport) {
  if (!is_remote_url(source)) return read_file(local_path_of(source));
  TempDir tmp("genhub-fetch");
  const fs::path dest = tmp.path() / "document";
  transport.fetch(source, dest);
  return read_file(dest);
}

}  // namespace genhub
