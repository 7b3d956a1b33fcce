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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "genhub/registry.hpp"
#include "genhub/transport.hpp"

namespace genhub {

inline constexpr std::string_view kManifestFileName = "model.manifest";

struct PackageRef {
  ModelId model_id;
  std::string url;
  std::string checksum_sha256;
  std::int64_t size_bytes = 0;  // advisory

  static PackageRef from(const ModelMetadata& meta);
};

struct CacheEntry {
  ModelId model_id;
  std::filesystem::path archive_path;
  std::filesystem::path unpacked_dir;
  std::string verified_at;
  std::string checksum_sha256;

  friend bool operator==(const CacheEntry&, const CacheEntry&) = default;
};

struct VerifyResult {
  bool ok = false;
  std::string actual;  // digest of the file as read
};

// Streams the file through SHA-256 and compares (case-insensitive) with
// expected. Throws Error(kIo) when the file is unreadable.
VerifyResult verify(const std::filesystem::path& archive_path,
                    std::string_view expected_sha256);

// Content-verified package cache laid out as
//   <root>/<model_id>/<checksum[0:8]>/{package.zip, unpacked/, entry.json, .lock}
// entry.json is written last; its presence marks a verified slot.
class PackageStore {
 public:
  PackageStore(std::filesystem::path cache_root,
               std::shared_ptr<Transport> transport,
               RetryPolicy retry = {});

  // Returns the verified entry, downloading and unpacking on a miss.
  // Throws kNetwork, kChecksumMismatch, kArchiveFormat, kMissingManifest.
  CacheEntry ensure_present(const PackageRef& ref);

  // Verified entry for ref, without touching the network.
  std::optional<CacheEntry> lookup(const PackageRef& ref) const;

  // Removes every cached slot of the model. Returns whether anything existed.
  bool purge(const ModelId& id);

  std::filesystem::path slot_dir(const PackageRef& ref) const;
  const std::filesystem::path& root() const { return root_; }
  Transport& transport() { return *transport_; }

  // Test seam: called with "downloaded" after the archive is verified and
  // before it is renamed into place, and with "unpacked" before entry.json
  // is written. Throwing from the hook simulates a crash at that point.
  void set_fault_hook(std::function<void(std::string_view stage)> hook) {
    fault_hook_ = std::move(hook);
  }

 private:
  std::filesystem::path root_;
  std::shared_ptr<Transport> transport_;
  RetryPolicy retry_;
  std::function<void(std::string_view)> fault_hook_;
};

// $GENHUB_CACHE or ~/.genhub/cache.
std::filesystem::path default_cache_root();

}  // namespace genhub
