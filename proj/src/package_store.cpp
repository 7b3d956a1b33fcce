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

#include "genhub/package_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "genhub/digest.hpp"
#include "genhub/error.hpp"
#include "genhub/fs_util.hpp"
#include "genhub/zip_archive.hpp"

namespace genhub {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kArchiveName = "package.zip";
constexpr const char* kUnpackedName = "unpacked";
constexpr const char* kEntryName = "entry.json";
constexpr const char* kLockName = ".lock";

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// flock(2) on <slot>/.lock; also excludes other threads in this process
// because each acquisition opens its own file description.
class SlotLock {
 public:
  explicit SlotLock(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorKind::kIo, "cannot open lock " + path.string());
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw Error(ErrorKind::kIo, "cannot lock " + path.string());
      }
    }
  }
  ~SlotLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  SlotLock(const SlotLock&) = delete;
  SlotLock& operator=(const SlotLock&) = delete;

 private:
  int fd_ = -1;
};

std::optional<CacheEntry> read_entry(const fs::path& slot,
                                     const PackageRef& ref) {
  const fs::path entry_path = slot / kEntryName;
  std::error_code ec;
  if (!fs::exists(entry_path, ec)) return std::nullopt;
  try {
    const json doc = json::parse(read_file(entry_path));
    CacheEntry e;
    e.model_id = ModelId(doc.at("model_id").get<std::string>());
    e.archive_path = doc.at("archive_path").get<std::string>();
    e.unpacked_dir = doc.at("unpacked_dir").get<std::string>();
    e.verified_at = doc.at("verified_at").get<std::string>();
    e.checksum_sha256 = doc.at("checksum_sha256").get<std::string>();
    if (e.model_id != ref.model_id ||
        lower(e.checksum_sha256) != lower(ref.checksum_sha256)) {
      return std::nullopt;
    }
    if (!fs::exists(e.unpacked_dir / kManifestFileName, ec)) return std::nullopt;
    return e;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void remove_stale(const fs::path& slot) {
  std::error_code ec;
  for (const auto& item : fs::directory_iterator(slot, ec)) {
    const std::string name = item.path().filename().string();
    if (name == kLockName) continue;
    fs::remove_all(item.path(), ec);
  }
}

}  // namespace

PackageRef PackageRef::from(const ModelMetadata& meta) {
  return PackageRef{meta.model_id, meta.execution.package_url,
                    meta.execution.checksum_sha256,
                    meta.execution.package_size_bytes};
}

VerifyResult verify(const fs::path& archive_path, std::string_view expected) {
  VerifyResult r;
  r.actual = sha256_file(archive_path);
  r.ok = r.actual == lower(std::string(expected));
  return r;
}

fs::path default_cache_root() {
  if (const char* env = std::getenv("GENHUB_CACHE"); env && *env) {
    return expand_home(env);
  }
  return expand_home("~/.genhub/cache");
}

PackageStore::PackageStore(fs::path cache_root,
                           std::shared_ptr<Transport> transport,
                           RetryPolicy retry)
    : root_(std::move(cache_root)),
      transport_(transport ? std::move(transport)
                           : std::make_shared<DefaultTransport>()),
      retry_(retry) {}

fs::path PackageStore::slot_dir(const PackageRef& ref) const {
  return root_ / ref.model_id.str() / lower(ref.checksum_sha256).substr(0, 8);
}

std::optional<CacheEntry> PackageStore::lookup(const PackageRef& ref) const {
  return read_entry(slot_dir(ref), ref);
}

CacheEntry PackageStore::ensure_present(const PackageRef& ref) {
  if (!ref.model_id.valid() || ref.checksum_sha256.size() < 8) {
    throw Error(ErrorKind::kValidation,
                "invalid package reference for " + ref.model_id.str());
  }
  const fs::path slot = slot_dir(ref);
  if (auto hit = read_entry(slot, ref)) return *hit;

  fs::create_directories(slot);
  SlotLock lock(slot / kLockName);
  if (auto hit = read_entry(slot, ref)) return *hit;

  // Anything here is left over from an interrupted attempt.
  remove_stale(slot);

  const std::string tag = random_hex_id().substr(0, 12);
  const fs::path tmp_archive = slot / (std::string(kArchiveName) + ".part-" + tag);
  const fs::path archive = slot / kArchiveName;
  const fs::path tmp_unpacked = slot / (std::string(kUnpackedName) + ".part-" + tag);
  const fs::path unpacked = slot / kUnpackedName;

  with_retry(retry_, [&] { transport_->fetch(ref.url, tmp_archive); });

  const VerifyResult check = verify(tmp_archive, ref.checksum_sha256);
  if (!check.ok) {
    remove_stale(slot);
    throw Error(ErrorKind::kChecksumMismatch,
                "checksum mismatch for " + ref.model_id.str() + ": expected " +
                    lower(ref.checksum_sha256) + ", got " + check.actual,
                json{{"model_id", ref.model_id.str()},
                     {"expected", lower(ref.checksum_sha256)},
                     {"actual", check.actual}});
  }
  if (fault_hook_) fault_hook_("downloaded");
  fs::rename(tmp_archive, archive);

  try {
    zip::extract_archive(archive, tmp_unpacked);
  } catch (...) {
    remove_stale(slot);
    throw;
  }
  if (!fs::exists(tmp_unpacked / kManifestFileName)) {
    remove_stale(slot);
    throw Error(ErrorKind::kMissingManifest,
                "package for " + ref.model_id.str() + " has no " +
                    std::string(kManifestFileName),
                json{{"model_id", ref.model_id.str()}});
  }
  fs::rename(tmp_unpacked, unpacked);
  if (fault_hook_) fault_hook_("unpacked");

  CacheEntry entry{ref.model_id, fs::absolute(archive), fs::absolute(unpacked),
                   utc_timestamp(), lower(ref.checksum_sha256)};
  const json doc{{"model_id", entry.model_id.str()},
                 {"archive_path", entry.archive_path.string()},
                 {"unpacked_dir", entry.unpacked_dir.string()},
                 {"verified_at", entry.verified_at},
                 {"checksum_sha256", entry.checksum_sha256},
                 {"url", ref.url}};
  write_file_atomic(slot / kEntryName, doc.dump(2) + "\n");
  return entry;
}

bool PackageStore::purge(const ModelId& id) {
  if (id.str().empty() || id.str().find('/') != std::string::npos ||
      id.str() == "." || id.str() == "..") {
    return false;
  }
  const fs::path dir = root_ / id.str();
  std::error_code ec;
  if (!fs::exists(dir, ec)) return false;
  fs::remove_all(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot remove " + dir.string());
  return true;
}

}  // namespace genhub
