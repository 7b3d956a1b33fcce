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

#include <filesystem>
#include <string>
#include <string_view>

namespace genhub {

// Throws Error(kIo).
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file then renames over path.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

// 32 lowercase hex characters from the system entropy source.
std::string random_hex_id();

// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

// Expands a leading "~/" using $HOME.
std::filesystem::path expand_home(const std::string& path);

// Directory removed (recursively) on destruction unless released.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "genhub");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  TempDir(TempDir&& other) noexcept;
  TempDir& operator=(TempDir&& other) noexcept;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path release();

 private:
  std::filesystem::path path_;
};

}  // namespace genhub
