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
#include <vector>

namespace genhub::zip {

struct Entry {
  std::string name;  // '/'-separated, relative
  std::string data;
  bool executable = false;

  friend bool operator==(const Entry&, const Entry&) = default;
};

// Reproducible archive: entries sorted by name, every timestamp pinned to
// 1980-01-01 00:00, unix permissions 0644/0755, deflate level 9 (stored
// when deflate does not shrink the entry). Identical inputs yield identical
// bytes regardless of input order.
std::string write_archive(std::vector<Entry> entries);
void write_archive_file(const std::filesystem::path& path,
                        std::vector<Entry> entries);

// Throws Error(kArchiveFormat) on malformed, encrypted, zip64 or
// path-escaping archives and on CRC mismatch. Directory entries are skipped.
std::vector<Entry> read_archive(std::string_view bytes);

// Extracts into dest (created if needed), restoring the executable bit.
void extract_archive(const std::filesystem::path& archive,
                     const std::filesystem::path& dest);

// Regular files under dir, recursively, with relative '/'-separated names.
std::vector<Entry> collect_directory(const std::filesystem::path& dir);

}  // namespace genhub::zip
