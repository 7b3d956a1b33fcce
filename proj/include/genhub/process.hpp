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
#include <string>

namespace genhub {

struct ProcessResult {
  int exit_code = -1;  // -1 when killed by a signal
  bool timed_out = false;
  std::chrono::milliseconds elapsed{0};
};

// Runs `/bin/sh -c command` in working_dir with stdout and stderr appended
// to log_path. The whole process group is killed once timeout elapses.
ProcessResult run_shell(const std::string& command,
                        const std::filesystem::path& working_dir,
                        const std::filesystem::path& log_path,
                        std::chrono::milliseconds timeout);

// Single-quotes text for /bin/sh.
std::string shell_quote(const std::string& text);

// Last max_bytes of a file, empty if unreadable.
std::string file_tail(const std::filesystem::path& path,
                      std::size_t max_bytes = 2048);

// Resolves name against $PATH unless it contains a slash. Empty when not
// found or not executable.
std::filesystem::path find_executable(const std::string& name);

}  // namespace genhub
