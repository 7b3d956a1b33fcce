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

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace genhub {

// Every failure raised by the library carries one of these kinds. The
// service and CLI translate kinds into the public ApiError code table via
// api_code().
enum class ErrorKind {
  kParse,
  kSchema,
  kDuplicateId,
  kUnknownModel,
  kValidation,
  kBadQuery,
  kUnknownOperator,
  kEmptyMatch,
  kMetricMissing,
  kNetwork,
  kChecksumMismatch,
  kArchiveFormat,
  kMissingManifest,
  kManifestInvalid,
  kDependencyUnsatisfied,
  kSubprocessFailed,
  kProtocolViolation,
  kTimeout,
  kInsufficientSamples,
  kDimensionMismatch,
  kNonFinite,
  kUnsupportedDtype,
  kShapeMismatch,
  kMissingFeatures,
  kInconsistentInputs,
  kAuth,
  kQuota,
  kIo,
  kBind,
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        nlohmann::json detail = nullptr)
      : std::runtime_error(message), kind_(kind), detail_(std::move(detail)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const nlohmann::json& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  nlohmann::json detail_;
};

// Stable snake_case name of the kind, e.g. "checksum_mismatch".
std::string_view kind_name(ErrorKind kind);

// One of: unknown_model, bad_query, protocol_violation, checksum_mismatch,
// validation, timeout, internal.
std::string_view api_code(ErrorKind kind);

// HTTP status used by the service for a kind.
int http_status(ErrorKind kind);

}  // namespace genhub
