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

#include "genhub/error.hpp"

namespace genhub {

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kDuplicateId: return "duplicate_id";
    case ErrorKind::kUnknownModel: return "unknown_model";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kBadQuery: return "bad_query";
    case ErrorKind::kUnknownOperator: return "unknown_operator";
    case ErrorKind::kEmptyMatch: return "empty_match";
    case ErrorKind::kMetricMissing: return "metric_missing";
    case ErrorKind::kNetwork: return "network";
    case ErrorKind::kChecksumMismatch: return "checksum_mismatch";
    case ErrorKind::kArchiveFormat: return "archive_format";
    case ErrorKind::kMissingManifest: return "missing_manifest";
    case ErrorKind::kManifestInvalid: return "manifest_invalid";
    case ErrorKind::kDependencyUnsatisfied: return "dependency_unsatisfied";
    case ErrorKind::kSubprocessFailed: return "subprocess_failed";
    case ErrorKind::kProtocolViolation: return "protocol_violation";
    case ErrorKind::kTimeout: return "timeout";
    case ErrorKind::kInsufficientSamples: return "insufficient_samples";
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kNonFinite: return "non_finite";
    case ErrorKind::kUnsupportedDtype: return "unsupported_dtype";
    case ErrorKind::kShapeMismatch: return "shape_mismatch";
    case ErrorKind::kMissingFeatures: return "missing_features";
    case ErrorKind::kInconsistentInputs: return "inconsistent_inputs";
    case ErrorKind::kAuth: return "auth";
    case ErrorKind::kQuota: return "quota";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kBind: return "bind";
    case ErrorKind::kInternal: return "internal";
  }
  return "internal";
}

std::string_view api_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnknownModel:
      return "unknown_model";
    case ErrorKind::kBadQuery:
    case ErrorKind::kUnknownOperator:
    case ErrorKind::kEmptyMatch:
    case ErrorKind::kMetricMissing:
    case ErrorKind::kInsufficientSamples:
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kNonFinite:
    case ErrorKind::kUnsupportedDtype:
    case ErrorKind::kShapeMismatch:
    case ErrorKind::kMissingFeatures:
    case ErrorKind::kInconsistentInputs:
      return "bad_query";
    case ErrorKind::kSubprocessFailed:
    case ErrorKind::kProtocolViolation:
      return "protocol_violation";
    case ErrorKind::kChecksumMismatch:
      return "checksum_mismatch";
    case ErrorKind::kParse:
    case ErrorKind::kSchema:
    case ErrorKind::kDuplicateId:
    case ErrorKind::kValidation:
    case ErrorKind::kArchiveFormat:
    case ErrorKind::kMissingManifest:
    case ErrorKind::kManifestInvalid:
    case ErrorKind::kDependencyUnsatisfied:
      return "validation";
    case ErrorKind::kTimeout:
      return "timeout";
    case ErrorKind::kNetwork:
    case ErrorKind::kAuth:
    case ErrorKind::kQuota:
    case ErrorKind::kIo:
    case ErrorKind::kBind:
    case ErrorKind::kInternal:
      return "internal";
  }
  return "internal";
}

int http_status(ErrorKind kind) {
  const std::string_view code = api_code(kind);
  if (code == "unknown_model") return 404;
  if (code == "bad_query") return 400;
  if (code == "validation") return 422;
  if (code == "protocol_violation" || code == "checksum_mismatch") return 502;
  if (code == "timeout") return 504;
  return 500;
}

}  // namespace genhub
