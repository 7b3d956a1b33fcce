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
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "genhub/image.hpp"

namespace genhub::metrics {

// N x D matrix with one row per sample, in sample_ids order.
struct FeatureMatrix {
  Eigen::MatrixXd rows;
  std::string extractor_id;
  std::vector<std::string> sample_ids;

  Eigen::Index n() const { return rows.rows(); }
  Eigen::Index dim() const { return rows.cols(); }
};

using NamedImage = std::pair<std::string, Image>;

class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::string id() const = 0;
  virtual bool deterministic() const { return true; }
  virtual FeatureMatrix extract(const std::vector<NamedImage>& images) const = 0;
};

inline constexpr int kPoolSize = 8;

// Bilinear resize of every channel to 8x8 (half-pixel centers, edge
// clamped), flattened channel-major: D = 64 * channels. All images must
// share the channel count (kShapeMismatch).
class IdentityPoolExtractor : public FeatureExtractor {
 public:
  std::string id() const override { return "identity-pool"; }
  FeatureMatrix extract(const std::vector<NamedImage>& images) const override;
};

// Precomputed rows from a feature file, looked up by sample id. Ids absent
// from the file are kMissingFeatures.
class ExternalFileExtractor : public FeatureExtractor {
 public:
  explicit ExternalFileExtractor(const std::filesystem::path& path);
  std::string id() const override { return id_; }
  FeatureMatrix extract(const std::vector<NamedImage>& images) const override;

  // Every row of the file, in file order.
  const FeatureMatrix& all() const { return all_; }

 private:
  std::string id_;
  FeatureMatrix all_;
  std::map<std::string, Eigen::Index> by_id_;
};

// Runs an external extractor per call. The command template receives
// {request}, a JSON file {images: [{sample_id, path}], normalization,
// output_path}; the tool writes a feature file to output_path.
class CommandExtractor : public FeatureExtractor {
 public:
  CommandExtractor(std::string extractor_id, std::string command,
                   std::string normalization = "none",
                   std::chrono::milliseconds timeout = std::chrono::minutes(10));
  std::string id() const override { return id_; }
  bool deterministic() const override { return false; }
  FeatureMatrix extract(const std::vector<NamedImage>& images) const override;

 private:
  std::string id_;
  std::string command_;
  std::string normalization_;
  std::chrono::milliseconds timeout_;
};

FeatureMatrix extract_features(const std::vector<NamedImage>& images,
                               const FeatureExtractor& extractor);

// JSON {extractor_id, dim, rows: [{sample_id, features: [D numbers]}]}.
// Throws kShapeMismatch for ragged rows, kNonFinite, kParse.
FeatureMatrix read_feature_file(const std::filesystem::path& path);
void write_feature_file(const std::filesystem::path& path, const FeatureMatrix& features);

}  // namespace genhub::metrics
