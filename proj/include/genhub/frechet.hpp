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
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace genhub::metrics {

// Gaussian fitted to an (N x D) feature matrix.
struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::int64_t n = 0;
};

// Column means and the unbiased (N-1) covariance, symmetrized as
// (C + C^T) / 2. Throws kInsufficientSamples for N < 2 and kNonFinite for
// NaN/Inf entries.
GaussianStats fit_gaussian(const Eigen::MatrixXd& rows);

// Principal square root of a symmetric positive semi-definite matrix via
// eigendecomposition; negative eigenvalues from round-off are clamped to 0.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

// Squared Wasserstein-2 distance between two Gaussians:
//   |mu_x - mu_y|^2 + tr(S_x + S_y - 2 (S_x S_y)^{1/2}).
// The trace of (S_x S_y)^{1/2} is taken from the similar symmetric matrix
// S_y^{1/2} S_x S_y^{1/2}. Small negative results are clamped to 0. Throws
// kDimensionMismatch and kNonFinite.
double frechet_distance(const GaussianStats& x, const GaussianStats& y);

struct FidRatioResult {
  double value = 0.0;
  bool in_bounds = false;
};

// 1 - (fid_rs - fid_rr) / fid_rs, i.e. fid_rr / fid_rs. in_bounds iff
// fid_rr <= fid_rs. Both zero gives {1, true}; fid_rs == 0 < fid_rr is
// kInconsistentInputs, as are negative inputs.
FidRatioResult fid_ratio(double fid_rs, double fid_rr);

// Seeded permutation of [0, n) (Fisher-Yates over mt19937_64 with
// rejection sampling, identical on every platform). The first n/2 entries
// form one half of the real-real split, the rest the other.
std::vector<std::size_t> split_permutation(std::size_t n, std::uint64_t seed);

struct FidReport {
  double fid_rr = 0.0;
  double fid_rs = 0.0;
  // nullopt when the ratio is undefined (fid_rs == 0 < fid_rr).
  std::optional<double> r_fid;
  bool in_bounds = false;
  std::string extractor_id;
  std::string normalization_mode = "none";
  std::int64_t n_real = 0;
  std::int64_t n_syn = 0;
  std::uint64_t split_seed = 0;

  // Row in the shape of a results table: #imgs, real-real, real-syn, r_FID
  // plus provenance.
  nlohmann::json to_json() const;
};

// fid_rr between two disjoint seeded halves of real; fid_rs between all of
// real and syn. Throws kInsufficientSamples unless n_real >= 4, n_syn >= 2,
// kDimensionMismatch when feature widths differ.
FidReport compute_fid_report(const Eigen::MatrixXd& real, const Eigen::MatrixXd& syn,
                             std::uint64_t split_seed);

}  // namespace genhub::metrics
