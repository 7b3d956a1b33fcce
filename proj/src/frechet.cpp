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

#include "genhub/frechet.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "genhub/error.hpp"

namespace genhub::metrics {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::kNonFinite, std::string(what) + " contains NaN or Inf");
  }
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  // Unbiased draw from [0, bound).
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& perm,
                            std::size_t begin, std::size_t end) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(end - begin), m.cols());
  for (std::size_t i = begin; i < end; ++i) {
    out.row(static_cast<Eigen::Index>(i - begin)) = m.row(static_cast<Eigen::Index>(perm[i]));
  }
  return out;
}

}  // namespace

GaussianStats fit_gaussian(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 2) {
    throw Error(ErrorKind::kInsufficientSamples,
                "fitting a Gaussian needs at least 2 samples, got " +
                    std::to_string(rows.rows()));
  }
  require_finite(rows, "feature matrix");
  GaussianStats s;
  s.n = rows.rows();
  s.mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - s.mean.transpose();
  const Eigen::MatrixXd c = (centered.transpose() * centered) / static_cast<double>(s.n - 1);
  s.cov = 0.5 * (c + c.transpose());
  return s;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kInternal, "eigendecomposition did not converge");
  }
  const Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();
}

double frechet_distance(const GaussianStats& x, const GaussianStats& y) {
  const auto d = x.mean.size();
  if (y.mean.size() != d || x.cov.rows() != d || x.cov.cols() != d ||
      y.cov.rows() != d || y.cov.cols() != d) {
    throw Error(ErrorKind::kDimensionMismatch,
                "Gaussians have different dimensions (" + std::to_string(d) + " vs " +
                    std::to_string(y.mean.size()) + ")");
  }
  require_finite(x.mean, "mean");
  require_finite(y.mean, "mean");
  require_finite(x.cov, "covariance");
  require_finite(y.cov, "covariance");

  const double mean_term = (x.mean - y.mean).squaredNorm();
  const Eigen::MatrixXd sy = psd_sqrt(y.cov);
  const Eigen::MatrixXd inner = sy * x.cov * sy;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (inner + inner.transpose()),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kInternal, "eigendecomposition did not converge");
  }
  const double cross_trace = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double fd = mean_term + x.cov.trace() + y.cov.trace() - 2.0 * cross_trace;
  return fd < 0.0 ? 0.0 : fd;
}

FidRatioResult fid_ratio(double fid_rs, double fid_rr) {
  if (!std::isfinite(fid_rs) || !std::isfinite(fid_rr) || fid_rs < 0 || fid_rr < 0) {
    throw Error(ErrorKind::kInconsistentInputs, "FID values must be finite and non-negative");
  }
  if (fid_rs == 0.0) {
    if (fid_rr == 0.0) return {1.0, true};
    throw Error(ErrorKind::kInconsistentInputs,
                "real-syn FID is 0 while real-real FID is positive");
  }
  return {1.0 - (fid_rs - fid_rr) / fid_rs, fid_rr <= fid_rs};
}

std::vector<std::size_t> split_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

nlohmann::json FidReport::to_json() const {
  return nlohmann::json{{"#imgs", n_real},
                        {"real-real", fid_rr},
                        {"real-syn", fid_rs},
                        {"r_FID", r_fid ? nlohmann::json(*r_fid) : nlohmann::json()},
                        {"in_bounds", in_bounds},
                        {"extractor_id", extractor_id},
                        {"normalization", normalization_mode},
                        {"n_real", n_real},
                        {"n_syn", n_syn},
                        {"split_seed", split_seed},
                        {"covariance_denominator", "N-1"}};
}

FidReport compute_fid_report(const Eigen::MatrixXd& real, const Eigen::MatrixXd& syn,
                             std::uint64_t split_seed) {
  if (real.rows() < 4 || syn.rows() < 2) {
    throw Error(ErrorKind::kInsufficientSamples,
                "FID report needs at least 4 real and 2 synthetic samples");
  }
  if (real.cols() != syn.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "real and synthetic feature widths differ");
  }
  const auto n = static_cast<std::size_t>(real.rows());
  const auto perm = split_permutation(n, split_seed);
  const GaussianStats half_a = fit_gaussian(gather_rows(real, perm, 0, n / 2));
  const GaussianStats half_b = fit_gaussian(gather_rows(real, perm, n / 2, n));

  FidReport report;
  report.n_real = real.rows();
  report.n_syn = syn.rows();
  report.split_seed = split_seed;
  report.fid_rr = frechet_distance(half_a, half_b);
  report.fid_rs = frechet_distance(fit_gaussian(real), fit_gaussian(syn));
  if (report.fid_rs == 0.0 && report.fid_rr > 0.0) {
    report.r_fid.reset();
    report.in_bounds = false;
  } else {
    const FidRatioResult r = fid_ratio(report.fid_rs, report.fid_rr);
    report.r_fid = r.value;
    report.in_bounds = r.in_bounds;
  }
  return report;
}

}  // namespace genhub::metrics
