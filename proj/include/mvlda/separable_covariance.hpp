// Copyright 2026 The mvlda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Within-class separable covariance S_W = S_L (x) S_R for two-class
// matrix-variate data, estimated by alternating maximum likelihood
// ("flip-flop"). S_L is K x K (rows), S_R is J x J (columns), and the pair
// is identified by ||S_R||_F = 1.

#pragma once

#include <string>
#include <vector>

#include "mvlda/metric_linalg.hpp"

namespace mvlda {

/// Two-class collection of K x J observation matrices.
struct EpochSet {
  Eigen::Index rows = 0;  // K
  Eigen::Index cols = 0;  // J
  std::vector<Mat> trials;
  std::vector<int> labels;  // 1 or 2, aligned with trials
  std::vector<std::string> channel_names;  // optional, length J
  std::vector<std::string> row_names;      // optional, length K

  std::size_t size() const { return trials.size(); }
  std::size_t count(int label) const;

  /// Throws on shape, label or finiteness violations, or an empty class.
  void validate() const;
};

struct ClassMeans {
  Mat mean1;
  Mat mean2;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

ClassMeans class_means(const EpochSet& epochs);

struct FlipFlopConfig {
  double tol = 1e-9;
  int max_iter = 100;
  double ridge = 0.0;  // absolute, added to each factor before inversion
  double floor_ratio = kDefaultFloorRatio;
  bool record_loglik = false;  // fill SeparableCovariance::loglik_trace
};

struct SeparableCovariance {
  SpdFactor s_l;  // K x K
  SpdFactor s_r;  // J x J, unit Frobenius norm
  int iterations = 0;
  bool converged = false;
  double fixed_point_residual = 0.0;
  std::vector<double> loglik_trace;  // one entry per sweep when requested
  std::vector<std::string> warnings;

  Eigen::Index rows() const { return s_l.dim(); }
  Eigen::Index cols() const { return s_r.dim(); }
};

/// Builds a SeparableCovariance from explicit factors and rescales it to the
/// identifiable form ||S_R||_F = 1 (the scale moves into S_L).
SeparableCovariance make_separable(const Mat& s_l, const Mat& s_r, double floor_ratio = kDefaultFloorRatio);

/// Same factors reparameterized as (kappa S_L, S_R / kappa), without
/// renormalizing. Used to probe identifiability.
SeparableCovariance rescaled(const SeparableCovariance& cov, double kappa);

SeparableCovariance flip_flop(const EpochSet& epochs, const FlipFlopConfig& config = {});

/// S_L (x) S_R as a dense KJ x KJ matrix, matching vec_t ordering.
Mat assemble_full(const SeparableCovariance& cov);

/// Pooled within-class log-likelihood of the class-centered trials under
/// N(0, S_L (x) S_R), using factor log-determinants.
double matrix_normal_loglik(const EpochSet& epochs, const SeparableCovariance& cov);

/// Row-factor update: (1 / (n J)) sum_i R_i inv(S_R) R_i'.
Mat row_factor_update(const std::vector<Mat>& residuals, const Mat& col_inverse);
/// Column-factor update: (1 / (n K)) sum_i R_i' inv(S_L) R_i.
Mat col_factor_update(const std::vector<Mat>& residuals, const Mat& row_inverse);

/// Trials centered by their own class mean, in stored order.
std::vector<Mat> centered_residuals(const EpochSet& epochs);

}  // namespace mvlda
