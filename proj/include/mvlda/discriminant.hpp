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

// Descriptive binary discriminant analysis of matrix-variate data.
//
// The mean difference Delta = mean1 - mean2 is decomposed under the
// Mahalanobis metrics M = inv(S_R) (row space) and D = inv(S_L) (column
// space):
//
//   Delta = sum_q sqrt(lambda_q) u_q v_q',   U' D U = I,  V' M V = I.
//
// The u_q (x) v_q are the discriminant axes of R^{KJ} under inv(S_L (x) S_R),
// and sum_q lambda_q is the squared Mahalanobis distance between the means.

#pragma once

#include "mvlda/metric_linalg.hpp"
#include "mvlda/separable_covariance.hpp"

namespace mvlda {

struct DiscriminantModel {
  Mat mean1;  // K x J
  Mat mean2;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  SpdFactor metric_m;  // inv(S_R), J x J
  SpdFactor metric_d;  // inv(S_L), K x K
  Mat u;               // K x Q
  Mat v;               // J x Q
  Vec lambda;          // Q, non-increasing

  Eigen::Index rows() const { return mean1.rows(); }
  Eigen::Index cols() const { return mean1.cols(); }
  Eigen::Index rank() const { return lambda.size(); }
  Mat delta() const { return mean1 - mean2; }
};

/// Fits the model. The covariance is first brought to the identifiable form
/// ||S_R||_F = 1, so (kappa S_L, S_R / kappa) inputs give identical models.
DiscriminantModel fit(const EpochSet& epochs, const SeparableCovariance& cov, double rank_tol);
DiscriminantModel fit(const EpochSet& epochs, const SeparableCovariance& cov);

/// Assembles a model from class means and covariance factors.
DiscriminantModel fit_from_means(const Mat& mean1, const Mat& mean2, std::size_t n1, std::size_t n2,
                                 const SeparableCovariance& cov, double rank_tol);

/// Coordinates of x on the Q axes u_q (x) v_q: u_q' D x M v_q.
Vec scores_vec(const Mat& x, const DiscriminantModel& model);

struct MahalanobisDecomposition {
  Vec lambda;
  double total = 0.0;
};

/// sum_q lambda_q, cross-checked against ||Delta||^2_{M,D}. A mismatch beyond
/// 1e-8 relative throws (corrupted model).
MahalanobisDecomposition mahalanobis_decomposition(const DiscriminantModel& model);

/// sum_{q > r} lambda_q.
double approx_error(const DiscriminantModel& model, Eigen::Index r);

/// sum_{q <= r} sqrt(lambda_q) u_q v_q'.
Mat rank_r_reconstruct(const DiscriminantModel& model, Eigen::Index r);

/// Column q is x M v_q (K x Q).
Mat row_coordinates(const Mat& x, const DiscriminantModel& model);

/// Column q is x' D u_q (J x Q).
Mat col_coordinates(const Mat& x, const DiscriminantModel& model);

}  // namespace mvlda
