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

// Dense kernels for matrices equipped with SPD row and column metrics.
//
// Conventions: a K x J observation X lives in a space where the row space
// R^J carries metric M (J x J) and the column space R^K carries metric D
// (K x K). The matrix inner product is <X, Y>_{M,D} = Tr(X M Y' D), which
// equals vec_t(X)' (D (x) M) vec_t(Y) where vec_t stacks the rows of X.
// Never swap vec_t for column stacking of X: that reverses the Kronecker
// factor order.

#pragma once

#include <Eigen/Dense>

namespace mvlda {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline constexpr double kDefaultFloorRatio = 1e-10;

/// A symmetric positive definite matrix with its inverse, symmetric square
/// root and inverse square root, all derived from one eigendecomposition.
class SpdFactor {
 public:
  SpdFactor() = default;

  Eigen::Index dim() const { return matrix_.rows(); }
  const Mat& matrix() const { return matrix_; }
  const Mat& inverse() const { return inverse_; }
  const Mat& sqrt() const { return sqrt_; }
  const Mat& inv_sqrt() const { return inv_sqrt_; }
  const Vec& eigenvalues() const { return eigenvalues_; }  // ascending, post-floor
  double eigen_floor() const { return eigen_floor_; }
  /// Smallest eigenvalue before flooring was applied.
  double raw_min_eigenvalue() const { return raw_min_eigenvalue_; }
  bool floored() const { return raw_min_eigenvalue_ < eigen_floor_; }
  double log_det() const;

  /// The factorization of matrix()^{-1}; no new decomposition is performed.
  SpdFactor inverted() const;

 private:
  friend SpdFactor spd_factorize(const Mat& a, double floor_ratio);

  Mat matrix_;
  Mat inverse_;
  Mat sqrt_;
  Mat inv_sqrt_;
  Vec eigenvalues_;
  double eigen_floor_ = 0.0;
  double raw_min_eigenvalue_ = 0.0;
};

/// Factorizes a symmetric matrix. Eigenvalues below floor_ratio * lambda_max
/// are raised to that floor (and matrix() is then the floored matrix).
/// Throws on non-square, asymmetric (1e-12 relative) or non-PSD input.
SpdFactor spd_factorize(const Mat& a, double floor_ratio = kDefaultFloorRatio);

/// Tr(X M Y' D).
double matrix_inner(const Mat& x, const Mat& y, const SpdFactor& m, const SpdFactor& d);

/// Row-major flattening of X (= column stacking of X').
Vec vec_t(const Mat& x);

/// Inverse of vec_t for a rows x cols matrix.
Mat unvec_t(const Vec& v, Eigen::Index rows, Eigen::Index cols);

Mat kron(const Mat& a, const Mat& b);

/// Relative Frobenius asymmetry ||A - A'||_F / ||A||_F (0 for A = 0).
double relative_asymmetry(const Mat& a);

struct MetricSvd {
  Mat u;       // K x Q, U' D U = I
  Vec lambda;  // Q, non-increasing, > 0
  Mat v;       // J x Q, V' M V = I
  Eigen::Index rank() const { return lambda.size(); }
};

/// max(K, J) * 1e-12.
double default_rank_tol(Eigen::Index rows, Eigen::Index cols);

/// SVD of Delta under metrics (M, D): Delta = sum_q sqrt(lambda_q) u_q v_q'.
///
/// Computed by whitening: the ordinary SVD of D^{1/2} Delta M^{1/2} =
/// Ut S Vt' gives U = D^{-1/2} Ut, V = M^{-1/2} Vt and lambda = S^2. Singular
/// values at or below rank_tol * s_max are dropped. In each whitened left
/// vector the entry of largest magnitude (lowest index on ties) is positive.
MetricSvd metric_svd(const Mat& delta, const SpdFactor& m, const SpdFactor& d, double rank_tol);

/// Sign convention used by metric_svd, exposed for oracles: returns +1 or -1
/// such that sign * x has its largest-magnitude entry positive.
double canonical_sign(const Vec& x);

}  // namespace mvlda
