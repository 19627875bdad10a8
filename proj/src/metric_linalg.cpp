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

#include "mvlda/metric_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mvlda/error.hpp"

namespace mvlda {

namespace {

constexpr double kSymmetryTol = 1e-12;

std::string dims(const Mat& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

Mat from_eigen(const Mat& vectors, const Vec& values) {
  Mat out = vectors * values.asDiagonal() * vectors.transpose();
  // Exact symmetry for downstream checks.
  return 0.5 * (out + out.transpose());
}

}  // namespace

double relative_asymmetry(const Mat& a) {
  const double norm = a.norm();
  if (norm == 0.0) return 0.0;
  return (a - a.transpose()).norm() / norm;
}

SpdFactor spd_factorize(const Mat& a, double floor_ratio) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw validation_error("not_square", "spd_factorize: expected a non-empty square matrix, got " + dims(a));
  }
  if (!a.allFinite()) {
    throw validation_error("non_finite", "spd_factorize: matrix has non-finite entries");
  }
  if (relative_asymmetry(a) > kSymmetryTol) {
    throw validation_error("not_symmetric", "spd_factorize: matrix is not symmetric (relative asymmetry " +
                                                std::to_string(relative_asymmetry(a)) + ")");
  }
  if (!(floor_ratio >= 0.0)) {
    throw validation_error("invalid_floor", "spd_factorize: floor_ratio must be >= 0");
  }

  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw numerical_error("eigen_failure", "spd_factorize: eigendecomposition did not converge");
  }
  Vec values = eig.eigenvalues();
  const double lambda_max = values.maxCoeff();
  if (!(lambda_max > 0.0)) {
    throw numerical_error("not_positive_definite",
                          "spd_factorize: largest eigenvalue " + std::to_string(lambda_max) + " is not positive");
  }

  SpdFactor f;
  f.eigen_floor_ = floor_ratio * lambda_max;
  f.raw_min_eigenvalue_ = values.minCoeff();
  // The floor must stay strictly positive for the inverse to exist.
  const double floor = std::max(f.eigen_floor_, lambda_max * std::numeric_limits<double>::epsilon());
  f.eigen_floor_ = floor;
  bool any_floored = false;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < floor) {
      values[i] = floor;
      any_floored = true;
    }
  }

  const Mat& vectors = eig.eigenvectors();
  f.matrix_ = any_floored ? from_eigen(vectors, values) : sym;
  f.inverse_ = from_eigen(vectors, values.cwiseInverse());
  f.sqrt_ = from_eigen(vectors, values.cwiseSqrt());
  f.inv_sqrt_ = from_eigen(vectors, values.cwiseSqrt().cwiseInverse());
  f.eigenvalues_ = values;
  return f;
}

double SpdFactor::log_det() const { return eigenvalues_.array().log().sum(); }

SpdFactor SpdFactor::inverted() const {
  SpdFactor f;
  f.matrix_ = inverse_;
  f.inverse_ = matrix_;
  f.sqrt_ = inv_sqrt_;
  f.inv_sqrt_ = sqrt_;
  f.eigenvalues_ = eigenvalues_.cwiseInverse().reverse();
  f.eigen_floor_ = f.eigenvalues_.minCoeff();
  f.raw_min_eigenvalue_ = f.eigen_floor_;
  return f;
}

double matrix_inner(const Mat& x, const Mat& y, const SpdFactor& m, const SpdFactor& d) {
  if (x.rows() != y.rows() || x.cols() != y.cols() || m.dim() != x.cols() || d.dim() != x.rows()) {
    throw validation_error("dimension_mismatch", "matrix_inner: X " + dims(x) + ", Y " + dims(y) + ", M " +
                                                     dims(m.matrix()) + ", D " + dims(d.matrix()));
  }
  // Tr(X M Y' D) = sum_{k,j} (X M)_{kj} (D Y)_{kj}
  const Mat xm = x * m.matrix();
  const Mat dy = d.matrix() * y;
  return xm.cwiseProduct(dy).sum();
}

Vec vec_t(const Mat& x) {
  Vec out(x.size());
  Eigen::Index idx = 0;
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) out[idx++] = x(r, c);
  return out;
}

Mat unvec_t(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) {
    throw validation_error("dimension_mismatch", "unvec_t: vector length " + std::to_string(v.size()) +
                                                     " does not match " + std::to_string(rows) + "x" +
                                                     std::to_string(cols));
  }
  Mat out(rows, cols);
  Eigen::Index idx = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = v[idx++];
  return out;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double default_rank_tol(Eigen::Index rows, Eigen::Index cols) {
  return static_cast<double>(std::max(rows, cols)) * 1e-12;
}

double canonical_sign(const Vec& x) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    if (std::abs(x[i]) > std::abs(x[best])) best = i;
  }
  return (x.size() > 0 && x[best] < 0.0) ? -1.0 : 1.0;
}

MetricSvd metric_svd(const Mat& delta, const SpdFactor& m, const SpdFactor& d, double rank_tol) {
  if (!(rank_tol > 0.0)) {
    throw validation_error("invalid_rank_tol", "metric_svd: rank_tol must be > 0");
  }
  if (m.dim() != delta.cols() || d.dim() != delta.rows()) {
    throw validation_error("dimension_mismatch", "metric_svd: Delta " + dims(delta) + ", M " + dims(m.matrix()) +
                                                     ", D " + dims(d.matrix()));
  }

  const Mat whitened = d.sqrt() * delta * m.sqrt();
  Eigen::JacobiSVD<Mat> svd(whitened, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sigma = svd.singularValues();  // non-increasing

  Eigen::Index rank = 0;
  if (sigma.size() > 0 && sigma[0] > 0.0) {
    const double cutoff = rank_tol * sigma[0];
    while (rank < sigma.size() && sigma[rank] > cutoff) ++rank;
  }

  Mat ut = svd.matrixU().leftCols(rank);
  Mat vt = svd.matrixV().leftCols(rank);
  for (Eigen::Index q = 0; q < rank; ++q) {
    if (canonical_sign(ut.col(q)) < 0.0) {
      ut.col(q) *= -1.0;
      vt.col(q) *= -1.0;
    }
  }

  MetricSvd out;
  out.lambda = sigma.head(rank).array().square();
  out.u = d.inv_sqrt() * ut;
  out.v = m.inv_sqrt() * vt;
  return out;
}

}  // namespace mvlda
