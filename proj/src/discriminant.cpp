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

#include "mvlda/discriminant.hpp"

#include <cmath>
#include <sstream>

#include "mvlda/error.hpp"

namespace mvlda {

namespace {

void check_shape(const Mat& x, const DiscriminantModel& model, const char* op) {
  if (x.rows() != model.rows() || x.cols() != model.cols()) {
    std::ostringstream msg;
    msg << op << ": input is " << x.rows() << "x" << x.cols() << ", model expects " << model.rows() << "x"
        << model.cols();
    throw validation_error("dimension_mismatch", msg.str());
  }
}

void check_r(Eigen::Index r, const DiscriminantModel& model, const char* op) {
  if (r < 0 || r > model.rank()) {
    std::ostringstream msg;
    msg << op << ": r=" << r << " outside [0, Q=" << model.rank() << "]";
    throw validation_error("rank_out_of_range", msg.str());
  }
}

}  // namespace

DiscriminantModel fit_from_means(const Mat& mean1, const Mat& mean2, std::size_t n1, std::size_t n2,
                                 const SeparableCovariance& cov, double rank_tol) {
  if (mean1.rows() != cov.rows() || mean1.cols() != cov.cols() || mean2.rows() != mean1.rows() ||
      mean2.cols() != mean1.cols()) {
    std::ostringstream msg;
    msg << "fit: means are " << mean1.rows() << "x" << mean1.cols() << ", covariance factors are "
        << cov.rows() << " and " << cov.cols();
    throw validation_error("dimension_mismatch", msg.str());
  }

  // Canonical identifiable form. Exact when ||S_R||_F is already 1.
  const double scale = cov.s_r.matrix().norm();
  SpdFactor s_l = cov.s_l;
  SpdFactor s_r = cov.s_r;
  if (scale != 1.0) {
    s_l = spd_factorize(cov.s_l.matrix() * scale, 0.0);
    s_r = spd_factorize(cov.s_r.matrix() / scale, 0.0);
  }

  DiscriminantModel model;
  model.mean1 = mean1;
  model.mean2 = mean2;
  model.n1 = n1;
  model.n2 = n2;
  model.metric_m = s_r.inverted();
  model.metric_d = s_l.inverted();
  MetricSvd svd = metric_svd(model.delta(), model.metric_m, model.metric_d, rank_tol);
  model.u = std::move(svd.u);
  model.v = std::move(svd.v);
  model.lambda = std::move(svd.lambda);
  return model;
}

DiscriminantModel fit(const EpochSet& epochs, const SeparableCovariance& cov, double rank_tol) {
  const ClassMeans means = class_means(epochs);
  return fit_from_means(means.mean1, means.mean2, means.n1, means.n2, cov, rank_tol);
}

DiscriminantModel fit(const EpochSet& epochs, const SeparableCovariance& cov) {
  return fit(epochs, cov, default_rank_tol(epochs.rows, epochs.cols));
}

Vec scores_vec(const Mat& x, const DiscriminantModel& model) {
  check_shape(x, model, "scores_vec");
  // (D U)' x (M V), diagonal only.
  const Mat du = model.metric_d.matrix() * model.u;
  const Mat xmv = x * (model.metric_m.matrix() * model.v);
  Vec out(model.rank());
  for (Eigen::Index q = 0; q < model.rank(); ++q) out[q] = du.col(q).dot(xmv.col(q));
  return out;
}

MahalanobisDecomposition mahalanobis_decomposition(const DiscriminantModel& model) {
  MahalanobisDecomposition out;
  out.lambda = model.lambda;
  out.total = model.lambda.sum();
  const Mat delta = model.delta();
  const double direct = matrix_inner(delta, delta, model.metric_m, model.metric_d);
  const double scale = std::max(std::abs(direct), std::abs(out.total));
  if (std::abs(direct - out.total) > 1e-8 * scale) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "mahalanobis_decomposition: sum of lambda " << out.total << " disagrees with ||Delta||^2 " << direct;
    throw numerical_error("corrupted_model", msg.str());
  }
  return out;
}

double approx_error(const DiscriminantModel& model, Eigen::Index r) {
  check_r(r, model, "approx_error");
  return model.lambda.tail(model.rank() - r).sum();
}

Mat rank_r_reconstruct(const DiscriminantModel& model, Eigen::Index r) {
  check_r(r, model, "rank_r_reconstruct");
  const Vec root = model.lambda.head(r).cwiseSqrt();
  return model.u.leftCols(r) * root.asDiagonal() * model.v.leftCols(r).transpose();
}

Mat row_coordinates(const Mat& x, const DiscriminantModel& model) {
  check_shape(x, model, "row_coordinates");
  return x * (model.metric_m.matrix() * model.v);
}

Mat col_coordinates(const Mat& x, const DiscriminantModel& model) {
  check_shape(x, model, "col_coordinates");
  return x.transpose() * (model.metric_d.matrix() * model.u);
}

}  // namespace mvlda
