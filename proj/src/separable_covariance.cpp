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

#include "mvlda/separable_covariance.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mvlda/error.hpp"

namespace mvlda {

namespace {

Mat symmetrized(const Mat& a) { return 0.5 * (a + a.transpose()); }

double relative_change(const Mat& next, const Mat& prev) {
  const double scale = next.norm();
  return scale > 0.0 ? (next - prev).norm() / scale : (next - prev).norm();
}

/// inv(S + ridge I). With ridge = 0 a factor that would need flooring is
/// reported as singular instead of silently regularized.
Mat factor_inverse(const Mat& s, double ridge, double floor_ratio, const char* name) {
  Mat shifted = s;
  if (ridge > 0.0) shifted.diagonal().array() += ridge;
  const SpdFactor f = spd_factorize(shifted, floor_ratio);
  if (ridge == 0.0 && f.raw_min_eigenvalue() <= floor_ratio * f.eigenvalues().maxCoeff()) {
    std::ostringstream msg;
    msg << "flip_flop: factor " << name << " is singular (smallest eigenvalue " << f.raw_min_eigenvalue()
        << ", floor " << floor_ratio * f.eigenvalues().maxCoeff() << "); consider --ridge";
    throw numerical_error("singular_factor", msg.str());
  }
  return f.inverse();
}

}  // namespace

std::size_t EpochSet::count(int label) const {
  std::size_t c = 0;
  for (int l : labels) c += (l == label) ? 1 : 0;
  return c;
}

void EpochSet::validate() const {
  if (rows <= 0 || cols <= 0) {
    throw validation_error("invalid_dimensions", "epochs: K and J must be positive");
  }
  if (labels.size() != trials.size()) {
    throw validation_error("label_count", "epochs: " + std::to_string(labels.size()) + " labels for " +
                                              std::to_string(trials.size()) + " trials");
  }
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (trials[i].rows() != rows || trials[i].cols() != cols) {
      throw validation_error("dimension_mismatch", "epochs: trial " + std::to_string(i) + " is " +
                                                       std::to_string(trials[i].rows()) + "x" +
                                                       std::to_string(trials[i].cols()) + ", expected " +
                                                       std::to_string(rows) + "x" + std::to_string(cols));
    }
    if (labels[i] != 1 && labels[i] != 2) {
      throw validation_error("invalid_label",
                             "epochs: trial " + std::to_string(i) + " has label " + std::to_string(labels[i]));
    }
    if (!trials[i].allFinite()) {
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
          if (!std::isfinite(trials[i](r, c)))
            throw validation_error("non_finite", "epochs: non-finite value at trial " + std::to_string(i) +
                                                     ", row " + std::to_string(r) + ", col " + std::to_string(c));
    }
  }
  if (!channel_names.empty() && static_cast<Eigen::Index>(channel_names.size()) != cols) {
    throw validation_error("name_count", "epochs: channel_names length differs from J");
  }
  if (!row_names.empty() && static_cast<Eigen::Index>(row_names.size()) != rows) {
    throw validation_error("name_count", "epochs: row_names length differs from K");
  }
  if (count(1) == 0 || count(2) == 0) {
    throw validation_error("empty_class", "epochs: both classes need at least one trial (n1=" +
                                              std::to_string(count(1)) + ", n2=" + std::to_string(count(2)) + ")");
  }
}

ClassMeans class_means(const EpochSet& epochs) {
  epochs.validate();
  ClassMeans out;
  out.mean1 = Mat::Zero(epochs.rows, epochs.cols);
  out.mean2 = Mat::Zero(epochs.rows, epochs.cols);
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    if (epochs.labels[i] == 1) {
      out.mean1 += epochs.trials[i];
      ++out.n1;
    } else {
      out.mean2 += epochs.trials[i];
      ++out.n2;
    }
  }
  out.mean1 /= static_cast<double>(out.n1);
  out.mean2 /= static_cast<double>(out.n2);
  return out;
}

std::vector<Mat> centered_residuals(const EpochSet& epochs) {
  const ClassMeans means = class_means(epochs);
  std::vector<Mat> out;
  out.reserve(epochs.size());
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    out.push_back(epochs.trials[i] - (epochs.labels[i] == 1 ? means.mean1 : means.mean2));
  }
  return out;
}

Mat row_factor_update(const std::vector<Mat>& residuals, const Mat& col_inverse) {
  const Eigen::Index k = residuals.front().rows();
  const Eigen::Index j = residuals.front().cols();
  Mat acc = Mat::Zero(k, k);
  for (const Mat& r : residuals) acc.noalias() += (r * col_inverse) * r.transpose();
  return symmetrized(acc / static_cast<double>(residuals.size() * j));
}

Mat col_factor_update(const std::vector<Mat>& residuals, const Mat& row_inverse) {
  const Eigen::Index k = residuals.front().rows();
  const Eigen::Index j = residuals.front().cols();
  Mat acc = Mat::Zero(j, j);
  for (const Mat& r : residuals) acc.noalias() += (r.transpose() * row_inverse) * r;
  return symmetrized(acc / static_cast<double>(residuals.size() * k));
}

SeparableCovariance make_separable(const Mat& s_l, const Mat& s_r, double floor_ratio) {
  const double norm = s_r.norm();
  if (!(norm > 0.0)) {
    throw validation_error("zero_factor", "make_separable: column factor has zero norm");
  }
  SeparableCovariance cov;
  cov.s_l = spd_factorize(s_l * norm, floor_ratio);
  cov.s_r = spd_factorize(s_r / norm, floor_ratio);
  cov.converged = true;
  return cov;
}

SeparableCovariance rescaled(const SeparableCovariance& cov, double kappa) {
  SeparableCovariance out = cov;
  out.s_l = spd_factorize(cov.s_l.matrix() * kappa, 0.0);
  out.s_r = spd_factorize(cov.s_r.matrix() / kappa, 0.0);
  return out;
}

SeparableCovariance flip_flop(const EpochSet& epochs, const FlipFlopConfig& config) {
  if (!(config.tol > 0.0) || config.max_iter < 1 || !(config.ridge >= 0.0)) {
    throw validation_error("invalid_config", "flip_flop: require tol > 0, max_iter >= 1, ridge >= 0");
  }
  epochs.validate();
  const std::size_t n = epochs.size();
  const Eigen::Index k = epochs.rows;
  const Eigen::Index j = epochs.cols;
  if (epochs.count(1) < 2 && epochs.count(2) < 2) {
    throw validation_error("insufficient_trials", "flip_flop: at least one class needs two or more trials");
  }

  const std::vector<Mat> residuals = centered_residuals(epochs);
  double scatter = 0.0;
  for (const Mat& r : residuals) scatter += r.squaredNorm();
  if (scatter == 0.0) {
    throw numerical_error("zero_within_scatter", "flip_flop: zero within-class scatter (all trials equal their class mean)");
  }

  SeparableCovariance out;
  const double nd = static_cast<double>(n);
  if (nd * static_cast<double>(j) <= static_cast<double>(k) || nd * static_cast<double>(k) <= static_cast<double>(j)) {
    out.warnings.push_back("sample size n=" + std::to_string(n) + " is small for K=" + std::to_string(k) +
                           ", J=" + std::to_string(j) + "; factor estimates may be singular");
  }

  Mat s_r = Mat::Identity(j, j) / std::sqrt(static_cast<double>(j));
  Mat s_l;
  bool have_l = false;
  int sweep = 0;
  for (sweep = 1; sweep <= config.max_iter; ++sweep) {
    Mat next_l = row_factor_update(residuals, factor_inverse(s_r, config.ridge, config.floor_ratio, "S_R"));
    Mat next_r = col_factor_update(residuals, factor_inverse(next_l, config.ridge, config.floor_ratio, "S_L"));
    const double scale = next_r.norm();
    next_r /= scale;
    next_l *= scale;

    const double change =
        have_l ? std::max(relative_change(next_l, s_l), relative_change(next_r, s_r)) : std::numeric_limits<double>::infinity();
    s_l = std::move(next_l);
    s_r = std::move(next_r);
    have_l = true;

    if (config.record_loglik) {
      SeparableCovariance snapshot;
      snapshot.s_l = spd_factorize(s_l, config.floor_ratio);
      snapshot.s_r = spd_factorize(s_r, config.floor_ratio);
      out.loglik_trace.push_back(matrix_normal_loglik(epochs, snapshot));
    }
    if (change < config.tol) {
      out.converged = true;
      break;
    }
  }
  out.iterations = std::min(sweep, config.max_iter);

  // Re-evaluate both updates at the returned pair.
  const Mat l_again = row_factor_update(residuals, factor_inverse(s_r, config.ridge, config.floor_ratio, "S_R"));
  const Mat r_again = col_factor_update(residuals, factor_inverse(s_l, config.ridge, config.floor_ratio, "S_L"));
  out.fixed_point_residual = std::max(relative_change(l_again, s_l), relative_change(r_again, s_r));

  out.s_l = spd_factorize(s_l, config.floor_ratio);
  out.s_r = spd_factorize(s_r, config.floor_ratio);
  return out;
}

Mat assemble_full(const SeparableCovariance& cov) { return kron(cov.s_l.matrix(), cov.s_r.matrix()); }

double matrix_normal_loglik(const EpochSet& epochs, const SeparableCovariance& cov) {
  epochs.validate();
  if (cov.rows() != epochs.rows || cov.cols() != epochs.cols) {
    throw validation_error("dimension_mismatch", "matrix_normal_loglik: covariance and epochs disagree on K or J");
  }
  const std::vector<Mat> residuals = centered_residuals(epochs);
  const double k = static_cast<double>(epochs.rows);
  const double j = static_cast<double>(epochs.cols);
  const double log_det = j * cov.s_l.log_det() + k * cov.s_r.log_det();
  const double per_trial_const = -0.5 * k * j * std::log(2.0 * std::numbers::pi) - 0.5 * log_det;

  const SpdFactor col_metric = cov.s_r.inverted();
  const SpdFactor row_metric = cov.s_l.inverted();
  double total = 0.0;
  for (const Mat& r : residuals) {
    total += per_trial_const - 0.5 * matrix_inner(r, r, col_metric, row_metric);
  }
  return total;
}

}  // namespace mvlda
