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

#include "mvlda/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvlda/error.hpp"

namespace mvlda {

double NormalStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double x = 0.0;
  double y = 0.0;
  double s = 0.0;
  do {
    x = 2.0 * uniform() - 1.0;
    y = 2.0 * uniform() - 1.0;
    s = x * x + y * y;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = y * f;
  has_spare_ = true;
  return x * f;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

EpochSet sample_matrix_normal(const MatrixNormalSpec& spec) {
  const Eigen::Index k = spec.mu1.rows();
  const Eigen::Index j = spec.mu1.cols();
  if (spec.n1 < 1 || spec.n2 < 1) {
    throw validation_error("empty_class", "sample_matrix_normal: n1 and n2 must be >= 1");
  }
  if (spec.mu2.rows() != k || spec.mu2.cols() != j || spec.sigma_l.dim() != k || spec.sigma_r.dim() != j) {
    throw validation_error("dimension_mismatch", "sample_matrix_normal: means and factors disagree on K or J");
  }

  EpochSet out;
  out.rows = k;
  out.cols = j;
  const std::size_t n = spec.n1 + spec.n2;
  out.trials.reserve(n);
  out.labels.reserve(n);
  Mat z(k, j);
  for (std::size_t i = 0; i < n; ++i) {
    NormalStream stream(mix_seed(spec.seed, i));
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < j; ++c) z(r, c) = stream.next();
    const bool first = i < spec.n1;
    out.trials.push_back((first ? spec.mu1 : spec.mu2) + spec.sigma_l.sqrt() * z * spec.sigma_r.sqrt());
    out.labels.push_back(first ? 1 : 2);
  }
  return out;
}

Mat ar1_matrix(Eigen::Index dim, double rho) {
  Mat out(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b) out(a, b) = std::pow(rho, static_cast<double>(std::abs(a - b)));
  return out;
}

Mat planted_difference(const std::vector<double>& lambda, const SpdFactor& sigma_l, const SpdFactor& sigma_r,
                       std::uint64_t seed) {
  const Eigen::Index k = sigma_l.dim();
  const Eigen::Index j = sigma_r.dim();
  const Eigen::Index q = static_cast<Eigen::Index>(lambda.size());
  if (q > std::min(k, j)) {
    throw validation_error("too_many_components", "planted_difference: " + std::to_string(q) +
                                                      " planted values exceed min(K, J) = " +
                                                      std::to_string(std::min(k, j)));
  }
  for (double l : lambda) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw validation_error("invalid_lambda", "planted_difference: planted values must be positive and finite");
    }
  }
  if (q == 0) return Mat::Zero(k, j);

  NormalStream stream(mix_seed(seed, std::numeric_limits<std::uint64_t>::max()));
  auto orthonormal = [&stream, q](Eigen::Index dim) {
    Mat g(dim, q);
    for (Eigen::Index c = 0; c < q; ++c)
      for (Eigen::Index r = 0; r < dim; ++r) g(r, c) = stream.next();
    Eigen::HouseholderQR<Mat> qr(g);
    return Mat(qr.householderQ() * Mat::Identity(dim, q));
  };
  const Mat u = sigma_l.sqrt() * orthonormal(k);
  const Mat v = sigma_r.sqrt() * orthonormal(j);

  Mat delta = Mat::Zero(k, j);
  for (Eigen::Index c = 0; c < q; ++c) delta += std::sqrt(lambda[static_cast<std::size_t>(c)]) * u.col(c) * v.col(c).transpose();
  return delta;
}

BruteForceResult brute_force_discriminant(const EpochSet& epochs, const FlipFlopConfig& config) {
  const Eigen::Index k = epochs.rows;
  const Eigen::Index j = epochs.cols;
  if (k * j > kBruteForceMaxDim) {
    throw validation_error("too_large", "brute_force_discriminant: K*J = " + std::to_string(k * j) +
                                            " exceeds the dense limit " + std::to_string(kBruteForceMaxDim));
  }
  const SeparableCovariance cov = flip_flop(epochs, config);
  const ClassMeans means = class_means(epochs);
  const Vec delta = vec_t(means.mean1 - means.mean2);

  // Dense S_W and its powers from one eigendecomposition of the full matrix.
  const Mat s_w = assemble_full(cov);
  Eigen::SelfAdjointEigenSolver<Mat> eig(s_w);
  const Vec ev = eig.eigenvalues();
  const Mat& basis = eig.eigenvectors();
  const Mat s_inv = basis * ev.cwiseInverse().asDiagonal() * basis.transpose();
  const Mat s_inv_sqrt = basis * ev.cwiseSqrt().cwiseInverse().asDiagonal() * basis.transpose();
  const Mat s_sqrt = basis * ev.cwiseSqrt().asDiagonal() * basis.transpose();

  BruteForceResult out;
  out.total = delta.dot(s_inv * delta);

  const Mat w = unvec_t(s_inv_sqrt * delta, k, j);
  const bool rows_small = k <= j;
  const Mat gram = rows_small ? Mat(w * w.transpose()) : Mat(w.transpose() * w);
  Eigen::SelfAdjointEigenSolver<Mat> geig(gram);
  const Vec gvals = geig.eigenvalues().reverse();
  const Mat gvecs = geig.eigenvectors().rowwise().reverse();

  const double lmax = gvals.size() > 0 ? gvals[0] : 0.0;
  const double cutoff = 10.0 * static_cast<double>(k * j) * std::numeric_limits<double>::epsilon() * lmax;
  Eigen::Index rank = 0;
  while (lmax > 0.0 && rank < gvals.size() && gvals[rank] > cutoff) ++rank;

  out.lambda = gvals.head(rank);
  for (Eigen::Index q = 0; q < rank; ++q) {
    const double sigma = std::sqrt(gvals[q]);
    Vec left;
    Vec right;
    if (rows_small) {
      left = gvecs.col(q);
      right = w.transpose() * left / sigma;
    } else {
      right = gvecs.col(q);
      left = w * right / sigma;
    }
    const double sign = canonical_sign(left);
    out.axes.push_back(s_sqrt * vec_t(sign * left * right.transpose()));
  }
  return out;
}

}  // namespace mvlda
