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

#include <doctest.h>

#include <cmath>

#include "mvlda/discriminant.hpp"
#include "mvlda/error.hpp"
#include "test_support.hpp"

using namespace mvlda;
using namespace mvlda::testing;

namespace {

Mat scalar(double v) {
  Mat m(1, 1);
  m << v;
  return m;
}

Vec flatten(const Mat& x) {
  Vec out(x.size());
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) out[r * x.cols() + c] = x(r, c);
  return out;
}

Mat unflatten(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  Mat out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = v[r * cols + c];
  return out;
}

Mat dense_kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct Fitted {
  EpochSet epochs;
  SeparableCovariance cov;
  DiscriminantModel model;
};

Fitted fitted(Eigen::Index k, Eigen::Index j, std::size_t n, std::uint64_t seed) {
  Fitted f;
  f.epochs = random_epochs(k, j, n, n, seed);
  f.cov = flip_flop(f.epochs);
  f.model = fit(f.epochs, f.cov);
  return f;
}

/// Squared singular values of the whitened difference, computed on the
/// dense KJ x KJ within-class covariance.
Vec dense_eigenvalues(const Mat& delta, const SeparableCovariance& cov) {
  const Mat s = assemble_full(cov);
  const Mat w = unflatten(dense_power(s, -0.5) * flatten(delta), delta.rows(), delta.cols());
  Eigen::JacobiSVD<Mat> svd(w);
  return svd.singularValues().array().square();
}

}  // namespace

TEST_CASE("fit: scalar Mahalanobis") {
  EpochSet e;
  e.rows = 1;
  e.cols = 1;
  e.trials = {scalar(0), scalar(2), scalar(10), scalar(12)};
  e.labels = {1, 1, 2, 2};
  const SeparableCovariance cov = flip_flop(e);
  const DiscriminantModel m = fit(e, cov);
  REQUIRE(m.rank() == 1);
  CHECK(m.lambda[0] == doctest::Approx(100.0).epsilon(1e-14));
  // Delta = -10: u carries the positive sign, so v absorbs the negative one.
  CHECK(m.u(0, 0) == doctest::Approx(1.0));
  CHECK(m.v(0, 0) == doctest::Approx(-1.0));

  EpochSet swapped = e;
  swapped.labels = {2, 2, 1, 1};
  const DiscriminantModel ms = fit(swapped, flip_flop(swapped));
  CHECK(ms.lambda[0] == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(ms.u(0, 0) == doctest::Approx(1.0));
  CHECK(ms.v(0, 0) == doctest::Approx(1.0));

  const MahalanobisDecomposition md = mahalanobis_decomposition(m);
  CHECK(md.total == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(approx_error(m, 0) == doctest::Approx(100.0));
  CHECK(approx_error(m, 1) == 0.0);
}

TEST_CASE("fit: equal means give an empty model") {
  EpochSet e = random_epochs(3, 4, 6, 6, 3);
  for (std::size_t i = 0; i < 6; ++i) e.trials[6 + i] = e.trials[i];
  const SeparableCovariance cov = flip_flop(e);
  const DiscriminantModel m = fit(e, cov);
  CHECK(m.rank() == 0);
  CHECK(m.u.cols() == 0);
  CHECK(mahalanobis_decomposition(m).total == 0.0);
  CHECK(approx_error(m, 0) == 0.0);
  CHECK(rank_r_reconstruct(m, 0).norm() == 0.0);
  CHECK(scores_vec(e.trials[0], m).size() == 0);
}

TEST_CASE("fit: dimension mismatch and range errors") {
  const Fitted f = fitted(3, 4, 10, 8);
  const SeparableCovariance other = flip_flop(random_epochs(4, 3, 10, 10, 9));
  CHECK_THROWS_AS(fit(f.epochs, other), Error);
  CHECK_THROWS_AS(scores_vec(Mat::Zero(4, 3), f.model), Error);
  CHECK_THROWS_AS(row_coordinates(Mat::Zero(2, 4), f.model), Error);
  CHECK_THROWS_AS(col_coordinates(Mat::Zero(3, 5), f.model), Error);
  CHECK_THROWS_AS(approx_error(f.model, f.model.rank() + 1), Error);
  CHECK_THROWS_AS(approx_error(f.model, -1), Error);
  CHECK_THROWS_AS(rank_r_reconstruct(f.model, f.model.rank() + 1), Error);
}

TEST_CASE("fit: model invariants on seeded instances") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(seed % 4);
    const Eigen::Index j = 2 + static_cast<Eigen::Index>((seed * 7) % 5);
    const Fitted f = fitted(k, j, 25, seed * 13);
    const DiscriminantModel& m = f.model;
    REQUIRE(m.rank() == std::min(k, j));
    const Eigen::Index q = m.rank();
    const Mat delta = m.delta();

    // Orthonormality in the metrics.
    CHECK((m.u.transpose() * m.metric_d.matrix() * m.u - Mat::Identity(q, q)).norm() < 1e-10);
    CHECK((m.v.transpose() * m.metric_m.matrix() * m.v - Mat::Identity(q, q)).norm() < 1e-10);

    // Metrics are the inverses of the fitted factors.
    const Mat kron_metric = dense_kron(m.metric_d.matrix(), m.metric_m.matrix());
    CHECK(rel_fro(kron_metric, assemble_full(f.cov).inverse()) < 1e-9);

    // Reconstruction and duality.
    Mat recon = Mat::Zero(k, j);
    for (Eigen::Index i = 0; i < q; ++i) recon += std::sqrt(m.lambda[i]) * m.u.col(i) * m.v.col(i).transpose();
    CHECK(rel_fro(recon, delta) < 1e-10);
    const Vec inv_sqrt = m.lambda.array().rsqrt();
    CHECK(rel_fro(delta.transpose() * m.metric_d.matrix() * m.u * inv_sqrt.asDiagonal(), m.v) < 1e-9);
    CHECK(rel_fro(delta * m.metric_m.matrix() * m.v * inv_sqrt.asDiagonal(), m.u) < 1e-9);

    // Descending positive eigenvalues.
    for (Eigen::Index i = 0; i < q; ++i) {
      CHECK(m.lambda[i] > 0.0);
      if (i > 0) CHECK(m.lambda[i] <= m.lambda[i - 1]);
    }

    // Score separation.
    const Vec gap = scores_vec(m.mean1, m) - scores_vec(m.mean2, m);
    for (Eigen::Index i = 0; i < q; ++i) CHECK(rel(gap[i], std::sqrt(m.lambda[i])) < 1e-10);
    CHECK(scores_vec(Mat::Zero(k, j), m).norm() == 0.0);

    // Pythagoras across the four formulations.
    const double dense_total = flatten(delta).dot(assemble_full(f.cov).inverse() * flatten(delta));
    const MahalanobisDecomposition md = mahalanobis_decomposition(m);
    CHECK(rel(md.total, m.lambda.sum()) < 1e-10);
    CHECK(rel(approx_error(m, 0), md.total) < 1e-10);
    CHECK(rel(matrix_inner(delta, delta, m.metric_m, m.metric_d), md.total) < 1e-10);
    CHECK(rel(dense_total, md.total) < 1e-9);

    // Approximation error equals the residual norm at every rank.
    for (Eigen::Index r = 0; r <= q; ++r) {
      const Mat resid = delta - rank_r_reconstruct(m, r);
      const double norm2 = matrix_inner(resid, resid, m.metric_m, m.metric_d);
      const double tail = m.lambda.tail(q - r).sum();
      CHECK(std::abs(norm2 - approx_error(m, r)) <= 1e-10 * md.total);
      CHECK(std::abs(tail - approx_error(m, r)) <= 1e-12 * md.total);
    }
    CHECK(rank_r_reconstruct(m, 0).norm() == 0.0);
    CHECK(rel_fro(rank_r_reconstruct(m, q), delta) < 1e-10);

    // Row and column coordinates of the difference.
    const Mat rows = row_coordinates(delta, m);
    const Mat cols = col_coordinates(delta, m);
    for (Eigen::Index i = 0; i < q; ++i) {
      CHECK(rel_fro(rows.col(i), std::sqrt(m.lambda[i]) * m.u.col(i)) < 1e-9);
      CHECK(rel_fro(cols.col(i), std::sqrt(m.lambda[i]) * m.v.col(i)) < 1e-9);
    }
  }
}

TEST_CASE("scores_vec: dense Kronecker oracle on 4x5 inputs") {
  const Fitted f = fitted(4, 5, 30, 99);
  const DiscriminantModel& m = f.model;
  const Mat metric = dense_kron(m.metric_d.matrix(), m.metric_m.matrix());
  for (std::uint64_t s = 0; s < 8; ++s) {
    const Mat x = random_mat(4, 5, 500 + s);
    const Vec got = scores_vec(x, m);
    for (Eigen::Index q = 0; q < m.rank(); ++q) {
      const Vec axis = dense_kron(m.u.col(q), m.v.col(q));
      const double expected = flatten(x).dot(metric * axis);
      CHECK(std::abs(got[q] - expected) <= 1e-10 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("oracle equivalence: eigenvalues match dense whitening") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(seed % 4);
    const Eigen::Index j = 2 + static_cast<Eigen::Index>((seed * 5) % 5);
    if (k * j > 30) continue;
    const Fitted f = fitted(k, j, 20, seed * 31);
    const Vec expected = dense_eigenvalues(f.model.delta(), f.cov);
    REQUIRE(f.model.rank() <= expected.size());
    for (Eigen::Index q = 0; q < f.model.rank(); ++q) CHECK(rel(f.model.lambda[q], expected[q]) < 1e-9);

    const BruteForceResult bf = brute_force_discriminant(f.epochs);
    REQUIRE(bf.lambda.size() == f.model.rank());
    for (Eigen::Index q = 0; q < bf.lambda.size(); ++q) CHECK(rel(bf.lambda[q], f.model.lambda[q]) < 1e-9);
  }
}

TEST_CASE("fit: rescaling leaves every field unchanged") {
  for (const double kappa : {1e-3, 0.5, 7.0, 1e4}) {
    const Fitted f = fitted(4, 3, 20, 17);
    const DiscriminantModel alt = fit(f.epochs, rescaled(f.cov, kappa));
    CHECK(rel_fro(alt.u, f.model.u) < 1e-10);
    CHECK(rel_fro(alt.v, f.model.v) < 1e-10);
    CHECK(rel_fro(alt.lambda, f.model.lambda) < 1e-10);
    CHECK(rel_fro(alt.metric_m.matrix(), f.model.metric_m.matrix()) < 1e-10);
    CHECK(rel_fro(alt.metric_d.matrix(), f.model.metric_d.matrix()) < 1e-10);
  }
}

TEST_CASE("coordinates: identity metrics") {
  DiscriminantModel m;
  m.mean1 = Mat::Zero(3, 2);
  m.mean2 = Mat::Zero(3, 2);
  m.metric_m = spd_factorize(Mat::Identity(2, 2));
  m.metric_d = spd_factorize(Mat::Identity(3, 3));
  m.u = Mat::Identity(3, 2);
  m.v = Mat::Identity(2, 2);
  m.lambda = Vec::Constant(2, 1.0);
  const double lam = 16.0;
  const Mat x = std::sqrt(lam) * m.u.col(0) * m.v.col(0).transpose();

  const Mat rows = row_coordinates(x, m);
  CHECK(rel_fro(rows.col(0), std::sqrt(lam) * m.u.col(0)) < 1e-15);
  CHECK(rows.col(1).norm() == 0.0);
  const Mat cols = col_coordinates(x, m);
  CHECK(rel_fro(cols.col(0), std::sqrt(lam) * m.v.col(0)) < 1e-15);
  CHECK(cols.col(1).norm() == 0.0);

  CHECK(row_coordinates(Mat::Zero(3, 2), m).norm() == 0.0);
  CHECK(col_coordinates(Mat::Zero(3, 2), m).norm() == 0.0);
}

TEST_CASE("fit: full-rank 28 x 32 model") {
  const EpochSet e = random_epochs(28, 32, 120, 600, 2024, 0.3);
  const SeparableCovariance cov = flip_flop(e);
  const DiscriminantModel m = fit(e, cov);
  CHECK(m.rank() == 28);
  const Mat resid = m.delta() - rank_r_reconstruct(m, 4);
  const double norm2 = matrix_inner(resid, resid, m.metric_m, m.metric_d);
  CHECK(rel(norm2, m.lambda.tail(24).sum()) < 1e-10);
}

TEST_CASE("approx_error: tail sum example") {
  DiscriminantModel m;
  m.mean1 = Mat::Zero(2, 2);
  m.mean1(0, 0) = 3.0;
  m.mean1(1, 1) = 2.0;
  m.mean2 = Mat::Zero(2, 2);
  m.metric_m = spd_factorize(Mat::Identity(2, 2));
  m.metric_d = spd_factorize(Mat::Identity(2, 2));
  m.u = Mat::Identity(2, 2);
  m.v = Mat::Identity(2, 2);
  m.lambda = Vec(2);
  m.lambda << 9.0, 4.0;
  CHECK(approx_error(m, 1) == 4.0);
  CHECK(approx_error(m, 2) == 0.0);
  CHECK(approx_error(m, 0) == 13.0);
  CHECK(mahalanobis_decomposition(m).total == doctest::Approx(13.0));
}
