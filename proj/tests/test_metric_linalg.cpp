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

#include "mvlda/error.hpp"
#include "mvlda/metric_linalg.hpp"
#include "test_support.hpp"

using namespace mvlda;
using namespace mvlda::testing;

TEST_CASE("spd_factorize: identity and diagonal") {
  const SpdFactor id = spd_factorize(Mat::Identity(3, 3), 1e-10);
  CHECK(rel_fro(id.sqrt(), Mat::Identity(3, 3)) < 1e-15);
  CHECK(rel_fro(id.inv_sqrt(), Mat::Identity(3, 3)) < 1e-15);
  CHECK(rel_fro(id.inverse(), Mat::Identity(3, 3)) < 1e-15);

  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const SpdFactor f = spd_factorize(d);
  Mat sqrt_expected = Mat::Zero(2, 2);
  sqrt_expected(0, 0) = 2.0;
  sqrt_expected(1, 1) = 3.0;
  Mat inv_expected = Mat::Zero(2, 2);
  inv_expected(0, 0) = 0.25;
  inv_expected(1, 1) = 1.0 / 9.0;
  CHECK(rel_fro(f.sqrt(), sqrt_expected) < 1e-15);
  CHECK(rel_fro(f.inverse(), inv_expected) < 1e-15);
  CHECK_FALSE(f.floored());
}

TEST_CASE("spd_factorize: random SPD satisfies all factor identities") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Mat a = random_spd(5, seed);
    const SpdFactor f = spd_factorize(a);
    const Mat id = Mat::Identity(5, 5);
    CHECK((f.sqrt() * f.sqrt() - a).norm() < 1e-10 * a.norm());
    CHECK(rel_fro(f.inv_sqrt() * f.sqrt(), id) < 1e-10);
    CHECK(rel_fro(f.matrix() * f.inverse(), id) < 1e-10);
    CHECK(relative_asymmetry(f.matrix()) < 1e-12);
    CHECK(f.eigenvalues().minCoeff() >= f.eigen_floor());
    CHECK(f.eigen_floor() > 0.0);
    // Reconstruction is idempotent above the floor.
    CHECK(rel_fro(spd_factorize(f.matrix()).matrix(), f.matrix()) < 1e-14);
    CHECK(f.log_det() == doctest::Approx(std::log(a.determinant())).epsilon(1e-12));
  }
}

TEST_CASE("spd_factorize: flooring and inversion") {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1e-14;
  const SpdFactor f = spd_factorize(a, 1e-10);
  CHECK(f.floored());
  CHECK(f.raw_min_eigenvalue() == doctest::Approx(1e-14));
  CHECK(f.eigenvalues().minCoeff() == doctest::Approx(1e-10));
  CHECK(f.matrix()(1, 1) == doctest::Approx(1e-10));
  CHECK(rel_fro(f.matrix() * f.inverse(), Mat::Identity(2, 2)) < 1e-10);

  const SpdFactor g = spd_factorize(random_spd(4, 7));
  const SpdFactor h = g.inverted();
  CHECK(rel_fro(h.matrix(), g.inverse()) == 0.0);
  CHECK(rel_fro(h.sqrt(), g.inv_sqrt()) == 0.0);
  CHECK(h.log_det() == doctest::Approx(-g.log_det()));
}

TEST_CASE("spd_factorize: error paths") {
  CHECK_THROWS_AS(spd_factorize(Mat::Identity(2, 3)), Error);
  Mat asym = Mat::Identity(2, 2);
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(spd_factorize(asym), Error);
  CHECK_THROWS_AS(spd_factorize(-Mat::Identity(3, 3)), Error);
  try {
    spd_factorize(-Mat::Identity(3, 3));
  } catch (const Error& e) {
    CHECK(e.code() == "not_positive_definite");
    CHECK(e.kind() == ErrorKind::Numerical);
  }
}

TEST_CASE("matrix_inner: examples") {
  const SpdFactor id = spd_factorize(Mat::Identity(2, 2));
  CHECK(matrix_inner(Mat::Identity(2, 2), Mat::Identity(2, 2), id, id) == doctest::Approx(2.0));
  Mat x(2, 2);
  x << 1, 2, 3, 4;
  CHECK(matrix_inner(x, x, id, id) == doctest::Approx(30.0));
  const SpdFactor two = spd_factorize(2.0 * Mat::Identity(2, 2));
  CHECK(matrix_inner(x, x, two, id) == doctest::Approx(60.0));
  CHECK_THROWS_AS(matrix_inner(x, Mat::Zero(3, 2), id, id), Error);
}

TEST_CASE("matrix_inner: bilinear, symmetric, positive; vec_t/Kronecker equivalence") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Mat x = random_mat(3, 4, seed * 11);
    const Mat y = random_mat(3, 4, seed * 11 + 1);
    const Mat z = random_mat(3, 4, seed * 11 + 2);
    const SpdFactor m = spd_factorize(random_spd(4, seed * 11 + 3));
    const SpdFactor d = spd_factorize(random_spd(3, seed * 11 + 4));

    const double xy = matrix_inner(x, y, m, d);
    CHECK(rel(xy, matrix_inner(y, x, m, d)) < 1e-12);
    CHECK(rel(matrix_inner(2.0 * x + z, y, m, d), 2.0 * xy + matrix_inner(z, y, m, d)) < 1e-12);
    CHECK(matrix_inner(x, x, m, d) > 0.0);
    CHECK(matrix_inner(Mat::Zero(3, 4), Mat::Zero(3, 4), m, d) == 0.0);

    // Dense route: vec_t(X)' (D (x) M) vec_t(Y).
    const double dense = vec_t(x).dot(kron(d.matrix(), m.matrix()) * vec_t(y));
    CHECK(rel(xy, dense) < 1e-12);
  }
}

TEST_CASE("vec_t: row-major flattening") {
  Mat x(2, 2);
  x << 1, 2, 3, 4;
  const Vec v = vec_t(x);
  REQUIRE(v.size() == 4);
  CHECK(v[0] == 1);
  CHECK(v[1] == 2);
  CHECK(v[2] == 3);
  CHECK(v[3] == 4);

  Mat row(1, 3);
  row << 5, 6, 7;
  CHECK(vec_t(row) == Vec(Eigen::Vector3d(5, 6, 7)));

  const Mat r = random_mat(3, 5, 99);
  CHECK(unvec_t(vec_t(r), 3, 5) == r);
  CHECK_THROWS_AS(unvec_t(vec_t(r), 4, 4), Error);
}

TEST_CASE("kron: examples and mixed product") {
  Mat a(1, 1), b(1, 1);
  a << 2;
  b << 3;
  CHECK(kron(a, b)(0, 0) == 6.0);

  const Mat blk = random_mat(2, 3, 5);
  const Mat k = kron(Mat::Identity(2, 2), blk);
  CHECK(k.rows() == 4);
  CHECK(k.cols() == 6);
  CHECK(k.block(0, 0, 2, 3) == blk);
  CHECK(k.block(2, 3, 2, 3) == blk);
  CHECK(k.block(0, 3, 2, 3).isZero(0));
  CHECK(k.block(2, 0, 2, 3).isZero(0));

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Mat p = random_mat(2, 2, seed), q = random_mat(2, 2, seed + 100);
    const Mat r = random_mat(2, 2, seed + 200), s = random_mat(2, 2, seed + 300);
    CHECK(rel_fro(kron(p, q) * kron(r, s), kron(p * r, q * s)) < 1e-13);
  }
}

TEST_CASE("metric_svd: diagonal case with identity metrics") {
  Mat delta = Mat::Zero(2, 3);
  delta(0, 0) = 3.0;
  delta(1, 1) = 2.0;
  const SpdFactor m = spd_factorize(Mat::Identity(3, 3));
  const SpdFactor d = spd_factorize(Mat::Identity(2, 2));
  const MetricSvd svd = metric_svd(delta, m, d, default_rank_tol(2, 3));
  REQUIRE(svd.rank() == 2);
  CHECK(svd.lambda[0] == doctest::Approx(9.0));
  CHECK(svd.lambda[1] == doctest::Approx(4.0));
  CHECK(rel_fro(svd.u, Mat::Identity(2, 2)) < 1e-14);
  CHECK(rel_fro(svd.v, Mat::Identity(3, 2)) < 1e-14);
}

TEST_CASE("metric_svd: zero difference has rank 0") {
  const SpdFactor m = spd_factorize(random_spd(3, 1));
  const SpdFactor d = spd_factorize(random_spd(2, 2));
  const MetricSvd svd = metric_svd(Mat::Zero(2, 3), m, d, 1e-12);
  CHECK(svd.rank() == 0);
  CHECK(svd.u.cols() == 0);
  CHECK(svd.v.cols() == 0);
}

TEST_CASE("metric_svd: reconstruction, orthonormality, eigenproblems, duality") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Mat delta = random_mat(4, 5, seed * 7);
    const SpdFactor m = spd_factorize(random_spd(5, seed * 7 + 1));
    const SpdFactor d = spd_factorize(random_spd(4, seed * 7 + 2));
    const MetricSvd svd = metric_svd(delta, m, d, default_rank_tol(4, 5));
    REQUIRE(svd.rank() == 4);

    const Mat recon = svd.u * svd.lambda.cwiseSqrt().asDiagonal() * svd.v.transpose();
    CHECK((recon - delta).norm() < 1e-10 * delta.norm());
    CHECK(rel_fro(svd.u.transpose() * d.matrix() * svd.u, Mat::Identity(4, 4)) < 1e-10);
    CHECK(rel_fro(svd.v.transpose() * m.matrix() * svd.v, Mat::Identity(4, 4)) < 1e-10);

    const Mat left_op = delta * m.matrix() * delta.transpose() * d.matrix();
    const Mat right_op = delta.transpose() * d.matrix() * delta * m.matrix();
    for (Eigen::Index q = 0; q < svd.rank(); ++q) {
      CHECK((left_op * svd.u.col(q) - svd.lambda[q] * svd.u.col(q)).norm() <
            1e-9 * svd.lambda[q] * svd.u.col(q).norm());
      CHECK((right_op * svd.v.col(q) - svd.lambda[q] * svd.v.col(q)).norm() <
            1e-9 * svd.lambda[q] * svd.v.col(q).norm());
      if (q + 1 < svd.rank()) CHECK(svd.lambda[q] >= svd.lambda[q + 1]);
      CHECK(svd.lambda[q] > 0.0);
    }

    const Mat v_dual = delta.transpose() * d.matrix() * svd.u * svd.lambda.cwiseSqrt().cwiseInverse().asDiagonal();
    CHECK(rel_fro(v_dual, svd.v) < 1e-9);

    // Sign convention on whitened left vectors.
    const Mat whitened_u = d.sqrt() * svd.u;
    for (Eigen::Index q = 0; q < svd.rank(); ++q) CHECK(canonical_sign(whitened_u.col(q)) > 0.0);
  }
}

TEST_CASE("metric_svd: full-rank 28 x 32 difference gives Q = 28") {
  const Mat delta = random_mat(28, 32, 2024);
  const SpdFactor m = spd_factorize(random_spd(32, 1));
  const SpdFactor d = spd_factorize(random_spd(28, 2));
  const MetricSvd svd = metric_svd(delta, m, d, default_rank_tol(28, 32));
  CHECK(svd.rank() == 28);
}

TEST_CASE("metric_svd: rank-deficient difference and error paths") {
  const Mat delta = random_mat(4, 1, 3) * random_mat(1, 5, 4) + random_mat(4, 1, 5) * random_mat(1, 5, 6);
  const SpdFactor m = spd_factorize(random_spd(5, 8));
  const SpdFactor d = spd_factorize(random_spd(4, 9));
  CHECK(metric_svd(delta, m, d, default_rank_tol(4, 5)).rank() == 2);
  CHECK_THROWS_AS(metric_svd(delta, m, d, 0.0), Error);
  CHECK_THROWS_AS(metric_svd(delta, d, m, 1e-12), Error);
}

TEST_CASE("canonical_sign: largest magnitude, lowest index on ties") {
  CHECK(canonical_sign(Vec(Eigen::Vector3d(0.1, -0.9, 0.5))) < 0.0);
  CHECK(canonical_sign(Vec(Eigen::Vector3d(-0.5, 0.5, 0.1))) < 0.0);
  CHECK(canonical_sign(Vec(Eigen::Vector3d(0.5, -0.5, 0.1))) > 0.0);
}
