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

// Seeded matrix-normal sampling and a dense discriminant oracle.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mvlda/separable_covariance.hpp"

namespace mvlda {

/// Standard normal stream with a platform-independent sequence:
/// std::mt19937_64 (fully specified by the standard), 53-bit uniforms and
/// the Marsaglia polar method. std::normal_distribution is avoided because
/// its algorithm is implementation-defined.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();
  double uniform();  // [0, 1)

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Identifier recorded in bundle manifests.
inline constexpr const char* kGeneratorName = "mt19937_64+polar/splitmix64-trial-seeds";

/// SplitMix64 finalizer, used to derive independent per-trial seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct MatrixNormalSpec {
  Mat mu1;  // K x J
  Mat mu2;
  SpdFactor sigma_l;  // K x K
  SpdFactor sigma_r;  // J x J, unit Frobenius norm
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::uint64_t seed = 0;
};

/// Trial i (class 1 first, then class 2) is mu_c + sqrt(S_L) Z sqrt(S_R)
/// with Z drawn from NormalStream(mix_seed(seed, i)).
EpochSet sample_matrix_normal(const MatrixNormalSpec& spec);

/// AR(1) correlation matrix rho^|i-j|.
Mat ar1_matrix(Eigen::Index dim, double rho);

/// Mean difference sum_q sqrt(lambda_q) u_q v_q' with u_q orthonormal under
/// inv(S_L) and v_q orthonormal under inv(S_R), directions drawn from seed.
/// The planted lambda are therefore the exact metric eigenvalues.
Mat planted_difference(const std::vector<double>& lambda, const SpdFactor& sigma_l, const SpdFactor& sigma_r,
                       std::uint64_t seed);

struct BruteForceResult {
  Vec lambda;              // non-increasing
  std::vector<Vec> axes;   // u_q (x) v_q as dense KJ-vectors
  double total = 0.0;      // vec_t(Delta)' inv(S_W) vec_t(Delta)
};

inline constexpr Eigen::Index kBruteForceMaxDim = 400;

/// Dense vectorized route: flip-flop for S_W, explicit KJ x KJ inverse
/// square root of S_L (x) S_R, eigenproblem of the whitened difference.
BruteForceResult brute_force_discriminant(const EpochSet& epochs, const FlipFlopConfig& config = {});

}  // namespace mvlda
