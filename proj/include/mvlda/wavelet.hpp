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

// Orthogonal periodized Daubechies wavelet transform, coefficient selection
// and synthesis of discriminant time courses.
//
// Coefficient layout after dwt_forward with L levels on N samples:
//   [ a_L (N/2^L) | d_L (N/2^L) | d_{L-1} (N/2^{L-1}) | ... | d_1 (N/2) ]

#pragma once

#include <string>
#include <vector>

#include "mvlda/discriminant.hpp"

namespace mvlda {

enum class Boundary { ZeroPad, Periodic };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

struct WaveletConfig {
  int filter_taps = 8;  // even, 2..20
  int levels = 5;
  Boundary boundary = Boundary::ZeroPad;
  std::size_t padded_length = 1024;

  /// Throws unless the filter exists and padded_length is a multiple of 2^levels.
  void validate() const;
};

/// Smallest multiple of 2^levels that is a power of two and >= length.
std::size_t default_padded_length(std::size_t length, int levels);

/// Daubechies scaling (low-pass) filter with the given number of taps,
/// normalized so that sum h = sqrt(2) and sum h^2 = 1.
const std::vector<double>& daubechies_filter(int taps);

/// High-pass filter g[n] = (-1)^n h[L-1-n].
std::vector<double> quadrature_mirror(const std::vector<double>& h);

/// Pads (or periodically extends) a signal to config.padded_length.
Vec pad_signal(const Vec& signal, const WaveletConfig& config);

Vec dwt_forward(const Vec& signal, const WaveletConfig& config);
Vec dwt_inverse(const Vec& coeffs, const WaveletConfig& config);

struct CoefficientMask {
  std::size_t total_len = 0;
  std::vector<std::size_t> kept_indices;  // strictly increasing
  Vec statistic;                          // per coefficient index
  double threshold = 0.0;

  std::size_t size() const { return kept_indices.size(); }
  /// Kept entries of a full coefficient vector.
  Vec gather(const Vec& full) const;
  /// Full-length vector with values at kept indices, zero elsewhere.
  Vec scatter(const Vec& kept) const;
};

/// statistic[i] = mean |c_i| over all vectors; keeps i with statistic[i]
/// strictly above the mean statistic.
CoefficientMask select_coefficients(const std::vector<Vec>& transformed);

/// Time course of discriminant component q (1-based): the row coordinates
/// sqrt(lambda_q) u_q of Delta, scattered through the mask and synthesized.
/// Returns padded_length samples.
Vec component_waveform(const DiscriminantModel& model, int q, const CoefficientMask& mask,
                       const WaveletConfig& config);

/// Band label of a coefficient index, e.g. "a5[3]" or "d2[17]".
std::string coefficient_label(std::size_t index, const WaveletConfig& config);

/// Time-domain front end: each trial is T x J (samples x channels); every
/// channel is transformed and the masked coefficients form the K rows.
struct WaveletFrontend {
  WaveletConfig config;
  CoefficientMask mask;
  std::size_t signal_length = 0;     // T
  std::size_t baseline_samples = 0;  // 0 disables baseline subtraction

  /// padded_length x J coefficients of one trial.
  Mat full_coefficients(const Mat& trial) const;
  /// K x J retained coefficients of one trial.
  Mat transform(const Mat& trial) const;
  /// Transforms every trial; row_names become coefficient labels.
  EpochSet transform(const EpochSet& time_epochs) const;
};

/// Builds the mask from all trials and channels (labels are not used).
WaveletFrontend fit_wavelet_frontend(const EpochSet& time_epochs, const WaveletConfig& config,
                                     std::size_t baseline_samples = 0);

}  // namespace mvlda
