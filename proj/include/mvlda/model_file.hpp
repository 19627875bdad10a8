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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mvlda/discriminant.hpp"
#include "mvlda/wavelet.hpp"

namespace mvlda {

inline constexpr int kModelVersion = 1;

/// Everything `fit` persists. Matrices are stored row-major in JSON.
struct ModelFile {
  DiscriminantModel model;
  Mat s_l;  // K x K
  Mat s_r;  // J x J
  FlipFlopConfig flip_flop;
  int iterations = 0;
  bool converged = false;
  double fixed_point_residual = 0.0;
  double rank_tol = 0.0;
  std::vector<std::string> channel_names;
  std::vector<std::string> row_names;
  std::optional<double> sample_rate_hz;
  std::optional<WaveletFrontend> wavelet;
  std::vector<std::string> warnings;  // estimation warnings, not persisted
};

std::string serialize_model(const ModelFile& file);
ModelFile parse_model(const std::string& text);

void save_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace mvlda
