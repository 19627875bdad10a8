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

// Epoch bundle on disk: a JSON manifest (foo.json) plus a raw payload
// (foo.f64) of n*K*J little-endian IEEE-754 doubles, trial-major, each
// trial stored row-major (vec_t order).
//
// Manifest keys: format ("mvlda-epochs"), version (1), n, K, J, labels
// (array of 1|2), channel_names, row_names, payload (file name relative to
// the manifest), and optionally sample_rate_hz and generator_info.
//
// CSV import reads long format with header "trial,row,col,value,label";
// indices are 0-based and every (trial, row, col) cell must appear once.

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "mvlda/separable_covariance.hpp"

namespace mvlda {

inline constexpr int kBundleVersion = 1;

struct BundleMeta {
  std::optional<double> sample_rate_hz;
  nlohmann::json generator_info;  // null when absent
};

struct LoadedEpochs {
  EpochSet epochs;
  BundleMeta meta;
};

/// Payload path for a manifest path: same stem, ".f64" extension.
/// Creates missing parent directories of an output file.
void ensure_parent_directory(const std::filesystem::path& file);

std::filesystem::path payload_path_for(const std::filesystem::path& manifest);

void save_epochs(const std::filesystem::path& manifest, const EpochSet& epochs, const BundleMeta& meta = {});

/// Loads a bundle manifest, or a long-format CSV when the path ends in ".csv".
LoadedEpochs load_epochs_with_meta(const std::filesystem::path& path);
EpochSet load_epochs(const std::filesystem::path& path);

EpochSet load_epochs_csv(const std::filesystem::path& path);

/// Reads a headerless numeric CSV matrix (used for factor files).
Mat load_matrix_csv(const std::filesystem::path& path);

}  // namespace mvlda
