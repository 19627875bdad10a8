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

// The `mvlda` command verbs as library calls. Each verb writes its files and
// reports progress on `out` (key=value lines) and warnings on `err`.
// Failures throw mvlda::Error.
//
// Output arguments are path prefixes: "<prefix>.csv" and "<prefix>.svg"
// (a trailing .csv or .svg on the prefix is ignored).

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mvlda/model_file.hpp"

namespace mvlda {

struct SimulateOptions {
  Eigen::Index rows = 0;  // K
  Eigen::Index cols = 0;  // J
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::uint64_t seed = 0;
  std::vector<double> planted_lambda;
  double row_rho = 0.5;  // AR(1) row factor unless row_cov_file is given
  double col_rho = 0.3;
  std::filesystem::path row_cov_file;
  std::filesystem::path col_cov_file;
  std::optional<double> sample_rate_hz;
  std::filesystem::path out;  // manifest path
};

struct FitOptions {
  std::filesystem::path bundle;
  std::filesystem::path out;  // model path
  FlipFlopConfig flip_flop;
  double rank_tol = 0.0;  // 0 selects max(K, J) * 1e-12
  bool wavelet = false;
  WaveletConfig wavelet_config;   // padded_length 0 selects the default
  std::size_t baseline_samples = 0;
};

enum class ComponentDomain { Row, Col, Time };

ComponentDomain domain_from_string(const std::string& s);

struct ComponentsOptions {
  std::filesystem::path model;
  std::filesystem::path out;
  std::vector<int> components;  // 1-based; empty selects 1..min(3, Q)
  ComponentDomain domain = ComponentDomain::Col;
};

struct ProjectOptions {
  std::filesystem::path model;
  std::filesystem::path bundle;
  std::filesystem::path out;
  std::vector<int> axes;  // 1-based; empty selects 1..min(2, Q)
};

void cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);
void cmd_fit(const FitOptions& opts, std::ostream& out, std::ostream& err);
void cmd_scree(const std::filesystem::path& model, const std::filesystem::path& out_prefix, std::ostream& out,
               std::ostream& err);
void cmd_project(const ProjectOptions& opts, std::ostream& out, std::ostream& err);
void cmd_components(const ComponentsOptions& opts, std::ostream& out, std::ostream& err);

/// Fit pipeline without file I/O: optional wavelet front end, flip-flop and
/// discriminant fit.
ModelFile fit_model(const EpochSet& epochs, const FitOptions& opts, std::optional<double> sample_rate_hz = {});

/// Advisory elbow of a non-increasing scree: with points (q, lambda_q)
/// scaled to the unit square, p is the point farthest below the chord from
/// the first to the last point, and r = p - 1 components precede it.
/// Returns 0 for an empty scree and 1 when Q < 3.
std::size_t elbow_rank(const Vec& lambda);

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const std::string& suffix);

}  // namespace mvlda
