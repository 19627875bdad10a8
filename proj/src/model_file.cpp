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

#include "mvlda/model_file.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mvlda/bundle.hpp"
#include "mvlda/error.hpp"

namespace mvlda {

using nlohmann::json;

namespace {

json matrix_to_json(const Mat& m) {
  json arr = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
  return arr;
}

Mat matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const char* key) {
  const auto values = j.at(key).get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != rows * cols) {
    throw validation_error("bad_model", std::string("model file: '") + key + "' has " + std::to_string(values.size()) +
                                            " entries, expected " + std::to_string(rows * cols));
  }
  Mat out(rows, cols);
  std::size_t idx = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = values[idx++];
  return out;
}

}  // namespace

std::string serialize_model(const ModelFile& file) {
  const DiscriminantModel& m = file.model;
  json j;
  j["format"] = "mvlda-model";
  j["version"] = kModelVersion;
  j["K"] = m.rows();
  j["J"] = m.cols();
  j["Q"] = m.rank();
  j["n1"] = m.n1;
  j["n2"] = m.n2;
  j["lambda"] = std::vector<double>(m.lambda.data(), m.lambda.data() + m.lambda.size());
  j["U"] = matrix_to_json(m.u);
  j["V"] = matrix_to_json(m.v);
  j["mean1"] = matrix_to_json(m.mean1);
  j["mean2"] = matrix_to_json(m.mean2);
  j["S_L"] = matrix_to_json(file.s_l);
  j["S_R"] = matrix_to_json(file.s_r);
  j["rank_tol"] = file.rank_tol;
  j["flip_flop"] = {
      {"tol", file.flip_flop.tol},
      {"max_iter", file.flip_flop.max_iter},
      {"ridge", file.flip_flop.ridge},
      {"floor_ratio", file.flip_flop.floor_ratio},
      {"iterations", file.iterations},
      {"converged", file.converged},
      {"fixed_point_residual", file.fixed_point_residual},
  };
  j["channel_names"] = file.channel_names;
  j["row_names"] = file.row_names;
  j["sample_rate_hz"] = file.sample_rate_hz ? json(*file.sample_rate_hz) : json(nullptr);
  if (file.wavelet) {
    const WaveletFrontend& w = *file.wavelet;
    const Vec& stat = w.mask.statistic;
    j["wavelet"] = {
        {"filter_taps", w.config.filter_taps},
        {"levels", w.config.levels},
        {"boundary", to_string(w.config.boundary)},
        {"padded_length", w.config.padded_length},
        {"signal_length", w.signal_length},
        {"baseline_samples", w.baseline_samples},
        {"mask",
         {{"total_len", w.mask.total_len},
          {"kept_indices", w.mask.kept_indices},
          {"statistic", std::vector<double>(stat.data(), stat.data() + stat.size())},
          {"threshold", w.mask.threshold}}},
    };
  } else {
    j["wavelet"] = nullptr;
  }
  return j.dump(2) + "\n";
}

ModelFile parse_model(const std::string& text) {
  ModelFile file;
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string()) != "mvlda-model") {
      throw validation_error("bad_model", "model file: not an mvlda-model document");
    }
    if (j.at("version").get<int>() != kModelVersion) {
      throw validation_error("bad_model", "model file: unsupported version " + j.at("version").dump());
    }
    const auto k = j.at("K").get<Eigen::Index>();
    const auto jj = j.at("J").get<Eigen::Index>();
    const auto q = j.at("Q").get<Eigen::Index>();
    if (k <= 0 || jj <= 0 || q < 0 || q > std::min(k, jj)) {
      throw validation_error("bad_model", "model file: inconsistent K, J, Q");
    }

    DiscriminantModel& m = file.model;
    m.n1 = j.at("n1").get<std::size_t>();
    m.n2 = j.at("n2").get<std::size_t>();
    const auto lambda = j.at("lambda").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(lambda.size()) != q) {
      throw validation_error("bad_model", "model file: lambda length differs from Q");
    }
    m.lambda = Eigen::Map<const Vec>(lambda.data(), q);
    m.u = matrix_from_json(j, k, q, "U");
    m.v = matrix_from_json(j, jj, q, "V");
    m.mean1 = matrix_from_json(j, k, jj, "mean1");
    m.mean2 = matrix_from_json(j, k, jj, "mean2");
    file.s_l = matrix_from_json(j, k, k, "S_L");
    file.s_r = matrix_from_json(j, jj, jj, "S_R");
    file.rank_tol = j.at("rank_tol").get<double>();

    const json& ff = j.at("flip_flop");
    file.flip_flop.tol = ff.at("tol").get<double>();
    file.flip_flop.max_iter = ff.at("max_iter").get<int>();
    file.flip_flop.ridge = ff.at("ridge").get<double>();
    file.flip_flop.floor_ratio = ff.at("floor_ratio").get<double>();
    file.iterations = ff.at("iterations").get<int>();
    file.converged = ff.at("converged").get<bool>();
    file.fixed_point_residual = ff.at("fixed_point_residual").get<double>();

    file.channel_names = j.value("channel_names", std::vector<std::string>{});
    file.row_names = j.value("row_names", std::vector<std::string>{});
    if (j.contains("sample_rate_hz") && !j["sample_rate_hz"].is_null()) {
      file.sample_rate_hz = j["sample_rate_hz"].get<double>();
    }

    if (j.contains("wavelet") && !j["wavelet"].is_null()) {
      const json& w = j["wavelet"];
      WaveletFrontend fe;
      fe.config.filter_taps = w.at("filter_taps").get<int>();
      fe.config.levels = w.at("levels").get<int>();
      fe.config.boundary = boundary_from_string(w.at("boundary").get<std::string>());
      fe.config.padded_length = w.at("padded_length").get<std::size_t>();
      fe.config.validate();
      fe.signal_length = w.at("signal_length").get<std::size_t>();
      fe.baseline_samples = w.at("baseline_samples").get<std::size_t>();
      const json& mk = w.at("mask");
      fe.mask.total_len = mk.at("total_len").get<std::size_t>();
      fe.mask.kept_indices = mk.at("kept_indices").get<std::vector<std::size_t>>();
      const auto stat = mk.at("statistic").get<std::vector<double>>();
      fe.mask.statistic = Eigen::Map<const Vec>(stat.data(), static_cast<Eigen::Index>(stat.size()));
      fe.mask.threshold = mk.at("threshold").get<double>();
      if (static_cast<Eigen::Index>(fe.mask.size()) != k || fe.mask.total_len != fe.config.padded_length) {
        throw validation_error("bad_model", "model file: wavelet mask does not match K or padded_length");
      }
      file.wavelet = std::move(fe);
    }
  } catch (const json::exception& e) {
    throw validation_error("bad_model", std::string("model file: ") + e.what());
  }

  const SpdFactor s_l = spd_factorize(file.s_l, file.flip_flop.floor_ratio);
  const SpdFactor s_r = spd_factorize(file.s_r, file.flip_flop.floor_ratio);
  file.model.metric_d = s_l.inverted();
  file.model.metric_m = s_r.inverted();
  return file;
}

void save_model(const std::filesystem::path& path, const ModelFile& file) {
  ensure_parent_directory(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw validation_error("unwritable_file", "cannot write " + path.string());
  out << serialize_model(file);
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("unreadable_model", "cannot open model " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace mvlda
