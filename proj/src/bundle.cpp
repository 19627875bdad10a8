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

#include "mvlda/bundle.hpp"

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>
#include <tuple>
#include <vector>

#include "mvlda/error.hpp"

namespace mvlda {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t to_little(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::little) {
    return bits;
  } else {
    std::uint64_t out = 0;
    for (int b = 0; b < 8; ++b) out |= ((bits >> (8 * b)) & 0xFFu) << (8 * (7 - b));
    return out;
  }
}

void write_f64(std::ostream& os, double value) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof bits);
  bits = to_little(bits);
  unsigned char bytes[8];
  std::memcpy(bytes, &bits, sizeof bytes);
  os.write(reinterpret_cast<const char*>(bytes), sizeof bytes);
}

double read_f64(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, bytes, sizeof bits);
  bits = to_little(bits);  // involution
  double value = 0.0;
  std::memcpy(&value, &bits, sizeof value);
  return value;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("unreadable_file", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  return out;
}

double parse_double(const std::string& text, const fs::path& path, std::size_t line_no) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size()) {
    throw validation_error("parse_error", path.string() + ":" + std::to_string(line_no) + ": cannot parse '" + text + "'");
  }
  return v;
}

long parse_index(const std::string& text, const fs::path& path, std::size_t line_no) {
  const double v = parse_double(text, path, line_no);
  if (v < 0 || v != static_cast<double>(static_cast<long>(v))) {
    throw validation_error("parse_error", path.string() + ":" + std::to_string(line_no) + ": invalid index '" + text + "'");
  }
  return static_cast<long>(v);
}

}  // namespace

void ensure_parent_directory(const fs::path& file) {
  const fs::path parent = file.parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw validation_error("unwritable_file", "cannot create directory " + parent.string() + ": " + ec.message());
}

fs::path payload_path_for(const fs::path& manifest) {
  fs::path p = manifest;
  p.replace_extension(".f64");
  return p;
}

void save_epochs(const fs::path& manifest, const EpochSet& epochs, const BundleMeta& meta) {
  epochs.validate();
  const fs::path payload = payload_path_for(manifest);

  json m;
  m["format"] = "mvlda-epochs";
  m["version"] = kBundleVersion;
  m["n"] = epochs.size();
  m["K"] = epochs.rows;
  m["J"] = epochs.cols;
  m["labels"] = epochs.labels;
  m["channel_names"] = epochs.channel_names;
  m["row_names"] = epochs.row_names;
  m["payload"] = payload.filename().string();
  if (meta.sample_rate_hz) m["sample_rate_hz"] = *meta.sample_rate_hz;
  if (!meta.generator_info.is_null()) m["generator_info"] = meta.generator_info;

  ensure_parent_directory(manifest);
  std::ofstream out(payload, std::ios::binary | std::ios::trunc);
  if (!out) throw validation_error("unwritable_file", "cannot write " + payload.string());
  for (const Mat& t : epochs.trials)
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c) write_f64(out, t(r, c));
  out.close();

  std::ofstream mout(manifest, std::ios::binary | std::ios::trunc);
  if (!mout) throw validation_error("unwritable_file", "cannot write " + manifest.string());
  mout << m.dump(2) << "\n";
}

LoadedEpochs load_epochs_with_meta(const fs::path& path) {
  if (path.extension() == ".csv") return {load_epochs_csv(path), {}};

  json m;
  try {
    m = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw validation_error("parse_error", path.string() + ": invalid manifest JSON (" + e.what() + ")");
  }

  LoadedEpochs loaded;
  EpochSet& epochs = loaded.epochs;
  std::size_t n = 0;
  try {
    if (m.value("format", std::string()) != "mvlda-epochs") {
      throw validation_error("bad_manifest", path.string() + ": not an mvlda-epochs manifest");
    }
    if (m.at("version").get<int>() != kBundleVersion) {
      throw validation_error("bad_version", path.string() + ": unsupported bundle version " + m.at("version").dump());
    }
    n = m.at("n").get<std::size_t>();
    epochs.rows = m.at("K").get<Eigen::Index>();
    epochs.cols = m.at("J").get<Eigen::Index>();
    epochs.labels = m.at("labels").get<std::vector<int>>();
    epochs.channel_names = m.value("channel_names", std::vector<std::string>{});
    epochs.row_names = m.value("row_names", std::vector<std::string>{});
    if (m.contains("sample_rate_hz") && !m["sample_rate_hz"].is_null()) {
      loaded.meta.sample_rate_hz = m["sample_rate_hz"].get<double>();
    }
    if (m.contains("generator_info")) loaded.meta.generator_info = m["generator_info"];
  } catch (const json::exception& e) {
    throw validation_error("bad_manifest", path.string() + ": " + e.what());
  }
  if (epochs.rows <= 0 || epochs.cols <= 0) {
    throw validation_error("invalid_dimensions", path.string() + ": K and J must be positive");
  }
  if (epochs.labels.size() != n) {
    throw validation_error("label_count", path.string() + ": " + std::to_string(epochs.labels.size()) +
                                              " labels for n=" + std::to_string(n));
  }

  fs::path payload = path.parent_path() / m.value("payload", payload_path_for(path).filename().string());
  const std::string bytes = read_text(payload);
  const std::size_t per_trial = static_cast<std::size_t>(epochs.rows * epochs.cols);
  const std::size_t expected = n * per_trial * 8;
  if (bytes.size() != expected) {
    throw validation_error("size_mismatch", payload.string() + ": expected " + std::to_string(expected) +
                                                " bytes, found " + std::to_string(bytes.size()));
  }

  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  epochs.trials.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Mat t(epochs.rows, epochs.cols);
    std::size_t off = i * per_trial * 8;
    for (Eigen::Index r = 0; r < epochs.rows; ++r)
      for (Eigen::Index c = 0; c < epochs.cols; ++c, off += 8) t(r, c) = read_f64(data + off);
    epochs.trials.push_back(std::move(t));
  }
  epochs.validate();
  return loaded;
}

EpochSet load_epochs(const fs::path& path) { return load_epochs_with_meta(path).epochs; }

EpochSet load_epochs_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("unreadable_file", "cannot open " + path.string());

  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw validation_error("parse_error", path.string() + ": empty file");
  const auto header = split_csv_line(line);
  const std::vector<std::string> want{"trial", "row", "col", "value", "label"};
  if (header != want) {
    throw validation_error("parse_error", path.string() + ": header must be 'trial,row,col,value,label'");
  }

  std::map<std::tuple<long, long, long>, double> cells;
  std::map<long, int> labels;
  long max_trial = -1, max_row = -1, max_col = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) {
      throw validation_error("parse_error", path.string() + ":" + std::to_string(line_no) + ": expected 5 fields");
    }
    const long t = parse_index(f[0], path, line_no);
    const long r = parse_index(f[1], path, line_no);
    const long c = parse_index(f[2], path, line_no);
    const double v = parse_double(f[3], path, line_no);
    const long label = parse_index(f[4], path, line_no);
    if (label != 1 && label != 2) {
      throw validation_error("invalid_label", path.string() + ":" + std::to_string(line_no) + ": label " +
                                                  std::to_string(label) + " not in {1, 2}");
    }
    auto [it, fresh] = labels.emplace(t, static_cast<int>(label));
    if (!fresh && it->second != label) {
      throw validation_error("invalid_label", path.string() + ": trial " + std::to_string(t) + " has conflicting labels");
    }
    if (!cells.emplace(std::make_tuple(t, r, c), v).second) {
      throw validation_error("duplicate_cell", path.string() + ":" + std::to_string(line_no) + ": duplicate cell");
    }
    max_trial = std::max(max_trial, t);
    max_row = std::max(max_row, r);
    max_col = std::max(max_col, c);
  }

  EpochSet epochs;
  epochs.rows = max_row + 1;
  epochs.cols = max_col + 1;
  const std::size_t n = static_cast<std::size_t>(max_trial + 1);
  if (cells.size() != n * static_cast<std::size_t>(epochs.rows * epochs.cols)) {
    throw validation_error("size_mismatch", path.string() + ": " + std::to_string(cells.size()) +
                                                " cells, expected " + std::to_string(n) + "x" +
                                                std::to_string(epochs.rows) + "x" + std::to_string(epochs.cols));
  }
  for (std::size_t t = 0; t < n; ++t) {
    Mat m(epochs.rows, epochs.cols);
    for (Eigen::Index r = 0; r < epochs.rows; ++r)
      for (Eigen::Index c = 0; c < epochs.cols; ++c) m(r, c) = cells.at({static_cast<long>(t), r, c});
    epochs.trials.push_back(std::move(m));
    epochs.labels.push_back(labels.at(static_cast<long>(t)));
  }
  epochs.validate();
  return epochs;
}

Mat load_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("unreadable_file", "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    for (const auto& f : split_csv_line(line)) row.push_back(parse_double(f, path, line_no));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw validation_error("parse_error", path.string() + ":" + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw validation_error("parse_error", path.string() + ": empty matrix");
  Mat out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return out;
}

}  // namespace mvlda
