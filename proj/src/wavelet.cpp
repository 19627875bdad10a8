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

#include "mvlda/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mvlda/error.hpp"

namespace mvlda {

namespace {

// Daubechies scaling filters, indexed by tap count (2 * vanishing moments).
const std::map<int, std::vector<double>>& filter_table() {
  static const std::map<int, std::vector<double>> table = {
      {2, {0.70710678118654757, 0.70710678118654757}},
      {4, {0.48296291314453416, 0.83651630373780794, 0.22414386804201339, -0.12940952255126037}},
      {6,
       {0.33267055295008263, 0.80689150931109255, 0.45987750211849154, -0.13501102001025458, -0.085441273882026658,
        0.035226291885709533}},
      {8,
       {0.23037781330889651, 0.71484657055291567, 0.63088076792985892, -0.027983769416859854, -0.18703481171909309,
        0.030841381835560764, 0.032883011666885197, -0.010597401785069032}},
      {10,
       {0.16010239797419293, 0.60382926979718965, 0.72430852843777294, 0.13842814590132074, -0.24229488706638203,
        -0.032244869584638375, 0.077571493840045719, -0.0062414902127982744, -0.012580751999081999,
        0.0033357252854737712}},
      {12,
       {0.11154074335010947, 0.49462389039845306, 0.75113390802109536, 0.31525035170919763, -0.22626469396543983,
        -0.12976686756726194, 0.097501605587323043, 0.027522865530305727, -0.03158203931748603,
        0.00055384220116149613, 0.0047772575109455108, -0.0010773010853084796}},
      {14,
       {0.077852054085009184, 0.39653931948191729, 0.72913209084623509, 0.46978228740519312, -0.14390600392856498,
        -0.22403618499387498, 0.071309219266830259, 0.080612609151083078, -0.038029936935014413,
        -0.016574541630666881, 0.01255099855609984, 0.00042957797292136651, -0.0018016407040474908,
        0.00035371379997452024}},
      {16,
       {0.054415842243104008, 0.31287159091429995, 0.67563073629728976, 0.58535468365420673, -0.015829105256349306,
        -0.28401554296154691, 0.00047248457391328279, 0.12874742662047847, -0.017369301001807547,
        -0.044088253930794755, 0.013981027917398282, 0.0087460940474057766, -0.0048703529934515741,
        -0.00039174037337694705, 0.00067544940645056933, -0.00011747678412476953}},
      {18,
       {0.038077947363878345, 0.24383467461259034, 0.60482312369011115, 0.65728807805130052, 0.13319738582500756,
        -0.29327378327917492, -0.096840783222976456, 0.14854074933810638, 0.03072568147933338,
        -0.067632829061329974, 0.00025094711483145197, 0.022361662123679096, -0.0047232047577513972,
        -0.0042815036824634303, 0.0018476468830562265, 0.00023038576352319597, -0.00025196318894271012,
        3.9347320316271603e-05}},
      {20,
       {0.026670057900555554, 0.1881768000776915, 0.52720118893172563, 0.68845903945360354, 0.28117234366057747,
        -0.24984642432731538, -0.19594627437737705, 0.12736934033579325, 0.093057364603572348,
        -0.071394147166397082, -0.029457536821875813, 0.033212674059341002, 0.0036065535669561697,
        -0.010733175483330575, 0.0013953517470529011, 0.0019924052951850561, -0.00068585669495971162,
        -0.00011646685512928545, 9.3588670320069592e-05, -1.3264202894521244e-05}},
  };
  return table;
}

void analysis_stage(const double* in, double* out, std::size_t len, const std::vector<double>& h,
                    const std::vector<double>& g) {
  const std::size_t half = len / 2;
  for (std::size_t k = 0; k < half; ++k) {
    double a = 0.0;
    double d = 0.0;
    for (std::size_t n = 0; n < h.size(); ++n) {
      const double x = in[(2 * k + n) % len];
      a += h[n] * x;
      d += g[n] * x;
    }
    out[k] = a;
    out[half + k] = d;
  }
}

void synthesis_stage(const double* in, double* out, std::size_t len, const std::vector<double>& h,
                     const std::vector<double>& g) {
  const std::size_t half = len / 2;
  std::fill(out, out + len, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    const double a = in[k];
    const double d = in[half + k];
    for (std::size_t n = 0; n < h.size(); ++n) out[(2 * k + n) % len] += h[n] * a + g[n] * d;
  }
}

}  // namespace

std::string to_string(Boundary b) { return b == Boundary::Periodic ? "periodic" : "zero-pad"; }

Boundary boundary_from_string(const std::string& s) {
  if (s == "periodic") return Boundary::Periodic;
  if (s == "zero-pad") return Boundary::ZeroPad;
  throw validation_error("invalid_boundary", "unknown boundary policy '" + s + "' (expected zero-pad or periodic)");
}

const std::vector<double>& daubechies_filter(int taps) {
  const auto& table = filter_table();
  const auto it = table.find(taps);
  if (it == table.end()) {
    throw validation_error("invalid_filter", "no Daubechies filter with " + std::to_string(taps) +
                                                 " taps (supported: even counts 2..20)");
  }
  return it->second;
}

std::vector<double> quadrature_mirror(const std::vector<double>& h) {
  const std::size_t len = h.size();
  std::vector<double> g(len);
  for (std::size_t n = 0; n < len; ++n) g[n] = (n % 2 == 0 ? 1.0 : -1.0) * h[len - 1 - n];
  return g;
}

void WaveletConfig::validate() const {
  daubechies_filter(filter_taps);
  if (levels < 1 || levels > 30) {
    throw validation_error("invalid_levels", "wavelet: levels must be in [1, 30]");
  }
  const std::size_t block = std::size_t{1} << levels;
  if (padded_length == 0 || padded_length % block != 0) {
    throw validation_error("invalid_padded_length", "wavelet: padded_length " + std::to_string(padded_length) +
                                                        " is not a positive multiple of 2^" +
                                                        std::to_string(levels));
  }
}

std::size_t default_padded_length(std::size_t length, int levels) {
  std::size_t n = std::size_t{1} << levels;
  while (n < length) n *= 2;
  return n;
}

Vec pad_signal(const Vec& signal, const WaveletConfig& config) {
  const std::size_t len = static_cast<std::size_t>(signal.size());
  if (len > config.padded_length) {
    throw validation_error("signal_too_long", "wavelet: signal of length " + std::to_string(len) +
                                                  " exceeds padded_length " + std::to_string(config.padded_length));
  }
  if (len == 0) {
    throw validation_error("empty_signal", "wavelet: empty signal");
  }
  Vec out = Vec::Zero(static_cast<Eigen::Index>(config.padded_length));
  out.head(signal.size()) = signal;
  if (config.boundary == Boundary::Periodic) {
    for (std::size_t i = len; i < config.padded_length; ++i) out[static_cast<Eigen::Index>(i)] = signal[static_cast<Eigen::Index>(i % len)];
  }
  return out;
}

Vec dwt_forward(const Vec& signal, const WaveletConfig& config) {
  config.validate();
  const std::vector<double>& h = daubechies_filter(config.filter_taps);
  const std::vector<double> g = quadrature_mirror(h);

  Vec data = pad_signal(signal, config);
  Vec scratch(data.size());
  std::size_t len = config.padded_length;
  for (int level = 0; level < config.levels; ++level) {
    analysis_stage(data.data(), scratch.data(), len, h, g);
    std::copy(scratch.data(), scratch.data() + len, data.data());
    len /= 2;
  }
  return data;
}

Vec dwt_inverse(const Vec& coeffs, const WaveletConfig& config) {
  config.validate();
  if (static_cast<std::size_t>(coeffs.size()) != config.padded_length) {
    throw validation_error("length_mismatch", "dwt_inverse: got " + std::to_string(coeffs.size()) +
                                                  " coefficients, expected " + std::to_string(config.padded_length));
  }
  const std::vector<double>& h = daubechies_filter(config.filter_taps);
  const std::vector<double> g = quadrature_mirror(h);

  Vec data = coeffs;
  Vec scratch(data.size());
  std::size_t len = config.padded_length >> config.levels;
  for (int level = 0; level < config.levels; ++level) {
    len *= 2;
    synthesis_stage(data.data(), scratch.data(), len, h, g);
    std::copy(scratch.data(), scratch.data() + len, data.data());
  }
  return data;
}

Vec CoefficientMask::gather(const Vec& full) const {
  if (static_cast<std::size_t>(full.size()) != total_len) {
    throw validation_error("length_mismatch", "mask: vector length " + std::to_string(full.size()) +
                                                  " differs from mask length " + std::to_string(total_len));
  }
  Vec out(static_cast<Eigen::Index>(kept_indices.size()));
  for (std::size_t i = 0; i < kept_indices.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = full[static_cast<Eigen::Index>(kept_indices[i])];
  return out;
}

Vec CoefficientMask::scatter(const Vec& kept) const {
  if (static_cast<std::size_t>(kept.size()) != kept_indices.size()) {
    throw validation_error("length_mismatch", "mask: " + std::to_string(kept.size()) + " values for " +
                                                  std::to_string(kept_indices.size()) + " kept indices");
  }
  Vec out = Vec::Zero(static_cast<Eigen::Index>(total_len));
  for (std::size_t i = 0; i < kept_indices.size(); ++i)
    out[static_cast<Eigen::Index>(kept_indices[i])] = kept[static_cast<Eigen::Index>(i)];
  return out;
}

CoefficientMask select_coefficients(const std::vector<Vec>& transformed) {
  if (transformed.empty()) {
    throw validation_error("empty_input", "select_coefficients: no transformed trials");
  }
  const Eigen::Index len = transformed.front().size();
  Vec stat = Vec::Zero(len);
  for (const Vec& t : transformed) {
    if (t.size() != len) {
      throw validation_error("length_mismatch", "select_coefficients: transformed trials differ in length");
    }
    stat += t.cwiseAbs();
  }
  stat /= static_cast<double>(transformed.size());

  CoefficientMask mask;
  mask.total_len = static_cast<std::size_t>(len);
  mask.statistic = stat;
  mask.threshold = stat.mean();
  for (Eigen::Index i = 0; i < len; ++i) {
    if (stat[i] > mask.threshold) mask.kept_indices.push_back(static_cast<std::size_t>(i));
  }
  return mask;
}

Vec component_waveform(const DiscriminantModel& model, int q, const CoefficientMask& mask,
                       const WaveletConfig& config) {
  if (q < 1 || q > model.rank()) {
    throw validation_error("component_out_of_range",
                           "component_waveform: q=" + std::to_string(q) + " outside [1, Q=" + std::to_string(model.rank()) + "]");
  }
  if (static_cast<Eigen::Index>(mask.size()) != model.rows() || mask.total_len != config.padded_length) {
    throw validation_error("mask_mismatch", "component_waveform: mask keeps " + std::to_string(mask.size()) +
                                                " of " + std::to_string(mask.total_len) + " coefficients; model has K=" +
                                                std::to_string(model.rows()) + ", padded_length " +
                                                std::to_string(config.padded_length));
  }
  const Mat coords = row_coordinates(model.delta(), model);
  return dwt_inverse(mask.scatter(coords.col(q - 1)), config);
}

std::string coefficient_label(std::size_t index, const WaveletConfig& config) {
  std::size_t band = config.padded_length >> config.levels;
  if (index < band) return "a" + std::to_string(config.levels) + "[" + std::to_string(index) + "]";
  std::size_t start = band;
  for (int level = config.levels; level >= 1; --level) {
    if (index < start + band) return "d" + std::to_string(level) + "[" + std::to_string(index - start) + "]";
    start += band;
    band *= 2;
  }
  throw validation_error("index_out_of_range", "coefficient index " + std::to_string(index) + " beyond padded_length");
}

Mat WaveletFrontend::full_coefficients(const Mat& trial) const {
  if (static_cast<std::size_t>(trial.rows()) != signal_length) {
    throw validation_error("dimension_mismatch", "wavelet front end: trial has " + std::to_string(trial.rows()) +
                                                     " samples, expected " + std::to_string(signal_length));
  }
  Mat out(static_cast<Eigen::Index>(config.padded_length), trial.cols());
  const Eigen::Index base = static_cast<Eigen::Index>(baseline_samples);
  for (Eigen::Index c = 0; c < trial.cols(); ++c) {
    Vec signal = trial.col(c);
    if (base > 0) signal.array() -= signal.head(base).mean();
    out.col(c) = dwt_forward(signal, config);
  }
  return out;
}

Mat WaveletFrontend::transform(const Mat& trial) const {
  const Mat full = full_coefficients(trial);
  Mat out(static_cast<Eigen::Index>(mask.size()), full.cols());
  for (Eigen::Index c = 0; c < full.cols(); ++c) out.col(c) = mask.gather(full.col(c));
  return out;
}

EpochSet WaveletFrontend::transform(const EpochSet& time_epochs) const {
  EpochSet out;
  out.rows = static_cast<Eigen::Index>(mask.size());
  out.cols = time_epochs.cols;
  out.labels = time_epochs.labels;
  out.channel_names = time_epochs.channel_names;
  for (std::size_t i : mask.kept_indices) out.row_names.push_back(coefficient_label(i, config));
  out.trials.reserve(time_epochs.size());
  for (const Mat& t : time_epochs.trials) out.trials.push_back(transform(t));
  return out;
}

WaveletFrontend fit_wavelet_frontend(const EpochSet& time_epochs, const WaveletConfig& config,
                                     std::size_t baseline_samples) {
  config.validate();
  time_epochs.validate();
  if (baseline_samples > static_cast<std::size_t>(time_epochs.rows)) {
    throw validation_error("invalid_baseline", "wavelet front end: baseline of " + std::to_string(baseline_samples) +
                                                   " samples exceeds epoch length " + std::to_string(time_epochs.rows));
  }
  WaveletFrontend fe;
  fe.config = config;
  fe.signal_length = static_cast<std::size_t>(time_epochs.rows);
  fe.baseline_samples = baseline_samples;

  std::vector<Vec> transformed;
  transformed.reserve(time_epochs.size() * static_cast<std::size_t>(time_epochs.cols));
  for (const Mat& t : time_epochs.trials) {
    const Mat full = fe.full_coefficients(t);
    for (Eigen::Index c = 0; c < full.cols(); ++c) transformed.push_back(full.col(c));
  }
  fe.mask = select_coefficients(transformed);
  if (fe.mask.size() == 0) {
    throw numerical_error("empty_mask", "wavelet front end: no coefficient exceeds the mean statistic");
  }
  return fe;
}

}  // namespace mvlda
