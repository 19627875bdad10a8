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

#include "mvlda/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "mvlda/bundle.hpp"
#include "mvlda/error.hpp"
#include "mvlda/plot.hpp"
#include "mvlda/synth.hpp"

namespace mvlda {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  ensure_parent_directory(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw validation_error("unwritable_file", "cannot write " + path.string());
  out << content;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ',';
    line += fields[i];
  }
  return line + "\n";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<int> resolve_components(const std::vector<int>& requested, Eigen::Index rank, std::size_t default_count,
                                    const char* what) {
  std::vector<int> out = requested;
  if (out.empty()) {
    for (Eigen::Index q = 1; q <= std::min<Eigen::Index>(rank, static_cast<Eigen::Index>(default_count)); ++q)
      out.push_back(static_cast<int>(q));
    if (out.empty()) {
      throw validation_error("no_components", std::string(what) + ": model has Q=0 discriminant directions");
    }
  }
  for (int q : out) {
    if (q < 1 || q > rank) {
      throw validation_error(std::string(what) == "project" ? "axis_out_of_range" : "component_out_of_range",
                             std::string(what) + ": index " + std::to_string(q) + " outside [1, Q=" +
                                 std::to_string(rank) + "]");
    }
  }
  return out;
}

std::string row_label(const ModelFile& file, Eigen::Index r) {
  if (static_cast<std::size_t>(r) < file.row_names.size()) return file.row_names[static_cast<std::size_t>(r)];
  return "r" + std::to_string(r + 1);
}

std::string channel_label(const ModelFile& file, Eigen::Index c) {
  if (static_cast<std::size_t>(c) < file.channel_names.size()) return file.channel_names[static_cast<std::size_t>(c)];
  return "c" + std::to_string(c + 1);
}

Mat canonical_factor(const fs::path& file, const Mat& fallback, Eigen::Index dim, const char* what) {
  if (file.empty()) return fallback;
  Mat m = load_matrix_csv(file);
  if (m.rows() != dim || m.cols() != dim) {
    throw validation_error("dimension_mismatch", std::string("simulate: ") + what + " factor file is " +
                                                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                                     ", expected " + std::to_string(dim) + "x" + std::to_string(dim));
  }
  return m;
}

nlohmann::json matrix_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

fs::path with_suffix(const fs::path& prefix, const std::string& suffix) {
  fs::path p = prefix;
  if (p.extension() == ".csv" || p.extension() == ".svg") p.replace_extension();
  return fs::path(p.string() + suffix);
}

ComponentDomain domain_from_string(const std::string& s) {
  if (s == "row") return ComponentDomain::Row;
  if (s == "col") return ComponentDomain::Col;
  if (s == "time") return ComponentDomain::Time;
  throw validation_error("invalid_domain", "components: domain must be row, col or time (got '" + s + "')");
}

std::size_t elbow_rank(const Vec& lambda) {
  const Eigen::Index q = lambda.size();
  if (q == 0) return 0;
  if (q < 3 || !(lambda[0] > 0.0)) return 1;
  const double first = 1.0;
  const double last = lambda[q - 1] / lambda[0];
  double best = -1.0;
  Eigen::Index best_p = 1;
  for (Eigen::Index i = 1; i < q - 1; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(q - 1);
    const double chord = first + (last - first) * x;
    const double gap = chord - lambda[i] / lambda[0];
    if (gap > best) {
      best = gap;
      best_p = i;
    }
  }
  // best_p is the 0-based index of the elbow point, i.e. the count before it.
  return static_cast<std::size_t>(std::max<Eigen::Index>(best_p, 1));
}

void cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& /*err*/) {
  if (opts.rows < 1 || opts.cols < 1 || opts.n1 < 1 || opts.n2 < 1) {
    throw validation_error("invalid_dimensions", "simulate: K, J, n1 and n2 must all be >= 1");
  }
  if (opts.out.empty()) throw validation_error("missing_output", "simulate: no output path");
  if (std::abs(opts.row_rho) >= 1.0 || std::abs(opts.col_rho) >= 1.0) {
    throw validation_error("invalid_rho", "simulate: AR(1) coefficients must lie in (-1, 1)");
  }

  const Mat row = canonical_factor(opts.row_cov_file, ar1_matrix(opts.rows, opts.row_rho), opts.rows, "row");
  const Mat col = canonical_factor(opts.col_cov_file, ar1_matrix(opts.cols, opts.col_rho), opts.cols, "column");
  const SeparableCovariance truth = make_separable(row, col, 0.0);

  MatrixNormalSpec spec;
  spec.sigma_l = truth.s_l;
  spec.sigma_r = truth.s_r;
  const Mat delta = planted_difference(opts.planted_lambda, spec.sigma_l, spec.sigma_r, opts.seed);
  spec.mu1 = 0.5 * delta;
  spec.mu2 = -0.5 * delta;
  spec.n1 = opts.n1;
  spec.n2 = opts.n2;
  spec.seed = opts.seed;

  EpochSet epochs = sample_matrix_normal(spec);
  for (Eigen::Index c = 0; c < opts.cols; ++c) epochs.channel_names.push_back("C" + std::to_string(c + 1));

  BundleMeta meta;
  meta.sample_rate_hz = opts.sample_rate_hz;
  nlohmann::json info;
  info["generator"] = kGeneratorName;
  info["seed"] = opts.seed;
  info["K"] = opts.rows;
  info["J"] = opts.cols;
  info["n1"] = opts.n1;
  info["n2"] = opts.n2;
  info["planted_lambda"] = opts.planted_lambda;
  info["means"] = "mu1 = +Delta/2, mu2 = -Delta/2";
  if (opts.row_cov_file.empty()) {
    info["row_factor"] = {{"type", "ar1"}, {"rho", opts.row_rho}};
  } else {
    info["row_factor"] = {{"type", "file"}, {"path", opts.row_cov_file.string()}, {"matrix", matrix_json(row)}};
  }
  if (opts.col_cov_file.empty()) {
    info["col_factor"] = {{"type", "ar1"}, {"rho", opts.col_rho}};
  } else {
    info["col_factor"] = {{"type", "file"}, {"path", opts.col_cov_file.string()}, {"matrix", matrix_json(col)}};
  }
  info["normalization"] = "column factor scaled to unit Frobenius norm, scale moved to row factor";
  meta.generator_info = info;

  save_epochs(opts.out, epochs, meta);
  out << "n=" << epochs.size() << "\nK=" << opts.rows << "\nJ=" << opts.cols << "\nmanifest=" << opts.out.string()
      << "\npayload=" << payload_path_for(opts.out).string() << "\n";
}

ModelFile fit_model(const EpochSet& epochs, const FitOptions& opts, std::optional<double> sample_rate_hz) {
  ModelFile file;
  EpochSet data;
  if (opts.wavelet) {
    WaveletConfig wc = opts.wavelet_config;
    if (wc.padded_length == 0) wc.padded_length = default_padded_length(static_cast<std::size_t>(epochs.rows), wc.levels);
    file.wavelet = fit_wavelet_frontend(epochs, wc, opts.baseline_samples);
    data = file.wavelet->transform(epochs);
  } else {
    data = epochs;
  }

  const SeparableCovariance cov = flip_flop(data, opts.flip_flop);
  const double rank_tol = opts.rank_tol > 0.0 ? opts.rank_tol : default_rank_tol(data.rows, data.cols);
  file.model = fit(data, cov, rank_tol);
  file.s_l = file.model.metric_d.inverse();
  file.s_r = file.model.metric_m.inverse();
  file.flip_flop = opts.flip_flop;
  file.iterations = cov.iterations;
  file.converged = cov.converged;
  file.fixed_point_residual = cov.fixed_point_residual;
  file.rank_tol = rank_tol;
  file.channel_names = data.channel_names;
  file.row_names = data.row_names;
  file.sample_rate_hz = sample_rate_hz;
  file.warnings = cov.warnings;
  return file;
}

void cmd_fit(const FitOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.out.empty()) throw validation_error("missing_output", "fit: no output path");
  const LoadedEpochs loaded = load_epochs_with_meta(opts.bundle);
  const ModelFile file = fit_model(loaded.epochs, opts, loaded.meta.sample_rate_hz);

  for (const std::string& w : file.warnings) err << "warning: small_sample: " << w << "\n";
  if (!file.converged) {
    err << "warning: not_converged: flip-flop stopped after " << file.iterations << " sweeps\n";
  }

  save_model(opts.out, file);
  const MahalanobisDecomposition md = mahalanobis_decomposition(file.model);
  out << "K=" << file.model.rows() << "\nJ=" << file.model.cols() << "\nn1=" << file.model.n1
      << "\nn2=" << file.model.n2 << "\niterations=" << file.iterations
      << "\nconverged=" << (file.converged ? "true" : "false")
      << "\nfixed_point_residual=" << format_number(file.fixed_point_residual) << "\nQ=" << file.model.rank()
      << "\nmahalanobis_total=" << format_number(md.total) << "\nmodel=" << opts.out.string() << "\n";
}

void cmd_scree(const fs::path& model_path, const fs::path& out_prefix, std::ostream& out, std::ostream& err) {
  const ModelFile file = load_model(model_path);
  const Vec& lambda = file.model.lambda;
  const double total = lambda.sum();
  const std::size_t elbow = elbow_rank(lambda);

  std::string csv = csv_row({"q", "lambda", "cumulative_fraction", "elbow"});
  double running = 0.0;
  std::vector<double> values;
  for (Eigen::Index q = 0; q < lambda.size(); ++q) {
    running += lambda[q];
    values.push_back(lambda[q]);
    csv += csv_row({std::to_string(q + 1), format_number(lambda[q]), format_number(running / total),
                    static_cast<std::size_t>(q + 1) == elbow ? "1" : "0"});
  }
  if (lambda.size() == 0) {
    err << "warning: empty_scree: model has Q=0 (equal class means)\n";
  }

  const fs::path csv_path = with_suffix(out_prefix, ".csv");
  const fs::path svg_path = with_suffix(out_prefix, ".svg");
  write_file(csv_path, csv);
  write_file(svg_path, bar_chart_svg({"Scree: eigenvalues of the mean difference", "q", "lambda_q"}, values, elbow));
  out << "Q=" << lambda.size() << "\ntotal=" << format_number(total) << "\nelbow_r=" << elbow
      << "\ncsv=" << csv_path.string() << "\nsvg=" << svg_path.string() << "\n";
}

void cmd_project(const ProjectOptions& opts, std::ostream& out, std::ostream& /*err*/) {
  const ModelFile file = load_model(opts.model);
  const DiscriminantModel& model = file.model;
  const std::vector<int> axes = resolve_components(opts.axes, model.rank(), 2, "project");

  EpochSet epochs = load_epochs(opts.bundle);
  if (file.wavelet) epochs = file.wavelet->transform(epochs);
  if (epochs.rows != model.rows() || epochs.cols != model.cols()) {
    throw validation_error("dimension_mismatch", "project: bundle trials are " + std::to_string(epochs.rows) + "x" +
                                                     std::to_string(epochs.cols) + ", model expects " +
                                                     std::to_string(model.rows()) + "x" + std::to_string(model.cols()));
  }

  std::vector<std::string> header{"trial", "label"};
  for (int q : axes) header.push_back("score_" + std::to_string(q));
  std::string csv = csv_row(header);

  std::vector<PointGroup> groups(2);
  groups[0].name = "class 1";
  groups[1].name = "class 2";
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const Vec s = scores_vec(epochs.trials[i], model);
    std::vector<std::string> row{std::to_string(i), std::to_string(epochs.labels[i])};
    for (int q : axes) row.push_back(format_number(s[q - 1]));
    csv += csv_row(row);
    PointGroup& g = groups[static_cast<std::size_t>(epochs.labels[i] - 1)];
    g.x.push_back(s[axes[0] - 1]);
    g.y.push_back(axes.size() > 1 ? s[axes[1] - 1] : static_cast<double>(i));
  }

  const ClassMeans means = class_means(epochs);
  std::vector<std::string> mheader{"label", "n"};
  for (int q : axes) mheader.push_back("score_" + std::to_string(q));
  std::string means_csv = csv_row(mheader);
  std::vector<Marker> markers;
  for (int label = 1; label <= 2; ++label) {
    const Vec s = scores_vec(label == 1 ? means.mean1 : means.mean2, model);
    std::vector<std::string> row{std::to_string(label), std::to_string(label == 1 ? means.n1 : means.n2)};
    for (int q : axes) row.push_back(format_number(s[q - 1]));
    means_csv += csv_row(row);
    const double y = axes.size() > 1 ? s[axes[1] - 1] : 0.5 * static_cast<double>(epochs.size());
    markers.push_back({"mean class " + std::to_string(label), s[axes[0] - 1], y});
  }

  const fs::path csv_path = with_suffix(opts.out, ".csv");
  const fs::path means_path = with_suffix(opts.out, "_means.csv");
  const fs::path svg_path = with_suffix(opts.out, ".svg");
  write_file(csv_path, csv);
  write_file(means_path, means_csv);
  const std::string x_label = "axis " + std::to_string(axes[0]);
  const std::string y_label = axes.size() > 1 ? "axis " + std::to_string(axes[1]) : "trial";
  write_file(svg_path, scatter_svg({"Projection on discriminant axes", x_label, y_label}, groups, markers));
  out << "trials=" << epochs.size() << "\ncsv=" << csv_path.string() << "\nmeans_csv=" << means_path.string()
      << "\nsvg=" << svg_path.string() << "\n";
}

void cmd_components(const ComponentsOptions& opts, std::ostream& out, std::ostream& /*err*/) {
  const ModelFile file = load_model(opts.model);
  const DiscriminantModel& model = file.model;
  const std::vector<int> comps = resolve_components(opts.components, model.rank(), 3, "components");
  const Mat delta = model.delta();

  std::vector<std::string> header;
  std::string csv;
  std::string svg;
  std::vector<std::string> comp_names;
  for (int q : comps) comp_names.push_back("component_" + std::to_string(q));

  if (opts.domain == ComponentDomain::Row || opts.domain == ComponentDomain::Col) {
    const bool rows = opts.domain == ComponentDomain::Row;
    const Mat coords = rows ? row_coordinates(delta, model) : col_coordinates(delta, model);
    header = {rows ? "row" : "channel", "name"};
    header.insert(header.end(), comp_names.begin(), comp_names.end());
    csv = csv_row(header);
    std::vector<std::string> labels;
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
      const std::string name = rows ? row_label(file, i) : channel_label(file, i);
      labels.push_back(name);
      std::vector<std::string> row{std::to_string(i), csv_field(name)};
      for (int q : comps) row.push_back(format_number(coords(i, q - 1)));
      csv += csv_row(row);
    }
    const std::string title = rows ? "Row discriminant components" : "Column discriminant components";
    if (comps.size() >= 2) {
      PointGroup g;
      g.name = rows ? "rows" : "channels";
      for (Eigen::Index i = 0; i < coords.rows(); ++i) {
        g.x.push_back(coords(i, comps[0] - 1));
        g.y.push_back(coords(i, comps[1] - 1));
      }
      g.labels = labels;
      svg = scatter_svg({title, comp_names[0], comp_names[1]}, {g});
    } else {
      std::vector<double> xs;
      std::vector<double> ys;
      for (Eigen::Index i = 0; i < coords.rows(); ++i) {
        xs.push_back(static_cast<double>(i));
        ys.push_back(coords(i, comps[0] - 1));
      }
      svg = line_chart_svg({title, rows ? "row index" : "channel index", comp_names[0]}, xs, {{comp_names[0], ys}});
    }
  } else {
    if (!file.wavelet) {
      throw validation_error("missing_wavelet", "components: domain=time needs a model fitted with --wavelet");
    }
    const WaveletFrontend& fe = *file.wavelet;
    std::vector<Vec> waves;
    for (int q : comps) waves.push_back(component_waveform(model, q, fe.mask, fe.config));
    header = {"sample"};
    if (file.sample_rate_hz) header.push_back("time_ms");
    header.insert(header.end(), comp_names.begin(), comp_names.end());
    csv = csv_row(header);
    std::vector<double> xs;
    std::vector<Series> series;
    for (const auto& name : comp_names) series.push_back({name, {}});
    for (std::size_t t = 0; t < fe.signal_length; ++t) {
      std::vector<std::string> row{std::to_string(t)};
      double x = static_cast<double>(t);
      if (file.sample_rate_hz) {
        x = 1000.0 * static_cast<double>(t) / *file.sample_rate_hz;
        row.push_back(format_number(x));
      }
      xs.push_back(x);
      for (std::size_t c = 0; c < waves.size(); ++c) {
        const double v = waves[c][static_cast<Eigen::Index>(t)];
        row.push_back(format_number(v));
        series[c].y.push_back(v);
      }
      csv += csv_row(row);
    }
    svg = line_chart_svg({"Temporal discriminant components", file.sample_rate_hz ? "time (ms)" : "sample", "amplitude"},
                         xs, series);
  }

  const fs::path csv_path = with_suffix(opts.out, ".csv");
  const fs::path svg_path = with_suffix(opts.out, ".svg");
  write_file(csv_path, csv);
  write_file(svg_path, svg);
  out << "components=" << comps.size() << "\ncsv=" << csv_path.string() << "\nsvg=" << svg_path.string() << "\n";
}

}  // namespace mvlda
