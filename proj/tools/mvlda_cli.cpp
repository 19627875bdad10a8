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

// mvlda: matrix-variate discriminant analysis from the command line.
//
// Exit status: 0 success, 1 validation error, 2 numerical failure.
// Errors are a single stderr line "error: <code>: <message>".

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mvlda/commands.hpp"
#include "mvlda/error.hpp"

namespace {

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Descriptive two-class discriminant analysis of matrix-variate data"};
  app.require_subcommand(1);

  // simulate
  mvlda::SimulateOptions sim;
  std::string sim_out;
  std::string row_cov, col_cov;
  double sample_rate = 0.0;
  auto* simulate = app.add_subcommand("simulate", "Write a seeded matrix-normal epoch bundle");
  simulate->add_option("--K", sim.rows, "Rows per trial")->required();
  simulate->add_option("--J", sim.cols, "Columns per trial")->required();
  simulate->add_option("--n1", sim.n1, "Trials in class 1")->required();
  simulate->add_option("--n2", sim.n2, "Trials in class 2")->required();
  simulate->add_option("--seed", sim.seed, "Generator seed")->capture_default_str();
  simulate->add_option("--lambda", sim.planted_lambda, "Planted metric eigenvalues of the mean difference")
      ->delimiter(',');
  simulate->add_option("--row-rho", sim.row_rho, "AR(1) coefficient of the row factor")->capture_default_str();
  simulate->add_option("--col-rho", sim.col_rho, "AR(1) coefficient of the column factor")->capture_default_str();
  simulate->add_option("--row-cov", row_cov, "CSV file with the K x K row factor");
  simulate->add_option("--col-cov", col_cov, "CSV file with the J x J column factor");
  simulate->add_option("--sample-rate", sample_rate, "Sampling rate in Hz recorded in the manifest");
  simulate->add_option("-o,--out", sim_out, "Manifest path (payload goes next to it as .f64)")->required();

  // fit
  mvlda::FitOptions fit;
  std::string fit_bundle, fit_out, boundary = "zero-pad";
  std::size_t padded = 0;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate the separable covariance and the discriminant model");
  fit_cmd->add_option("bundle", fit_bundle, "Epoch bundle manifest or long-format CSV")->required();
  fit_cmd->add_option("-o,--out", fit_out, "Model file to write")->required();
  fit_cmd->add_option("--tol", fit.flip_flop.tol, "Flip-flop relative change tolerance")->capture_default_str();
  fit_cmd->add_option("--max-iter", fit.flip_flop.max_iter, "Flip-flop sweep limit")->capture_default_str();
  fit_cmd->add_option("--ridge", fit.flip_flop.ridge, "Diagonal term added before each factor inversion")
      ->capture_default_str();
  fit_cmd->add_option("--floor-ratio", fit.flip_flop.floor_ratio, "SPD eigenvalue floor relative to the largest")
      ->capture_default_str();
  fit_cmd->add_option("--rank-tol", fit.rank_tol, "Relative singular value cutoff (default max(K,J)*1e-12)");
  fit_cmd->add_flag("--wavelet", fit.wavelet, "Treat trials as time x channel and apply the wavelet front end");
  fit_cmd->add_option("--wavelet-taps", fit.wavelet_config.filter_taps, "Daubechies filter length")
      ->capture_default_str();
  fit_cmd->add_option("--wavelet-levels", fit.wavelet_config.levels, "Decomposition levels")->capture_default_str();
  fit_cmd->add_option("--boundary", boundary, "Padding policy: zero-pad or periodic")->capture_default_str();
  fit_cmd->add_option("--padded-length", padded, "Transform length (default: next power of two)");
  fit_cmd->add_option("--baseline-samples", fit.baseline_samples,
                      "Subtract the mean of the first N samples per channel (0 = off)")
      ->capture_default_str();

  // scree
  std::string scree_model, scree_out;
  auto* scree = app.add_subcommand("scree", "Eigenvalue scree as CSV and SVG");
  scree->add_option("model", scree_model, "Model file")->required();
  scree->add_option("-o,--out", scree_out, "Output prefix")->required();

  // project
  mvlda::ProjectOptions proj;
  std::string proj_model, proj_bundle, proj_out;
  auto* project = app.add_subcommand("project", "Per-trial scores on discriminant axes");
  project->add_option("model", proj_model, "Model file")->required();
  project->add_option("bundle", proj_bundle, "Epoch bundle to project")->required();
  project->add_option("-o,--out", proj_out, "Output prefix")->required();
  project->add_option("--axes", proj.axes, "1-based axes (default 1,2)")->delimiter(',');

  // components
  mvlda::ComponentsOptions comp;
  std::string comp_model, comp_out, domain = "col";
  auto* components = app.add_subcommand("components", "Discriminant components in row, column or time domain");
  components->add_option("model", comp_model, "Model file")->required();
  components->add_option("-o,--out", comp_out, "Output prefix")->required();
  components->add_option("-q,--components", comp.components, "1-based components (default 1,2,3)")->delimiter(',');
  components->add_option("--domain", domain, "row, col or time")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << "\n";
    return 1;
  }

  try {
    if (*simulate) {
      sim.out = sim_out;
      sim.row_cov_file = row_cov;
      sim.col_cov_file = col_cov;
      if (sample_rate > 0.0) sim.sample_rate_hz = sample_rate;
      mvlda::cmd_simulate(sim, std::cout, std::cerr);
    } else if (*fit_cmd) {
      fit.bundle = fit_bundle;
      fit.out = fit_out;
      fit.wavelet_config.boundary = mvlda::boundary_from_string(boundary);
      fit.wavelet_config.padded_length = padded;
      mvlda::cmd_fit(fit, std::cout, std::cerr);
    } else if (*scree) {
      mvlda::cmd_scree(scree_model, scree_out, std::cout, std::cerr);
    } else if (*project) {
      proj.model = proj_model;
      proj.bundle = proj_bundle;
      proj.out = proj_out;
      mvlda::cmd_project(proj, std::cout, std::cerr);
    } else if (*components) {
      comp.model = comp_model;
      comp.out = comp_out;
      comp.domain = mvlda::domain_from_string(domain);
      mvlda::cmd_components(comp, std::cout, std::cerr);
    }
  } catch (const mvlda::Error& e) {
    std::cerr << "error: " << e.code() << ": " << one_line(e.what()) << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << one_line(e.what()) << "\n";
    return 2;
  }
  return 0;
}
