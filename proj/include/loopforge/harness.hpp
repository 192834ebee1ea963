// Copyright 2026 The loopforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "loopforge/io.hpp"
#include "loopforge/pipeline.hpp"

namespace loopforge::harness {

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { Approximate, Convergence, SplitOrder, Verify, Synth };

Mode mode_from_string(const std::string& name);
std::string to_string(Mode mode);

struct ExperimentConfig {
  Mode mode = Mode::Convergence;
  std::string input;
  std::string output;
  std::vector<Index> n_list;
  double alpha = 2.0;
  double epsilon = 1.0;
  std::optional<int> s;
  std::uint64_t seed = 1;
  Index grid = kMeasurementGrid;
  /// Matrix size of synthesized inputs.
  Index size = 2;
  double max_step = kDefaultHomotopyStep;
  SmoothnessSpec synth;
  /// split-order: generators per set, number of random sets, step sizes.
  Index generators = 2;
  Index trials = 20;
  std::vector<double> lambdas;
};

/// Reads the config object; absent fields keep their defaults.
ExperimentConfig config_from_json(const io::json& j);

/// Checks the invariants: n list strictly increasing, grid a power of two, ...
void validate(const ExperimentConfig& config);

/// Maximum worker threads: LOOPFORGE_THREADS when set, else hardware concurrency.
unsigned thread_cap();

struct RateFit {
  double slope = 0;
  /// Half-width of an approximate 95% interval (two standard errors).
  double half_width = 0;
};

/// Least-squares slope of log(error) vs log(n) over points with error > 1e-12.
/// Throws std::invalid_argument with fewer than three such points.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

struct ConvergenceRow {
  Index n = 0;
  double sup_error = 0;
  Index degree = 0;
  int s = 0;
  Index m = 0;
  Index M = 0;
  Index L = 0;
  double unitarity_defect = 0;
  double seconds = 0;
  bool failed = false;
  std::string error;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::optional<RateFit> fit;
};

/// The factored input of an experiment: loaded from config.input or synthesized as exp(A).
FactoredLoop<double> experiment_input(const ExperimentConfig& config);

/// approximate_loop for every n in the config; rows may run concurrently.
ConvergenceReport run_convergence(const ExperimentConfig& config);

/// Columns: n,sup_error,degree,s,m,M,L,unitarity_defect,seconds
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);
io::json convergence_summary(const ConvergenceReport& report);

/// Random su(2) matrix with unit spectral norm.
MatrixXc random_su2(std::mt19937_64& rng);

struct SplitOrderRow {
  double lambda = 0;
  double error = 0;
  int scheme_order = 0;
  std::uint64_t seed = 0;
};

struct SplitOrderReport {
  std::vector<SplitOrderRow> rows;
  std::vector<double> slopes;  // one per random generator set
};

/// order_study over config.trials random su(2) generator sets (seed, seed+1, ...).
SplitOrderReport run_split_order(const ExperimentConfig& config);

/// Columns: lambda,error,scheme_order,seed
void write_split_order_csv(std::ostream& out, const SplitOrderReport& report);

/// Default step sizes for an order study at level s.
std::vector<double> default_lambdas(int s);

struct VerifyResult {
  LoopClassReport defects;
  Index degree = 0;
  Index trimmed_degree = 0;
  bool ok = false;
};

inline constexpr double kVerifyTolerance = 1e-8;

/// classify + degree_trim of a loop (or grid) file; ok when every defect <= 1e-8.
VerifyResult verify_document(const io::json& doc);
VerifyResult verify_file(const std::string& path);
io::json verify_to_json(const VerifyResult& result);

}  // namespace loopforge::harness
