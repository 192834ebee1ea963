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

// loopforge: polynomial approximation of SU(N) loops from the command line.
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error,
// 3 numerical failure (branch cut, infeasible where not allowed).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "loopforge/harness.hpp"

namespace lf = loopforge;
namespace hs = loopforge::harness;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config;
  std::string input;
  std::string out;
  std::vector<lf::Index> n;
  std::optional<double> alpha;
  std::optional<double> epsilon;
  std::optional<int> s;
  std::optional<std::uint64_t> seed;
  std::optional<lf::Index> grid;
  std::optional<lf::Index> size;
  // synth
  std::optional<double> synth_alpha;
  std::optional<double> amplitude;
  std::optional<lf::Index> max_degree;
  std::string kind = "factored";
  // approximate
  std::string report;
  // split-order
  std::optional<lf::Index> generators;
  std::optional<lf::Index> trials;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Experiment config (JSON)");
  cmd->add_option("--out", o.out, "Output file");
  cmd->add_option("--seed", o.seed, "Random seed");
}

hs::ExperimentConfig build_config(hs::Mode mode, const Overrides& o) {
  hs::ExperimentConfig c;
  if (!o.config.empty()) c = hs::config_from_json(lf::io::read_json_file(o.config));
  c.mode = mode;
  if (!o.input.empty()) c.input = o.input;
  if (!o.out.empty()) c.output = o.out;
  if (!o.n.empty()) c.n_list = o.n;
  if (o.alpha) c.alpha = *o.alpha;
  if (o.epsilon) c.epsilon = *o.epsilon;
  if (o.s) c.s = *o.s;
  if (o.seed) {
    c.seed = *o.seed;
    c.synth.seed = *o.seed;
  }
  if (o.grid) c.grid = *o.grid;
  if (o.size) c.size = *o.size;
  if (o.synth_alpha) c.synth.alpha = *o.synth_alpha;
  if (o.amplitude) c.synth.amplitude = *o.amplitude;
  if (o.max_degree) c.synth.max_degree = *o.max_degree;
  if (o.generators) c.generators = *o.generators;
  if (o.trials) c.trials = *o.trials;
  hs::validate(c);
  return c;
}

void emit_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw hs::ConfigError("cannot write " + path);
  out << text;
}

int run_synth(const hs::ExperimentConfig& c, const std::string& kind) {
  const auto algebra = lf::synth_lip_su_loop(c.synth, c.size);
  lf::io::json doc;
  if (kind == "factored") {
    lf::FactoredLoop<double> f;
    f.size = c.size;
    f.factors.push_back({lf::MatrixXc::Identity(c.size, c.size), algebra, std::nullopt});
    doc = lf::io::factored_to_json(f);
  } else if (kind == "algebra") {
    doc = lf::io::loop_to_json(algebra);
  } else if (kind == "grid") {
    doc = lf::io::grid_to_json(lf::exp_samples(algebra, c.grid));
  } else {
    throw hs::ConfigError("--kind must be factored, algebra or grid");
  }
  emit_text(c.output, doc.dump(1) + "\n");
  return 0;
}

int run_approximate(const hs::ExperimentConfig& c, const std::string& report_path) {
  if (c.n_list.size() != 1) throw hs::ConfigError("approximate takes exactly one n");
  const auto input = hs::experiment_input(c);
  lf::ApproxOptions options;
  options.n = c.n_list.front();
  options.alpha = c.alpha;
  options.epsilon = c.epsilon;
  options.s = c.s;
  options.grid = c.grid;
  options.max_step = c.max_step;
  const auto result = lf::approximate_loop(input, options);
  const auto report = lf::io::report_to_json(result.report).dump(1) + "\n";
  if (!c.output.empty()) lf::io::write_json_file(c.output, lf::io::loop_to_json(result.loop));
  emit_text(report_path, report);
  return 0;
}

int cmd_convergence(const hs::ExperimentConfig& c) {
  const auto report = hs::run_convergence(c);
  std::ostringstream csv;
  hs::write_convergence_csv(csv, report);
  emit_text(c.output, csv.str());
  std::cerr << hs::convergence_summary(report).dump() << '\n';
  return 0;
}

int cmd_split_order(const hs::ExperimentConfig& c) {
  const auto report = hs::run_split_order(c);
  std::ostringstream csv;
  hs::write_split_order_csv(csv, report);
  emit_text(c.output, csv.str());
  lf::io::json summary{{"slopes", report.slopes}};
  std::cerr << summary.dump() << '\n';
  return 0;
}

int run_verify(const hs::ExperimentConfig& c) {
  const auto result = hs::verify_file(c.input);
  std::cout << hs::verify_to_json(result).dump() << '\n';
  return result.ok ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial approximation of SU(N)-valued loops"};
  app.require_subcommand(1);
  Overrides o;

  auto* approximate = app.add_subcommand("approximate", "Approximate one loop at degree n");
  add_common(approximate, o);
  approximate->add_option("input", o.input, "Factored loop or sampled grid file");
  approximate->add_option("--n", o.n, "Target degree")->delimiter(',');
  approximate->add_option("--alpha", o.alpha, "Smoothness exponent (> 1)");
  approximate->add_option("--epsilon", o.epsilon, "Rate slack");
  approximate->add_option("--s", o.s, "Splitting level override");
  approximate->add_option("--grid", o.grid, "Measurement grid length");
  approximate->add_option("--report", o.report, "Report file (default stdout)");

  auto* convergence = app.add_subcommand("convergence", "Error vs degree sweep");
  add_common(convergence, o);
  convergence->add_option("--input", o.input, "Factored loop or sampled grid file (default: synthesize)");
  convergence->add_option("--n", o.n, "Target degrees")->delimiter(',');
  convergence->add_option("--alpha", o.alpha, "Smoothness exponent (> 1)");
  convergence->add_option("--epsilon", o.epsilon, "Rate slack");
  convergence->add_option("--s", o.s, "Splitting level override");
  convergence->add_option("--grid", o.grid, "Measurement grid length");
  convergence->add_option("--size", o.size, "Matrix size of synthesized input");

  auto* split = app.add_subcommand("split-order", "Local error of splitting schemes vs step size");
  add_common(split, o);
  split->add_option("--s", o.s, "Splitting level (0 = first order)");
  split->add_option("--generators", o.generators, "Generators per random set");
  split->add_option("--trials", o.trials, "Number of random sets");

  auto* verify = app.add_subcommand("verify", "Check that a loop file is SU(N)-valued");
  verify->add_option("input", o.input, "Loop or grid file")->required();

  auto* synth = app.add_subcommand("synth", "Write a synthetic smooth test loop");
  add_common(synth, o);
  synth->add_option("--alpha", o.synth_alpha, "Smoothness exponent of the synthetic loop");
  synth->add_option("--amplitude", o.amplitude, "Coefficient amplitude");
  synth->add_option("--max-degree", o.max_degree, "Bandlimit");
  synth->add_option("--size", o.size, "Matrix size");
  synth->add_option("--grid", o.grid, "Grid length for --kind grid");
  synth->add_option("--kind", o.kind, "factored | algebra | grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*approximate) return run_approximate(build_config(hs::Mode::Approximate, o), o.report);
    if (*convergence) return cmd_convergence(build_config(hs::Mode::Convergence, o));
    if (*split) return cmd_split_order(build_config(hs::Mode::SplitOrder, o));
    if (*verify) return run_verify(build_config(hs::Mode::Verify, o));
    if (*synth) return run_synth(build_config(hs::Mode::Synth, o), o.kind);
  } catch (const lf::BranchCutError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const lf::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const hs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lf::io::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lf::io::json::exception& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
