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

#include "loopforge/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <thread>

namespace loopforge::harness {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T get_or(const io::json& j, const char* name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const io::json::exception& e) {
    throw ConfigError(std::string("config field \"") + name + "\": " + e.what());
  }
}

std::vector<double> logspace(double lo_exp, double hi_exp, int points) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) {
    out.push_back(std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / (points - 1)));
  }
  return out;
}

// Runs body(i) for i in [0, count) on up to thread_cap() threads.
template <typename Body>
void parallel_for(size_t count, Body body) {
  const size_t workers = std::min<size_t>(std::max(1u, thread_cap()), count);
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < count; i = next++) body(i);
  };
  std::vector<std::jthread> pool;
  for (size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
}

}  // namespace

Mode mode_from_string(const std::string& name) {
  if (name == "approximate") return Mode::Approximate;
  if (name == "convergence") return Mode::Convergence;
  if (name == "split-order") return Mode::SplitOrder;
  if (name == "verify") return Mode::Verify;
  if (name == "synth") return Mode::Synth;
  throw ConfigError("unknown mode \"" + name + "\"");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Approximate: return "approximate";
    case Mode::Convergence: return "convergence";
    case Mode::SplitOrder: return "split-order";
    case Mode::Verify: return "verify";
    case Mode::Synth: return "synth";
  }
  return "unknown";
}

ExperimentConfig config_from_json(const io::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  if (j.contains("mode")) c.mode = mode_from_string(get_or<std::string>(j, "mode", ""));
  c.input = get_or<std::string>(j, "input", c.input);
  c.output = get_or<std::string>(j, "output", c.output);
  if (j.contains("n")) {
    const auto& n = j.at("n");
    c.n_list = n.is_array() ? n.get<std::vector<Index>>() : std::vector<Index>{n.get<Index>()};
  }
  c.alpha = get_or(j, "alpha", c.alpha);
  c.epsilon = get_or(j, "epsilon", c.epsilon);
  if (j.contains("s") && !j.at("s").is_null()) c.s = get_or<int>(j, "s", 1);
  c.seed = get_or(j, "seed", c.seed);
  c.grid = get_or(j, "grid", c.grid);
  c.size = get_or(j, "size", c.size);
  c.max_step = get_or(j, "max_step", c.max_step);
  if (j.contains("synth")) {
    try {
      c.synth = io::smoothness_from_json(j.at("synth"));
    } catch (const io::FormatError& e) {
      throw ConfigError(e.what());
    }
  }
  c.generators = get_or(j, "generators", c.generators);
  c.trials = get_or(j, "trials", c.trials);
  c.lambdas = get_or(j, "lambdas", c.lambdas);
  return c;
}

void validate(const ExperimentConfig& c) {
  for (size_t i = 1; i < c.n_list.size(); ++i) {
    if (c.n_list[i] <= c.n_list[i - 1]) throw ConfigError("n list must be strictly increasing");
  }
  for (Index n : c.n_list) {
    if (n < 0) throw ConfigError("n must be non-negative");
  }
  if (!is_pow2(c.grid)) throw ConfigError("grid length must be a power of two");
  if (c.size < 2) throw ConfigError("size must be >= 2");
  if (c.s && *c.s < 0) throw ConfigError("s must be >= 0");
  if ((c.mode == Mode::Approximate || c.mode == Mode::Convergence) && c.n_list.empty()) {
    throw ConfigError("at least one n is required");
  }
  if ((c.mode == Mode::Approximate || c.mode == Mode::Convergence) && !(c.alpha > 1)) {
    throw ConfigError("alpha must exceed 1");
  }
  if (!(c.epsilon > 0)) throw ConfigError("epsilon must be positive");
  if (c.mode == Mode::SplitOrder && (c.generators < 1 || c.trials < 1)) {
    throw ConfigError("split-order needs generators >= 1 and trials >= 1");
  }
  if (c.mode == Mode::Verify && c.input.empty()) throw ConfigError("verify needs an input file");
}

unsigned thread_cap() {
  if (const char* env = std::getenv("LOOPFORGE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return unsigned(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> xs, ys;
  for (const auto& [n, err] : points) {
    if (err > 1e-12 && n > 0) {
      xs.push_back(n);
      ys.push_back(err);
    }
  }
  if (xs.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points with error > 1e-12");
  const auto fit = loglog_fit(xs, ys);
  return {fit.slope, 2.0 * fit.slope_stderr};
}

FactoredLoop<double> experiment_input(const ExperimentConfig& config) {
  if (!config.input.empty()) {
    const std::filesystem::path path(config.input);
    const auto doc = io::read_json_file(path);
    switch (io::document_kind(doc)) {
      case io::DocumentKind::Factored:
        return io::factored_from_json(doc, path.parent_path());
      case io::DocumentKind::Grid:
        return homotopy_factorize(io::grid_from_json(doc), config.max_step);
      case io::DocumentKind::Loop:
        throw ConfigError("input must be a factored loop or a sampled grid, not a bare polynomial loop");
    }
  }
  FactoredLoop<double> f;
  f.size = config.size;
  f.factors.push_back({MatrixXc::Identity(config.size, config.size),
                       synth_lip_su_loop(config.synth, config.size), std::nullopt});
  return f;
}

ConvergenceReport run_convergence(const ExperimentConfig& config) {
  validate(config);
  const auto input = experiment_input(config);
  const auto reference = reconstruct(input, config.grid);

  ConvergenceReport report;
  report.rows.resize(config.n_list.size());
  parallel_for(config.n_list.size(), [&](size_t i) {
    ConvergenceRow& row = report.rows[i];
    row.n = config.n_list[i];
    ApproxOptions options;
    options.n = row.n;
    options.alpha = config.alpha;
    options.epsilon = config.epsilon;
    options.s = config.s;
    options.grid = config.grid;
    options.max_step = config.max_step;
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto result = approximate_loop(input, options, std::optional<Grid>(reference));
      row.sup_error = result.report.sup_error;
      row.degree = result.report.degree;
      row.s = result.report.plan.s;
      row.m = result.report.plan.m;
      row.M = result.report.plan.M;
      row.L = result.report.plan.factors;
      row.unitarity_defect = result.report.unitarity_defect;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  std::vector<std::pair<double, double>> points;
  for (const auto& row : report.rows) {
    if (!row.failed) points.emplace_back(double(row.n), row.sup_error);
  }
  try {
    report.fit = fit_rate(points);
  } catch (const std::invalid_argument&) {
    report.fit.reset();
  }
  return report;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "n,sup_error,degree,s,m,M,L,unitarity_defect,seconds\n";
  for (const auto& row : report.rows) {
    out << row.n << ',';
    if (row.failed) {
      out << "failed,,,,,,,";
    } else {
      out << format_double(row.sup_error) << ',' << row.degree << ',' << row.s << ',' << row.m
          << ',' << row.M << ',' << row.L << ',' << format_double(row.unitarity_defect) << ',';
    }
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.6f", row.seconds);
    out << secs << '\n';
  }
}

io::json convergence_summary(const ConvergenceReport& report) {
  io::json j;
  j["rows"] = report.rows.size();
  j["failed"] = std::count_if(report.rows.begin(), report.rows.end(),
                              [](const ConvergenceRow& r) { return r.failed; });
  if (report.fit) {
    j["slope"] = report.fit->slope;
    j["slope_half_width"] = report.fit->half_width;
  } else {
    j["slope"] = nullptr;
    j["slope_half_width"] = nullptr;
  }
  io::json errors = io::json::array();
  for (const auto& row : report.rows) {
    if (row.failed) errors.push_back({{"n", row.n}, {"error", row.error}});
  }
  j["errors"] = std::move(errors);
  return j;
}

MatrixXc random_su2(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0, 1);
  Eigen::Vector3d v;
  do {
    v = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
  } while (v.norm() == 0);
  v.normalize();
  return v(0) * su2_axis(1) + v(1) * su2_axis(2) + v(2) * su2_axis(3);
}

std::vector<double> default_lambdas(int s) {
  if (s <= 1) return logspace(-1.0, -3.0, 9);
  if (s == 2) return logspace(-0.5, -2.0, 7);
  return logspace(-0.5, -1.5, 6);
}

SplitOrderReport run_split_order(const ExperimentConfig& config) {
  validate(config);
  const int s = config.s.value_or(1);
  const auto lambdas = config.lambdas.empty() ? default_lambdas(s) : config.lambdas;
  const int order = build_scheme(s, 1).order();
  SplitOrderReport report;
  for (Index trial = 0; trial < config.trials; ++trial) {
    const std::uint64_t seed = config.seed + std::uint64_t(trial);
    std::mt19937_64 rng(seed);
    std::vector<MatrixXc> gens;
    for (Index j = 0; j < config.generators; ++j) gens.push_back(random_su2(rng));
    const auto study = order_study(gens, s, lambdas);
    for (const auto& row : study.rows) report.rows.push_back({row.lambda, row.error, order, seed});
    report.slopes.push_back(study.slope);
  }
  return report;
}

void write_split_order_csv(std::ostream& out, const SplitOrderReport& report) {
  out << "lambda,error,scheme_order,seed\n";
  for (const auto& row : report.rows) {
    out << format_double(row.lambda) << ',' << format_double(row.error) << ',' << row.scheme_order
        << ',' << row.seed << '\n';
  }
}

VerifyResult verify_document(const io::json& doc) {
  VerifyResult result;
  switch (io::document_kind(doc)) {
    case io::DocumentKind::Loop: {
      const auto loop = io::loop_from_json(doc);
      result.defects = classify(loop, LoopClass::UnitaryGroup);
      result.degree = loop.degree();
      result.trimmed_degree = degree_trim(loop).degree();
      break;
    }
    case io::DocumentKind::Grid: {
      const auto grid = io::grid_from_json(doc);
      result.defects = classify(grid, LoopClass::UnitaryGroup);
      const auto loop = analyze(grid, (grid.length() - 1) / 2);
      result.degree = loop.degree();
      result.trimmed_degree = degree_trim(loop).degree();
      break;
    }
    case io::DocumentKind::Factored:
      throw io::FormatError("verify expects a loop or grid file");
  }
  result.ok = result.defects.max_defect() <= kVerifyTolerance;
  return result;
}

VerifyResult verify_file(const std::string& path) { return verify_document(io::read_json_file(path)); }

io::json verify_to_json(const VerifyResult& r) {
  return {{"unitarity_defect", r.defects.unitarity_defect},
          {"det_defect", r.defects.determinant_defect},
          {"degree", r.degree},
          {"trimmed_degree", r.trimmed_degree},
          {"ok", r.ok}};
}

}  // namespace loopforge::harness
