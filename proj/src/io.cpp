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

#include "loopforge/io.hpp"

#include <fstream>
#include <sstream>

namespace loopforge::io {

namespace {

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw FormatError(std::string("missing field \"") + name + "\"");
  }
  return j.at(name);
}

template <typename T>
T get_field(const json& j, const char* name) {
  try {
    return field(j, name).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad field \"") + name + "\": " + e.what());
  }
}

json real_rows(const MatrixXc& m, bool imag) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXc matrix_from_parts(const json& re, const json& im) {
  if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.empty()) {
    throw FormatError("matrix: \"re\" and \"im\" must be non-empty arrays of equal shape");
  }
  const Index rows = Index(re.size());
  const Index cols = Index(re[0].size());
  MatrixXc m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!re[i].is_array() || !im[i].is_array() || Index(re[i].size()) != cols ||
        Index(im[i].size()) != cols) {
      throw FormatError("matrix: ragged rows");
    }
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = {re[i][j].get<double>(), im[i][j].get<double>()};
    }
  }
  return m;
}

void expect_square(const MatrixXc& m, Index n, const std::string& what) {
  if (m.rows() != n || m.cols() != n) {
    throw FormatError(what + ": expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
}

}  // namespace

DocumentKind document_kind(const json& doc) {
  if (doc.is_object()) {
    if (doc.contains("factors")) return DocumentKind::Factored;
    if (doc.contains("samples")) return DocumentKind::Grid;
    if (doc.contains("coeffs")) return DocumentKind::Loop;
  }
  throw FormatError("unrecognized document: expected \"coeffs\", \"samples\" or \"factors\"");
}

json matrix_to_json(const MatrixXc& m) { return {{"re", real_rows(m, false)}, {"im", real_rows(m, true)}}; }

MatrixXc matrix_from_json(const json& j) { return matrix_from_parts(field(j, "re"), field(j, "im")); }

json loop_to_json(const TrigLoop& loop) {
  json coeffs = json::array();
  for (Index k = -loop.degree(); k <= loop.degree(); ++k) {
    const MatrixXc c = loop.coeff(k);
    coeffs.push_back({{"k", k}, {"re", real_rows(c, false)}, {"im", real_rows(c, true)}});
  }
  return {{"n", loop.size()}, {"degree", loop.degree()}, {"coeffs", std::move(coeffs)}};
}

TrigLoop loop_from_json(const json& j) {
  const auto n = get_field<Index>(j, "n");
  const auto d = get_field<Index>(j, "degree");
  if (n < 1 || d < 0) throw FormatError("loop: invalid size or degree");
  const json& coeffs = field(j, "coeffs");
  if (!coeffs.is_array() || Index(coeffs.size()) != 2 * d + 1) {
    throw FormatError("loop: expected " + std::to_string(2 * d + 1) + " coefficient blocks");
  }
  TrigLoop loop(n, d);
  for (Index idx = 0; idx < 2 * d + 1; ++idx) {
    const json& entry = coeffs[idx];
    const auto k = get_field<Index>(entry, "k");
    if (k != idx - d) throw FormatError("loop: coefficients must be listed for k = -d..d in order");
    const MatrixXc c = matrix_from_parts(field(entry, "re"), field(entry, "im"));
    expect_square(c, n, "loop coefficient " + std::to_string(k));
    loop.coeff(k) = c;
  }
  return loop;
}

json grid_to_json(const Grid& grid) {
  json samples = json::array();
  for (Index g = 0; g < grid.length(); ++g) {
    const MatrixXc v = grid.at(g);
    samples.push_back({{"g", g}, {"re", real_rows(v, false)}, {"im", real_rows(v, true)}});
  }
  return {{"n", grid.size()}, {"length", grid.length()}, {"samples", std::move(samples)}};
}

Grid grid_from_json(const json& j) {
  const auto n = get_field<Index>(j, "n");
  const json& samples = field(j, "samples");
  if (!samples.is_array() || samples.empty()) throw FormatError("grid: \"samples\" must be a non-empty array");
  const Index length = j.contains("length") ? get_field<Index>(j, "length") : Index(samples.size());
  if (n < 1 || length != Index(samples.size())) throw FormatError("grid: inconsistent size or length");
  Grid grid(n, length);
  for (Index g = 0; g < length; ++g) {
    const json& entry = samples[g];
    if (entry.contains("g") && entry.at("g").get<Index>() != g) {
      throw FormatError("grid: samples must be listed for g = 0..G-1 in order");
    }
    const MatrixXc v = matrix_from_parts(field(entry, "re"), field(entry, "im"));
    expect_square(v, n, "grid sample " + std::to_string(g));
    grid.at(g) = v;
  }
  return grid;
}

json factored_to_json(const FactoredLoop<double>& f) {
  json factors = json::array();
  for (const auto& factor : f.factors) {
    json entry;
    entry["u0"] = matrix_to_json(factor.u0);
    entry["A"] = std::visit(
        [](const auto& a) -> json {
          if constexpr (std::is_same_v<std::decay_t<decltype(a)>, TrigLoop>) {
            return loop_to_json(a);
          } else {
            return grid_to_json(a);
          }
        },
        factor.exponent);
    if (factor.plane) {
      entry["embed"] = json::array({factor.plane->i, factor.plane->j});
    } else {
      entry["embed"] = "full";
    }
    factors.push_back(std::move(entry));
  }
  return {{"n", f.size}, {"factors", std::move(factors)}};
}

FactoredLoop<double> factored_from_json(const json& j, const std::filesystem::path& base_dir) {
  FactoredLoop<double> f;
  f.size = get_field<Index>(j, "n");
  const json& factors = field(j, "factors");
  if (!factors.is_array() || factors.empty()) throw FormatError("factored: \"factors\" must be a non-empty array");
  for (const json& entry : factors) {
    LoopFactor<double> factor;
    factor.u0 = matrix_from_json(field(entry, "u0"));
    expect_square(factor.u0, f.size, "u0");

    json a = field(entry, "A");
    if (a.is_string()) a = read_json_file(base_dir / a.get<std::string>());
    switch (document_kind(a)) {
      case DocumentKind::Loop:
        factor.exponent = loop_from_json(a);
        break;
      case DocumentKind::Grid:
        factor.exponent = grid_from_json(a);
        break;
      case DocumentKind::Factored:
        throw FormatError("factored: exponent \"A\" cannot itself be factored");
    }

    const json& embed = field(entry, "embed");
    if (embed.is_string()) {
      if (embed.get<std::string>() != "full") throw FormatError("factored: embed must be [i,j] or \"full\"");
    } else if (embed.is_array() && embed.size() == 2) {
      factor.plane = PlanePair{embed[0].get<Index>(), embed[1].get<Index>()};
    } else {
      throw FormatError("factored: embed must be [i,j] or \"full\"");
    }
    f.factors.push_back(std::move(factor));
  }
  try {
    validate(f);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return f;
}

json basis_coeffs_to_json(const BasisCoeffs<double>& c) {
  json entries = json::array();
  for (int r = 1; r <= kBasisFamilies; ++r) {
    for (Index k = 0; k <= c.m(); ++k) {
      if (is_fake_slot(r, k)) continue;
      entries.push_back({{"r", r}, {"k", k}, {"v", c(r, k)}});
    }
  }
  return {{"m", c.m()}, {"c", std::move(entries)}};
}

BasisCoeffs<double> basis_coeffs_from_json(const json& j) {
  BasisCoeffs<double> c(get_field<Index>(j, "m"));
  for (const json& entry : field(j, "c")) {
    const int r = get_field<int>(entry, "r");
    const Index k = get_field<Index>(entry, "k");
    if (r < 1 || r > kBasisFamilies || k < 0 || k > c.m() || is_fake_slot(r, k)) {
      throw FormatError("basis coefficients: invalid slot (" + std::to_string(r) + "," +
                        std::to_string(k) + ")");
    }
    c.set(r, k, get_field<double>(entry, "v"));
  }
  return c;
}

json plan_to_json(const ApproxPlan& plan) {
  return {{"N", plan.size},      {"L", plan.factors}, {"alpha", plan.alpha},
          {"epsilon", plan.epsilon}, {"s", plan.s},   {"m", plan.m},
          {"M", plan.M},          {"n", plan.n},       {"feasible", plan.feasible},
          {"degree_bound", plan.degree_bound()}};
}

json report_to_json(const ApproxReport& report) {
  return {{"n", report.n},
          {"plan", plan_to_json(report.plan)},
          {"sup_error", report.sup_error},
          {"degree", report.degree},
          {"unitarity_defect", report.unitarity_defect},
          {"det_defect", report.det_defect},
          {"factor_errors", report.factor_errors}};
}

SmoothnessSpec smoothness_from_json(const json& j) {
  SmoothnessSpec spec;
  if (!j.is_object()) throw FormatError("smoothness spec must be an object");
  if (j.contains("alpha")) spec.alpha = get_field<double>(j, "alpha");
  if (j.contains("amplitude")) spec.amplitude = get_field<double>(j, "amplitude");
  if (j.contains("seed")) spec.seed = get_field<std::uint64_t>(j, "seed");
  if (j.contains("max_degree")) spec.max_degree = get_field<Index>(j, "max_degree");
  if (!(spec.alpha > 0) || spec.max_degree < 1) throw FormatError("smoothness spec: need alpha > 0, max_degree >= 1");
  return spec;
}

json smoothness_to_json(const SmoothnessSpec& spec) {
  return {{"alpha", spec.alpha}, {"amplitude", spec.amplitude}, {"seed", spec.seed},
          {"max_degree", spec.max_degree}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

}  // namespace loopforge::io
