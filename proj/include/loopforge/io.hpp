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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "loopforge/pipeline.hpp"
#include "loopforge/su2_basis.hpp"
#include "loopforge/trig_loop.hpp"
#include "loopforge/vp_approx.hpp"

namespace loopforge::io {

using nlohmann::json;

/// Malformed or inconsistent file content.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DocumentKind { Loop, Grid, Factored };

/// Loop documents carry "coeffs", grid documents "samples", factored ones "factors".
DocumentKind document_kind(const json& doc);

json matrix_to_json(const MatrixXc& m);
MatrixXc matrix_from_json(const json& j);

/// { "n": size, "degree": d, "coeffs": [ { "k", "re", "im" } for k = -d..d ] }
json loop_to_json(const TrigLoop& loop);
TrigLoop loop_from_json(const json& j);

/// { "n": size, "length": G, "samples": [ { "g", "re", "im" } for g = 0..G-1 ] }
json grid_to_json(const Grid& grid);
Grid grid_from_json(const json& j);

/// { "n": N, "factors": [ { "u0": matrix, "A": loop | grid | path, "embed": [i,j] | "full" } ] }
/// Relative string paths in "A" resolve against base_dir.
json factored_to_json(const FactoredLoop<double>& f);
FactoredLoop<double> factored_from_json(const json& j, const std::filesystem::path& base_dir = {});

/// { "m": m, "c": [ { "r", "k", "v" } ] } with fake slots omitted.
json basis_coeffs_to_json(const BasisCoeffs<double>& c);
BasisCoeffs<double> basis_coeffs_from_json(const json& j);

json plan_to_json(const ApproxPlan& plan);
/// { "n", "plan", "sup_error", "degree", "unitarity_defect", "det_defect", "factor_errors" }
json report_to_json(const ApproxReport& report);

/// { "alpha", "amplitude", "seed", "max_degree" }
SmoothnessSpec smoothness_from_json(const json& j);
json smoothness_to_json(const SmoothnessSpec& spec);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& doc);

}  // namespace loopforge::io
