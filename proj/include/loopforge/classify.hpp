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

#include <algorithm>

#include "loopforge/trig_loop.hpp"

namespace loopforge {

enum class LoopClass { UnitaryGroup, Algebra };

/// Sup-over-grid defects certifying SU(N)- or su(N)-valuedness. All fields >= 0.
struct LoopClassReport {
  double unitarity_defect = 0;  // ||U^H U - I||_2
  double determinant_defect = 0;  // |det U - 1|
  double skewness_defect = 0;  // ||X + X^H||_2
  double trace_defect = 0;  // |tr X|

  double max_defect() const {
    return std::max({unitarity_defect, determinant_defect, skewness_defect, trace_defect});
  }
};

template <typename Real>
LoopClassReport classify(const GridLoop<Real>& grid, LoopClass cls) {
  using Matrix = MatrixC<Real>;
  LoopClassReport report;
  const Index n = grid.size();
  const Matrix eye = Matrix::Identity(n, n);
  for (Index g = 0; g < grid.length(); ++g) {
    const Matrix value = grid.at(g);
    if (cls == LoopClass::UnitaryGroup) {
      report.unitarity_defect = std::max<double>(report.unitarity_defect,
                                                 operator_norm(value.adjoint() * value - eye));
      report.determinant_defect = std::max<double>(report.determinant_defect,
                                                   std::abs(value.determinant() - Real(1)));
    } else {
      report.skewness_defect = std::max<double>(report.skewness_defect,
                                                operator_norm(value + value.adjoint()));
      report.trace_defect = std::max<double>(report.trace_defect, std::abs(value.trace()));
    }
  }
  return report;
}

/// Samples the loop on at least 4 (degree + 1) points and classifies the samples.
template <typename Real>
LoopClassReport classify(const TrigMatrixLoop<Real>& loop, LoopClass cls, Index min_grid = 64) {
  return classify(sample(loop, measurement_grid(loop.degree(), 4, min_grid)), cls);
}

}  // namespace loopforge
