// Copyright 2026 The tdulab Authors. All rights reserved.
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

#include "tdulab/nn/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tdulab {

GradCheckResult CheckGradient(
    std::span<const double> point, std::span<const double> analytic,
    const std::function<double(std::span<const double>)>& loss,
    GradCheckOptions options) {
  if (point.size() != analytic.size()) {
    throw std::invalid_argument("CheckGradient: size mismatch");
  }
  GradCheckResult result;
  std::vector<double> x(point.begin(), point.end());
  double diff_sq = 0.0, numeric_sq = 0.0, analytic_sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + options.step;
    const double up = loss(x);
    x[i] = saved - options.step;
    const double down = loss(x);
    x[i] = saved;
    const double numeric = (up - down) / (2.0 * options.step);
    const double abs_err = std::abs(numeric - analytic[i]);
    diff_sq += abs_err * abs_err;
    numeric_sq += numeric * numeric;
    analytic_sq += analytic[i] * analytic[i];
    const double scale = std::max(std::abs(numeric), std::abs(analytic[i]));
    const double rel_err = scale > 0.0 ? abs_err / scale : 0.0;
    const bool ok = abs_err <= options.absolute_floor ||
                    rel_err <= options.relative_tolerance;
    ++result.num_checked;
    if (!ok) ++result.num_failed;
    result.max_absolute_error = std::max(result.max_absolute_error, abs_err);
    // Only coordinates above the floor count toward the reported maximum.
    if (abs_err > options.absolute_floor &&
        rel_err > result.max_relative_error) {
      result.max_relative_error = rel_err;
      result.worst_index = i;
    }
  }
  const double norm = std::sqrt(std::max(numeric_sq, analytic_sq));
  result.norm_relative_error = norm > 0.0 ? std::sqrt(diff_sq) / norm : 0.0;
  return result;
}

}  // namespace tdulab
