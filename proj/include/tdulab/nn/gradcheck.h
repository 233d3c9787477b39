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

#ifndef TDULAB_NN_GRADCHECK_H_
#define TDULAB_NN_GRADCHECK_H_

#include <cstddef>
#include <functional>
#include <span>

namespace tdulab {

struct GradCheckOptions {
  double step = 1e-5;
  double relative_tolerance = 1e-4;
  double absolute_floor = 1e-7;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::size_t worst_index = 0;
  // |numeric - analytic| / max(|numeric|, |analytic|) over the whole vector.
  double norm_relative_error = 0.0;
  std::size_t num_checked = 0;
  std::size_t num_failed = 0;
  bool passed() const { return num_failed == 0; }
};

// Compares an analytic gradient against central differences of `loss`, which
// is evaluated at a perturbed copy of `point`. A coordinate passes when its
// error is within the absolute floor or within the relative tolerance of the
// larger of the two magnitudes.
GradCheckResult CheckGradient(
    std::span<const double> point, std::span<const double> analytic,
    const std::function<double(std::span<const double>)>& loss,
    GradCheckOptions options = {});

}  // namespace tdulab

#endif  // TDULAB_NN_GRADCHECK_H_
