// Copyright 2026 The salbias Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>

#include "salbias/maps.hpp"

namespace salbias {

/// A per-image score. `value` is empty (Undefined) when the ground truth
/// cannot support the metric.
struct MetricResult {
    std::optional<double> value;
    std::size_t positives = 0;
    std::size_t negatives = 0;

    bool defined() const noexcept { return value.has_value(); }
};

/// Mean predicted score inside the ground-truth region. Undefined when the
/// mask has no positive pixel. Throws DimensionMismatch.
MetricResult mean_recall(const PixelMap& pred, const TamperMask& gt);

/// Pixel-wise area under the ROC curve as the Mann-Whitney statistic with
/// average ranks for ties, in O(n log n). Undefined for degenerate masks.
/// Throws DimensionMismatch.
MetricResult auroc(const PixelMap& pred, const TamperMask& gt);

}  // namespace salbias
