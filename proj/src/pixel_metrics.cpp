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

#include "salbias/pixel_metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "salbias/error.hpp"

namespace salbias {

namespace {

void require_same_dims(const PixelMap& pred, const TamperMask& gt) {
    if (pred.width() != gt.width() || pred.height() != gt.height())
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("prediction {}x{} vs mask {}x{}", pred.width(), pred.height(),
                                gt.width(), gt.height()));
}

}  // namespace

MetricResult mean_recall(const PixelMap& pred, const TamperMask& gt) {
    require_same_dims(pred, gt);
    MetricResult r;
    r.positives = gt.positive_count();
    r.negatives = gt.negative_count();
    if (r.positives == 0) return r;

    double sum = 0.0;
    const auto& bits = gt.bits();
    const auto& values = pred.values();
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) sum += values[i];
    r.value = sum / static_cast<double>(r.positives);
    return r;
}

MetricResult auroc(const PixelMap& pred, const TamperMask& gt) {
    require_same_dims(pred, gt);
    MetricResult r;
    r.positives = gt.positive_count();
    r.negatives = gt.negative_count();
    if (r.positives == 0 || r.negatives == 0) return r;

    const auto& values = pred.values();
    const auto& bits = gt.bits();
    std::vector<std::uint32_t> order(values.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });

    // Walk tie groups in ascending score order. A positive earns 1 per
    // negative strictly below and 1/2 per tied negative; doubled credit stays
    // integral, so the statistic is exact.
    std::uint64_t doubled_credit = 0;
    std::uint64_t negatives_below = 0;
    for (std::size_t start = 0; start < order.size();) {
        std::size_t end = start;
        std::uint64_t pos_in_group = 0;
        std::uint64_t neg_in_group = 0;
        while (end < order.size() && values[order[end]] == values[order[start]]) {
            if (bits[order[end]]) ++pos_in_group;
            else ++neg_in_group;
            ++end;
        }
        doubled_credit += pos_in_group * (2 * negatives_below + neg_in_group);
        negatives_below += neg_in_group;
        start = end;
    }
    const double pairs = static_cast<double>(r.positives) * static_cast<double>(r.negatives);
    r.value = static_cast<double>(doubled_credit) / (2.0 * pairs);
    return r;
}

}  // namespace salbias
