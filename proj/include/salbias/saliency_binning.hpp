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

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salbias/maps.hpp"
#include "salbias/pixel_metrics.hpp"

namespace salbias {

inline constexpr int kBinCount = 5;

/// One of the five saliency groups: [0,.2), [.2,.4), [.4,.6), [.6,.8), [.8,1].
struct SaliencyBin {
    int index = 1;  // 1..5
    double lower = 0.0;
    double upper = 0.2;

    std::string_view label() const noexcept;
    bool operator==(const SaliencyBin&) const = default;
};

SaliencyBin bin_by_index(int index);
const std::array<SaliencyBin, kBinCount>& all_bins() noexcept;

enum class SaliencySource { MachineFused, HumanStudy };
std::string_view to_string(SaliencySource s) noexcept;
std::optional<SaliencySource> parse_saliency_source(std::string_view s) noexcept;

struct SaliencyAssignment {
    std::string image_id;
    double score = 0.0;
    SaliencyBin bin;
    SaliencySource source = SaliencySource::MachineFused;
};

/// Scored corpus: assigned images in corpus order, plus images whose score is
/// Undefined (degenerate ground truth), which are carried but never binned.
struct AssignmentTable {
    std::vector<SaliencyAssignment> assigned;
    std::vector<std::string> undefined_ids;

    const SaliencyAssignment* find(std::string_view image_id) const;
};

/// Pointwise mean of pre-aligned maps. Throws EmptyInput, DimensionMismatch.
PixelMap fuse_saliency(std::span<const PixelMap> maps);

/// Mean Recall of the fused map over the manipulated region; aligns the map
/// to the mask first when their dims differ.
MetricResult saliency_score(const PixelMap& fused, const TamperMask& gt);

/// Half-open binning with 1.0 folded into bin 5. Throws OutOfRange.
SaliencyBin assign_bin(double score);

struct BinDistribution {
    std::array<std::size_t, kBinCount> counts{};
    std::array<double, kBinCount> proportions{};
    std::size_t total = 0;
};

BinDistribution bin_distribution(std::span<const SaliencyAssignment> assignments);

/// Tab-separated table: image_id, score, bin_index, source. Undefined rows
/// carry "NA" in score and bin_index.
void write_assignment_table(const AssignmentTable& table, SaliencySource source,
                            const std::filesystem::path& path);
AssignmentTable read_assignment_table(const std::filesystem::path& path);

}  // namespace salbias
