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
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace salbias {

struct TagEntry {
    std::string tag;
    double probability = 0.0;
};

/// Ranked output of one stochastic tagging inference.
struct TagTrial {
    std::vector<TagEntry> entries;
    int trial_index = 1;
};

enum class TagVariant { Pristine, Tampered };
std::string_view to_string(TagVariant v) noexcept;

struct TagReport {
    std::string image_id;
    TagVariant variant = TagVariant::Pristine;
    std::string model;
    std::string noun_corpus;
    std::vector<TagTrial> trials;
};

inline constexpr std::size_t kMinTagsPerTrial = 5;

/// Checks uniqueness, range, ordering and minimum length. Throws
/// TooFewTags or SchemaViolation.
void validate_trial(const TagTrial& trial);

/// First k tags by probability, ties broken by lexicographic tag order.
/// Throws TooFewTags.
std::set<std::string> top_k(const TagTrial& trial, std::size_t k);

/// Metrics for one pristine/tampered trial pair.
struct SemanticChange {
    double top1_overlap = 0.0;
    double top5_overlap = 0.0;
    double top5_iou = 0.0;
    double top5_prob_change = 0.0;
};

struct TrialComparison {
    SemanticChange change;
    /// Pristine top-5 tags with no probability in the tampered list (scored as 0).
    std::vector<std::string> absent_tags;
};

TrialComparison trial_metrics(const TagTrial& pristine, const TagTrial& tampered);

struct SemanticResult {
    SemanticChange change;
    std::vector<std::string> absent_tags;  // across all trial pairs
};

/// Pairs trial i with trial i and averages each component. Throws
/// TrialCountMismatch, ImageIdMismatch, SchemaViolation.
SemanticResult aggregate_semantic(const TagReport& pristine, const TagReport& tampered);

/// Tag report text file:
///   image_id: <id>
///   variant: pristine|tampered
///   model: <name/version>
///   corpus: <noun corpus id>
///   [trial 1]
///   <tag>\t<probability>
///   ...
/// Blank lines and `#` comments are ignored.
TagReport read_tag_report(const std::filesystem::path& path);
TagReport parse_tag_report(std::string_view text);
void write_tag_report(const TagReport& report, const std::filesystem::path& path);

}  // namespace salbias
