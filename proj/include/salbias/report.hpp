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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "salbias/corpus.hpp"
#include "salbias/pixel_metrics.hpp"
#include "salbias/saliency_binning.hpp"
#include "salbias/semantic.hpp"

namespace salbias {

enum class Condition { Original, SaliencyEnhanced, ResizedBaseline };
std::string_view to_string(Condition c) noexcept;
std::optional<Condition> parse_condition(std::string_view s) noexcept;

struct ImageScore {
    std::string image_id;
    MetricResult result;
};

/// Per-image AuROC of one detector under one condition, in corpus order.
struct DetectorRun {
    std::string detector_name;
    Condition condition = Condition::Original;
    std::vector<ImageScore> scores;
};

/// Scores every image's `detector-heatmap:<detector>[@condition]` artifact
/// against its tamper mask, at mask resolution. Throws MissingArtifact.
DetectorRun evaluate_run(const Corpus& corpus, std::string_view detector, Condition condition,
                         const ArtifactLayout* layout = nullptr, unsigned jobs = 1);

void write_run(const DetectorRun& run, const std::filesystem::path& path);
DetectorRun read_run(const std::filesystem::path& path);

struct BinStats {
    SaliencyBin bin;
    std::size_t count = 0;      // images assigned to the bin
    std::size_t undefined = 0;  // of which AuROC is Undefined
    std::optional<double> mean; // over defined entries
    double sum = 0.0;
};

struct BinReport {
    std::string dataset;
    std::string detector;
    Condition condition = Condition::Original;
    std::array<BinStats, kBinCount> bins{};
    std::optional<double> overall_mean;
    /// Images without a bin: Undefined saliency, no assignment, or listed in
    /// the exclusion set.
    std::size_t excluded = 0;
};

BinReport bin_means(const DetectorRun& run, const AssignmentTable& assignments,
                    const std::set<std::string, std::less<>>& exclusions = {});

struct BinDelta {
    std::optional<double> before;
    std::optional<double> after;
    std::optional<double> delta;  // after - before
};

struct EnhancementDelta {
    std::string dataset;
    std::string detector;
    Condition before_condition = Condition::Original;
    Condition after_condition = Condition::SaliencyEnhanced;
    std::array<BinDelta, kBinCount> bins{};
    /// Range over bins (max - min of defined per-bin means).
    std::optional<double> variation_before;
    std::optional<double> variation_after;
};

/// Throws ImageSetMismatch when the runs cover different images.
EnhancementDelta enhancement_delta(const DetectorRun& before, const DetectorRun& after,
                                   const AssignmentTable& assignments,
                                   const std::set<std::string, std::less<>>& exclusions = {});

enum class Trend { Flat, Rising, Falling, Mixed };
std::string_view to_string(Trend t) noexcept;

/// Direction of a sequence of per-bin values, ignoring Undefined bins.
Trend trend_of(const std::array<std::optional<double>, kBinCount>& values);

struct SemanticBin {
    SaliencyBin bin;
    std::size_t count = 0;
    std::optional<SemanticChange> mean;
};

struct SemanticTrend {
    std::string dataset;
    std::array<SemanticBin, kBinCount> bins{};
    Trend top1_overlap = Trend::Flat;
    Trend top5_overlap = Trend::Flat;
    Trend top5_iou = Trend::Flat;
    Trend top5_prob_change = Trend::Flat;
};

SemanticTrend semantic_trend(const AssignmentTable& assignments,
                             const std::map<std::string, SemanticChange, std::less<>>& results,
                             const std::set<std::string, std::less<>>& exclusions = {});

struct DistributionReport {
    std::string dataset;
    BinDistribution distribution;
};

/// Everything one `report` invocation renders.
struct ReportSet {
    std::string corpus_hash;
    std::vector<DistributionReport> distributions;
    std::vector<BinReport> detection;
    std::vector<EnhancementDelta> enhancement;
    std::vector<SemanticTrend> semantic;
};

enum class ReportFormat { TableText, DelimitedValues, Json };
std::optional<ReportFormat> parse_report_format(std::string_view s) noexcept;

/// Writes the report files for `format` under `out_dir` and returns their
/// paths. Output bytes depend only on the inputs. Throws UnwritablePath.
std::vector<std::filesystem::path> emit_report(const ReportSet& reports, ReportFormat format,
                                               const std::filesystem::path& out_dir);

/// Fixed 4-decimal, locale-independent rendering; "NA" when empty.
std::string format_score(std::optional<double> v);

}  // namespace salbias
