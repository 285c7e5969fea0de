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

#include "salbias/saliency_binning.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "salbias/corpus.hpp"
#include "salbias/error.hpp"

namespace salbias {

namespace {

constexpr std::array<SaliencyBin, kBinCount> kBins{{
    {1, 0.0, 0.2},
    {2, 0.2, 0.4},
    {3, 0.4, 0.6},
    {4, 0.6, 0.8},
    {5, 0.8, 1.0},
}};

constexpr std::array<std::string_view, kBinCount> kLabels{"< .2", ".2 - .4", ".4 - .6", ".6 - .8",
                                                          "> .8"};

}  // namespace

std::string_view SaliencyBin::label() const noexcept {
    return index >= 1 && index <= kBinCount ? kLabels[static_cast<std::size_t>(index - 1)] : "";
}

SaliencyBin bin_by_index(int index) {
    if (index < 1 || index > kBinCount)
        throw Error(ErrorCode::OutOfRange, fmt::format("bin index {} outside 1..5", index));
    return kBins[static_cast<std::size_t>(index - 1)];
}

const std::array<SaliencyBin, kBinCount>& all_bins() noexcept { return kBins; }

std::string_view to_string(SaliencySource s) noexcept {
    return s == SaliencySource::MachineFused ? "machine-fused" : "human-study";
}

std::optional<SaliencySource> parse_saliency_source(std::string_view s) noexcept {
    if (s == "machine-fused") return SaliencySource::MachineFused;
    if (s == "human-study") return SaliencySource::HumanStudy;
    return std::nullopt;
}

const SaliencyAssignment* AssignmentTable::find(std::string_view image_id) const {
    for (const auto& a : assigned)
        if (a.image_id == image_id) return &a;
    return nullptr;
}

PixelMap fuse_saliency(std::span<const PixelMap> maps) {
    if (maps.empty()) throw Error(ErrorCode::EmptyInput, "no saliency maps to fuse");
    const PixelMap& first = maps.front();
    std::vector<double> sum(first.size(), 0.0);
    for (const auto& m : maps) {
        if (!m.same_shape(first))
            throw Error(ErrorCode::DimensionMismatch,
                        fmt::format("saliency map {}x{} vs {}x{}", m.width(), m.height(),
                                    first.width(), first.height()));
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += m.values()[i];
    }
    const double n = static_cast<double>(maps.size());
    for (auto& v : sum) v = std::clamp(v / n, 0.0, 1.0);
    return PixelMap(first.width(), first.height(), std::move(sum));
}

MetricResult saliency_score(const PixelMap& fused, const TamperMask& gt) {
    if (fused.width() == gt.width() && fused.height() == gt.height()) return mean_recall(fused, gt);
    return mean_recall(align(fused, gt.width(), gt.height(), Resample::Soft), gt);
}

SaliencyBin assign_bin(double score) {
    if (!(score >= 0.0 && score <= 1.0))
        throw Error(ErrorCode::OutOfRange, fmt::format("saliency score {} outside [0,1]", score));
    for (const auto& bin : kBins)
        if (score < bin.upper) return bin;
    return kBins.back();
}

BinDistribution bin_distribution(std::span<const SaliencyAssignment> assignments) {
    BinDistribution d;
    for (const auto& a : assignments) ++d.counts[static_cast<std::size_t>(a.bin.index - 1)];
    d.total = assignments.size();
    if (d.total > 0)
        for (std::size_t i = 0; i < d.counts.size(); ++i)
            d.proportions[i] = static_cast<double>(d.counts[i]) / static_cast<double>(d.total);
    return d;
}

void write_assignment_table(const AssignmentTable& table, SaliencySource source,
                            const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::UnwritablePath, path.string());
    out << "image_id\tscore\tbin_index\tsource\n";
    for (const auto& a : table.assigned)
        out << fmt::format("{}\t{}\t{}\t{}\n", a.image_id, a.score, a.bin.index, to_string(a.source));
    for (const auto& id : table.undefined_ids)
        out << fmt::format("{}\tNA\tNA\t{}\n", id, to_string(source));
    if (!out) throw Error(ErrorCode::UnwritablePath, path.string());
}

AssignmentTable read_assignment_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, path.string());
    AssignmentTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.rfind("image_id\t", 0) == 0) continue;
        std::istringstream fields(line);
        std::string id, score, bin, source;
        if (!std::getline(fields, id, '\t') || !std::getline(fields, score, '\t') ||
            !std::getline(fields, bin, '\t') || !std::getline(fields, source, '\t'))
            throw Error(ErrorCode::ParseError, fmt::format("{}:{}: expected 4 fields", path.string(), line_no));
        const auto src = parse_saliency_source(source);
        if (!src) throw Error(ErrorCode::ParseError, fmt::format("{}:{}: bad source", path.string(), line_no));
        if (score == "NA") {
            table.undefined_ids.push_back(id);
            continue;
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(score.data(), score.data() + score.size(), value);
        if (ec != std::errc{} || ptr != score.data() + score.size())
            throw Error(ErrorCode::ParseError, fmt::format("{}:{}: bad score '{}'", path.string(), line_no, score));
        const SaliencyBin b = assign_bin(value);
        if (std::to_string(b.index) != bin)
            throw Error(ErrorCode::ParseError,
                        fmt::format("{}:{}: bin {} inconsistent with score {}", path.string(), line_no, bin, score));
        table.assigned.push_back({id, value, b, *src});
    }
    return table;
}

}  // namespace salbias
