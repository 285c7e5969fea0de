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

#include "salbias/semantic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "salbias/error.hpp"

namespace salbias {

std::string_view to_string(TagVariant v) noexcept {
    return v == TagVariant::Pristine ? "pristine" : "tampered";
}

void validate_trial(const TagTrial& trial) {
    if (trial.entries.size() < kMinTagsPerTrial)
        throw Error(ErrorCode::TooFewTags, fmt::format("trial {} has {} tags, need {}", trial.trial_index,
                                                       trial.entries.size(), kMinTagsPerTrial));
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < trial.entries.size(); ++i) {
        const auto& e = trial.entries[i];
        if (e.tag.empty()) throw Error(ErrorCode::SchemaViolation, "empty tag");
        if (!seen.insert(e.tag).second)
            throw Error(ErrorCode::SchemaViolation, fmt::format("tag '{}' repeated in trial {}", e.tag, trial.trial_index));
        if (!(e.probability >= 0.0 && e.probability <= 1.0))
            throw Error(ErrorCode::SchemaViolation, fmt::format("probability of '{}' outside [0,1]", e.tag));
        if (i > 0 && e.probability > trial.entries[i - 1].probability)
            throw Error(ErrorCode::SchemaViolation,
                        fmt::format("trial {} not sorted by probability at '{}'", trial.trial_index, e.tag));
    }
}

namespace {

std::vector<const TagEntry*> ranked(const TagTrial& trial) {
    std::vector<const TagEntry*> order;
    order.reserve(trial.entries.size());
    for (const auto& e : trial.entries) order.push_back(&e);
    std::sort(order.begin(), order.end(), [](const TagEntry* a, const TagEntry* b) {
        if (a->probability != b->probability) return a->probability > b->probability;
        return a->tag < b->tag;
    });
    return order;
}

}  // namespace

std::set<std::string> top_k(const TagTrial& trial, std::size_t k) {
    if (trial.entries.size() < k)
        throw Error(ErrorCode::TooFewTags, fmt::format("trial {} has {} tags, need {}", trial.trial_index,
                                                       trial.entries.size(), k));
    const auto order = ranked(trial);
    std::set<std::string> out;
    for (std::size_t i = 0; i < k; ++i) out.insert(order[i]->tag);
    return out;
}

TrialComparison trial_metrics(const TagTrial& pristine, const TagTrial& tampered) {
    validate_trial(pristine);
    validate_trial(tampered);
    constexpr std::size_t k = 5;

    const auto p_rank = ranked(pristine);
    const auto t_rank = ranked(tampered);
    std::unordered_map<std::string_view, double> t_prob;
    for (const auto& e : tampered.entries) t_prob.emplace(e.tag, e.probability);

    std::unordered_set<std::string_view> p_top, t_top;
    for (std::size_t i = 0; i < k; ++i) {
        p_top.insert(p_rank[i]->tag);
        t_top.insert(t_rank[i]->tag);
    }
    std::size_t common = 0;
    for (const auto& tag : p_top) common += t_top.count(tag);

    TrialComparison out;
    out.change.top1_overlap = p_rank[0]->tag == t_rank[0]->tag ? 1.0 : 0.0;
    out.change.top5_overlap = static_cast<double>(common) / static_cast<double>(k);
    out.change.top5_iou = static_cast<double>(common) / static_cast<double>(2 * k - common);
    for (std::size_t i = 0; i < k; ++i) {
        const TagEntry& e = *p_rank[i];
        double other = 0.0;
        if (const auto it = t_prob.find(e.tag); it != t_prob.end())
            other = it->second;
        else
            out.absent_tags.push_back(e.tag);
        out.change.top5_prob_change += std::abs(e.probability - other);
    }
    return out;
}

SemanticResult aggregate_semantic(const TagReport& pristine, const TagReport& tampered) {
    if (pristine.variant != TagVariant::Pristine || tampered.variant != TagVariant::Tampered)
        throw Error(ErrorCode::SchemaViolation, "expected a pristine and a tampered report");
    if (pristine.image_id != tampered.image_id)
        throw Error(ErrorCode::ImageIdMismatch, fmt::format("{} vs {}", pristine.image_id, tampered.image_id));
    if (pristine.trials.size() != tampered.trials.size())
        throw Error(ErrorCode::TrialCountMismatch,
                    fmt::format("{}: {} pristine vs {} tampered trials", pristine.image_id,
                                pristine.trials.size(), tampered.trials.size()));
    if (pristine.trials.empty())
        throw Error(ErrorCode::SchemaViolation, pristine.image_id + ": no trials");

    SemanticResult out;
    for (std::size_t i = 0; i < pristine.trials.size(); ++i) {
        auto cmp = trial_metrics(pristine.trials[i], tampered.trials[i]);
        out.change.top1_overlap += cmp.change.top1_overlap;
        out.change.top5_overlap += cmp.change.top5_overlap;
        out.change.top5_iou += cmp.change.top5_iou;
        out.change.top5_prob_change += cmp.change.top5_prob_change;
        for (auto& tag : cmp.absent_tags) out.absent_tags.push_back(std::move(tag));
    }
    const double t = static_cast<double>(pristine.trials.size());
    out.change.top1_overlap /= t;
    out.change.top5_overlap /= t;
    out.change.top5_iou /= t;
    out.change.top5_prob_change /= t;
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

TagReport parse_tag_report(std::string_view text) {
    TagReport report;
    bool have_variant = false;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    const auto fail = [&](const std::string& msg) {
        throw Error(ErrorCode::ParseError, fmt::format("line {}: {}", line_no, msg));
    };
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            int idx = 0;
            if (line.size() < 9 || line.substr(0, 7) != "[trial " || line.back() != ']')
                fail("expected '[trial N]'");
            const auto num = line.substr(7, line.size() - 8);
            const auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), idx);
            if (ec != std::errc{} || p != num.data() + num.size() ||
                idx != static_cast<int>(report.trials.size()) + 1)
                fail("trial blocks must be numbered 1..T in order");
            report.trials.push_back(TagTrial{{}, idx});
            continue;
        }
        if (report.trials.empty()) {
            const auto colon = line.find(':');
            if (colon == std::string_view::npos) fail("expected 'key: value'");
            const auto key = trim(line.substr(0, colon));
            const auto value = std::string(trim(line.substr(colon + 1)));
            if (key == "image_id") report.image_id = value;
            else if (key == "model") report.model = value;
            else if (key == "corpus") report.noun_corpus = value;
            else if (key == "variant") {
                if (value == "pristine") report.variant = TagVariant::Pristine;
                else if (value == "tampered") report.variant = TagVariant::Tampered;
                else fail("variant must be pristine or tampered");
                have_variant = true;
            } else {
                fail("unknown header key '" + std::string(key) + "'");
            }
            continue;
        }
        const auto tab = line.find_last_of(" \t");
        if (tab == std::string_view::npos) fail("expected '<tag>\\t<probability>'");
        const auto tag = trim(line.substr(0, tab));
        const auto prob = line.substr(tab + 1);
        double p = 0.0;
        const auto [ptr, ec] = std::from_chars(prob.data(), prob.data() + prob.size(), p);
        if (tag.empty() || ec != std::errc{} || ptr != prob.data() + prob.size())
            fail("bad tag line '" + std::string(line) + "'");
        report.trials.back().entries.push_back({std::string(tag), p});
    }
    if (report.image_id.empty()) throw Error(ErrorCode::ParseError, "tag report lacks image_id");
    if (!have_variant) throw Error(ErrorCode::ParseError, "tag report lacks variant");
    if (report.trials.empty()) throw Error(ErrorCode::ParseError, "tag report has no trials");
    for (const auto& t : report.trials) validate_trial(t);
    return report;
}

TagReport read_tag_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_tag_report(buf.str());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void write_tag_report(const TagReport& report, const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::UnwritablePath, path.string());
    out << "image_id: " << report.image_id << '\n'
        << "variant: " << to_string(report.variant) << '\n';
    if (!report.model.empty()) out << "model: " << report.model << '\n';
    if (!report.noun_corpus.empty()) out << "corpus: " << report.noun_corpus << '\n';
    for (const auto& t : report.trials) {
        out << "[trial " << t.trial_index << "]\n";
        for (const auto& e : t.entries) out << fmt::format("{}\t{}\n", e.tag, e.probability);
    }
}

}  // namespace salbias
