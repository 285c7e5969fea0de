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

#include "salbias/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "salbias/error.hpp"
#include "salbias/parallel.hpp"
#include "salbias/provenance.hpp"

namespace salbias {

std::string_view to_string(Condition c) noexcept {
    switch (c) {
        case Condition::Original: return "original";
        case Condition::SaliencyEnhanced: return "saliency-enhanced";
        case Condition::ResizedBaseline: return "resized-baseline";
    }
    return "original";
}

std::optional<Condition> parse_condition(std::string_view s) noexcept {
    if (s == "original") return Condition::Original;
    if (s == "saliency-enhanced") return Condition::SaliencyEnhanced;
    if (s == "resized-baseline") return Condition::ResizedBaseline;
    return std::nullopt;
}

std::string_view to_string(Trend t) noexcept {
    switch (t) {
        case Trend::Flat: return "flat";
        case Trend::Rising: return "rising";
        case Trend::Falling: return "falling";
        case Trend::Mixed: return "mixed";
    }
    return "flat";
}

std::optional<ReportFormat> parse_report_format(std::string_view s) noexcept {
    if (s == "table-text") return ReportFormat::TableText;
    if (s == "delimited-values") return ReportFormat::DelimitedValues;
    if (s == "structured-json-like" || s == "json") return ReportFormat::Json;
    return std::nullopt;
}

std::string format_score(std::optional<double> v) {
    if (!v) return "NA";
    double x = *v;
    if (std::abs(x) < 0.00005) x = 0.0;  // no "-0.0000"
    return fmt::format("{:.4f}", x);
}

DetectorRun evaluate_run(const Corpus& corpus, std::string_view detector, Condition condition,
                         const ArtifactLayout* layout, unsigned jobs) {
    DetectorRun run{std::string(detector), condition, {}};
    run.scores.resize(corpus.size());
    const std::string kind = artifact::detector_kind(detector, to_string(condition));
    parallel_for(corpus.size(), jobs, [&](std::size_t i) {
        const ImageRecord& rec = corpus[i];
        const PixelMap heatmap = load_aligned_artifact(rec, kind, layout);
        run.scores[i] = ImageScore{rec.id, auroc(heatmap, load_mask(rec))};
    });
    return run;
}

void write_run(const DetectorRun& run, const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::UnwritablePath, path.string());
    out << "# detector: " << run.detector_name << '\n'
        << "# condition: " << to_string(run.condition) << '\n'
        << "image_id\tauroc\tpositives\tnegatives\n";
    for (const auto& s : run.scores) {
        const std::string v = s.result.value ? fmt::format("{}", *s.result.value) : "NA";
        out << fmt::format("{}\t{}\t{}\t{}\n", s.image_id, v, s.result.positives, s.result.negatives);
    }
    if (!out) throw Error(ErrorCode::UnwritablePath, path.string());
}

DetectorRun read_run(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, path.string());
    DetectorRun run;
    bool have_condition = false;
    std::string line;
    std::size_t line_no = 0;
    const auto fail = [&](const std::string& msg) {
        throw Error(ErrorCode::ParseError, fmt::format("{}:{}: {}", path.string(), line_no, msg));
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.rfind("# detector: ", 0) == 0) {
            run.detector_name = line.substr(12);
            continue;
        }
        if (line.rfind("# condition: ", 0) == 0) {
            const auto c = parse_condition(line.substr(13));
            if (!c) fail("unknown condition");
            run.condition = *c;
            have_condition = true;
            continue;
        }
        if (line[0] == '#' || line.rfind("image_id\t", 0) == 0) continue;
        std::istringstream fields(line);
        std::string id, value, pos, neg;
        if (!std::getline(fields, id, '\t') || !std::getline(fields, value, '\t') ||
            !std::getline(fields, pos, '\t') || !std::getline(fields, neg, '\t'))
            fail("expected 4 fields");
        ImageScore s{id, {}};
        try {
            s.result.positives = std::stoull(pos);
            s.result.negatives = std::stoull(neg);
        } catch (const std::exception&) {
            fail("bad pixel counts");
        }
        if (value != "NA") {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || ptr != value.data() + value.size() || v < 0.0 || v > 1.0)
                fail("bad auroc '" + value + "'");
            s.result.value = v;
        }
        run.scores.push_back(std::move(s));
    }
    if (run.detector_name.empty() || !have_condition) fail("missing detector/condition header");
    return run;
}

namespace {

using IdSet = std::set<std::string, std::less<>>;

std::unordered_map<std::string_view, const SaliencyAssignment*> index_assignments(
    const AssignmentTable& table) {
    std::unordered_map<std::string_view, const SaliencyAssignment*> idx;
    idx.reserve(table.assigned.size());
    for (const auto& a : table.assigned) idx.emplace(a.image_id, &a);
    return idx;
}

}  // namespace

BinReport bin_means(const DetectorRun& run, const AssignmentTable& assignments,
                    const IdSet& exclusions) {
    BinReport report;
    report.detector = run.detector_name;
    report.condition = run.condition;
    for (std::size_t i = 0; i < kBinCount; ++i) report.bins[i].bin = all_bins()[i];

    const auto idx = index_assignments(assignments);
    double total = 0.0;
    std::size_t defined = 0;
    for (const auto& s : run.scores) {
        const auto it = idx.find(s.image_id);
        if (it == idx.end() || exclusions.count(s.image_id) != 0) {
            ++report.excluded;
            continue;
        }
        BinStats& b = report.bins[static_cast<std::size_t>(it->second->bin.index - 1)];
        ++b.count;
        if (!s.result.value) {
            ++b.undefined;
            continue;
        }
        b.sum += *s.result.value;
        total += *s.result.value;
        ++defined;
    }
    for (auto& b : report.bins) {
        const std::size_t n = b.count - b.undefined;
        if (n > 0) b.mean = b.sum / static_cast<double>(n);
    }
    if (defined > 0) report.overall_mean = total / static_cast<double>(defined);
    return report;
}

namespace {

std::optional<double> range_of(const std::array<BinStats, kBinCount>& bins) {
    std::optional<double> lo, hi;
    for (const auto& b : bins) {
        if (!b.mean) continue;
        lo = lo ? std::min(*lo, *b.mean) : *b.mean;
        hi = hi ? std::max(*hi, *b.mean) : *b.mean;
    }
    if (!lo) return std::nullopt;
    return *hi - *lo;
}

}  // namespace

EnhancementDelta enhancement_delta(const DetectorRun& before, const DetectorRun& after,
                                   const AssignmentTable& assignments, const IdSet& exclusions) {
    if (before.detector_name != after.detector_name)
        throw Error(ErrorCode::SchemaViolation,
                    fmt::format("runs are for different detectors: {} vs {}", before.detector_name,
                                after.detector_name));
    IdSet ids_before, ids_after;
    for (const auto& s : before.scores) ids_before.insert(s.image_id);
    for (const auto& s : after.scores) ids_after.insert(s.image_id);
    if (ids_before != ids_after || ids_before.size() != before.scores.size() ||
        ids_after.size() != after.scores.size()) {
        std::string example;
        for (const auto& id : ids_before)
            if (!ids_after.count(id)) { example = id + " missing after"; break; }
        if (example.empty())
            for (const auto& id : ids_after)
                if (!ids_before.count(id)) { example = id + " missing before"; break; }
        throw Error(ErrorCode::ImageSetMismatch,
                    fmt::format("{}: before/after image sets differ ({})", before.detector_name,
                                example.empty() ? "duplicate ids" : example));
    }
    const BinReport b = bin_means(before, assignments, exclusions);
    const BinReport a = bin_means(after, assignments, exclusions);

    EnhancementDelta d;
    d.detector = before.detector_name;
    d.before_condition = before.condition;
    d.after_condition = after.condition;
    for (std::size_t i = 0; i < kBinCount; ++i) {
        d.bins[i].before = b.bins[i].mean;
        d.bins[i].after = a.bins[i].mean;
        if (b.bins[i].mean && a.bins[i].mean) d.bins[i].delta = *a.bins[i].mean - *b.bins[i].mean;
    }
    d.variation_before = range_of(b.bins);
    d.variation_after = range_of(a.bins);
    return d;
}

Trend trend_of(const std::array<std::optional<double>, kBinCount>& values) {
    constexpr double eps = 1e-12;
    std::vector<double> v;
    for (const auto& x : values)
        if (x) v.push_back(*x);
    bool up = false, down = false;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[i - 1] + eps) up = true;
        if (v[i] < v[i - 1] - eps) down = true;
    }
    if (up && down) return Trend::Mixed;
    if (up) return Trend::Rising;
    if (down) return Trend::Falling;
    return Trend::Flat;
}

SemanticTrend semantic_trend(const AssignmentTable& assignments,
                             const std::map<std::string, SemanticChange, std::less<>>& results,
                             const IdSet& exclusions) {
    SemanticTrend trend;
    std::array<SemanticChange, kBinCount> sums{};
    for (std::size_t i = 0; i < kBinCount; ++i) trend.bins[i].bin = all_bins()[i];
    for (const auto& a : assignments.assigned) {
        if (exclusions.count(a.image_id) != 0) continue;
        const auto it = results.find(a.image_id);
        if (it == results.end()) continue;
        const auto bi = static_cast<std::size_t>(a.bin.index - 1);
        ++trend.bins[bi].count;
        sums[bi].top1_overlap += it->second.top1_overlap;
        sums[bi].top5_overlap += it->second.top5_overlap;
        sums[bi].top5_iou += it->second.top5_iou;
        sums[bi].top5_prob_change += it->second.top5_prob_change;
    }
    std::array<std::optional<double>, kBinCount> top1, top5, iou, prob;
    for (std::size_t i = 0; i < kBinCount; ++i) {
        auto& b = trend.bins[i];
        if (b.count == 0) continue;
        const double n = static_cast<double>(b.count);
        b.mean = SemanticChange{sums[i].top1_overlap / n, sums[i].top5_overlap / n, sums[i].top5_iou / n,
                                sums[i].top5_prob_change / n};
        top1[i] = b.mean->top1_overlap;
        top5[i] = b.mean->top5_overlap;
        iou[i] = b.mean->top5_iou;
        prob[i] = b.mean->top5_prob_change;
    }
    trend.top1_overlap = trend_of(top1);
    trend.top5_overlap = trend_of(top5);
    trend.top5_iou = trend_of(iou);
    trend.top5_prob_change = trend_of(prob);
    return trend;
}

namespace {

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string csv_row(std::initializer_list<std::string> fields) {
    std::string row;
    bool first = true;
    for (const auto& f : fields) {
        if (!first) row += ',';
        row += csv_field(f);
        first = false;
    }
    return row + '\n';
}

std::string provenance_header(const ReportSet& r, std::string_view comment) {
    return fmt::format("{} tool: {} {}\n{} corpus: {}\n", comment, kToolName, kToolVersion, comment,
                       r.corpus_hash.empty() ? "unknown" : r.corpus_hash);
}

std::size_t binned_count(const BinReport& r) {
    std::size_t n = 0;
    for (const auto& b : r.bins) n += b.count;
    return n;
}

std::size_t undefined_count(const BinReport& r) {
    std::size_t n = 0;
    for (const auto& b : r.bins) n += b.undefined;
    return n;
}

std::string series_name(const BinReport& r) {
    return fmt::format("{}/{}/{}", r.dataset, r.detector, to_string(r.condition));
}

std::optional<double> component(const std::optional<SemanticChange>& c, double SemanticChange::*field) {
    if (!c) return std::nullopt;
    return (*c).*field;
}

constexpr std::array<std::pair<const char*, double SemanticChange::*>, 4> kSemanticFields{{
    {"top1_overlap", &SemanticChange::top1_overlap},
    {"top5_overlap", &SemanticChange::top5_overlap},
    {"top5_iou", &SemanticChange::top5_iou},
    {"top5_prob_change", &SemanticChange::top5_prob_change},
}};

std::vector<std::pair<std::string, std::string>> render_delimited(const ReportSet& r) {
    const std::string head = provenance_header(r, "#");
    std::vector<std::pair<std::string, std::string>> files;

    std::string dist = head + "dataset,bin_index,bin_label,count,proportion\n";
    for (const auto& d : r.distributions)
        for (std::size_t i = 0; i < kBinCount; ++i)
            dist += csv_row({d.dataset, std::to_string(i + 1), std::string(all_bins()[i].label()),
                             std::to_string(d.distribution.counts[i]),
                             format_score(d.distribution.total > 0
                                              ? std::optional(d.distribution.proportions[i])
                                              : std::nullopt)});
    files.emplace_back("distribution.csv", std::move(dist));

    std::string det = head +
        "dataset,detector,condition,bin_index,bin_label,count,mean_auroc,undefined_count\n";
    for (const auto& b : r.detection) {
        for (const auto& s : b.bins)
            det += csv_row({b.dataset, b.detector, std::string(to_string(b.condition)),
                            std::to_string(s.bin.index), std::string(s.bin.label()),
                            std::to_string(s.count), format_score(s.mean), std::to_string(s.undefined)});
        det += csv_row({b.dataset, b.detector, std::string(to_string(b.condition)), "all", "overall",
                        std::to_string(binned_count(b)), format_score(b.overall_mean),
                        std::to_string(undefined_count(b))});
    }
    files.emplace_back("detection.csv", std::move(det));

    std::string enh = head +
        "dataset,detector,before_condition,after_condition,bin_index,bin_label,mean_before,mean_after,delta\n";
    for (const auto& d : r.enhancement) {
        const std::string before(to_string(d.before_condition)), after(to_string(d.after_condition));
        for (std::size_t i = 0; i < kBinCount; ++i)
            enh += csv_row({d.dataset, d.detector, before, after, std::to_string(i + 1),
                            std::string(all_bins()[i].label()), format_score(d.bins[i].before),
                            format_score(d.bins[i].after), format_score(d.bins[i].delta)});
        std::optional<double> shrink;
        if (d.variation_before && d.variation_after) shrink = *d.variation_after - *d.variation_before;
        enh += csv_row({d.dataset, d.detector, before, after, "range", "variation",
                        format_score(d.variation_before), format_score(d.variation_after),
                        format_score(shrink)});
    }
    files.emplace_back("enhancement.csv", std::move(enh));

    std::string sem = head + "dataset,bin_index,count,top1_overlap,top5_overlap,top5_iou,top5_prob_change\n";
    for (const auto& t : r.semantic)
        for (const auto& b : t.bins)
            sem += csv_row({t.dataset, std::to_string(b.bin.index), std::to_string(b.count),
                            format_score(component(b.mean, &SemanticChange::top1_overlap)),
                            format_score(component(b.mean, &SemanticChange::top5_overlap)),
                            format_score(component(b.mean, &SemanticChange::top5_iou)),
                            format_score(component(b.mean, &SemanticChange::top5_prob_change))});
    files.emplace_back("semantic.csv", std::move(sem));

    std::string plot = head + "figure,series,x,y\n";
    for (const auto& d : r.distributions)
        for (std::size_t i = 0; i < kBinCount; ++i)
            plot += csv_row({"distribution", d.dataset, std::string(all_bins()[i].label()),
                             format_score(d.distribution.total > 0
                                              ? std::optional(d.distribution.proportions[i])
                                              : std::nullopt)});
    for (const auto& b : r.detection)
        for (const auto& s : b.bins)
            plot += csv_row({"detection", series_name(b), std::string(s.bin.label()), format_score(s.mean)});
    for (const auto& d : r.enhancement)
        for (std::size_t i = 0; i < kBinCount; ++i) {
            const std::string label(all_bins()[i].label());
            plot += csv_row({"enhancement", fmt::format("{}/{}/{}", d.dataset, d.detector, to_string(d.before_condition)),
                             label, format_score(d.bins[i].before)});
            plot += csv_row({"enhancement", fmt::format("{}/{}/{}", d.dataset, d.detector, to_string(d.after_condition)),
                             label, format_score(d.bins[i].after)});
        }
    for (const auto& t : r.semantic)
        for (const auto& [name, field] : kSemanticFields)
            for (const auto& b : t.bins)
                plot += csv_row({"semantic", fmt::format("{}/{}", t.dataset, name), std::string(b.bin.label()),
                                 format_score(component(b.mean, field))});
    files.emplace_back("plot_data.csv", std::move(plot));
    return files;
}

std::string render_text(const ReportSet& r) {
    std::string out = provenance_header(r, "#");
    for (const auto& d : r.distributions) {
        out += fmt::format("\nSaliency distribution: {}\n", d.dataset);
        out += fmt::format("{:<10}|{:>8}|{:>11}\n", "group", "count", "proportion");
        out += "----------|--------|-----------\n";
        for (std::size_t i = 0; i < kBinCount; ++i)
            out += fmt::format("{:<10}|{:>8}|{:>11}\n", all_bins()[i].label(), d.distribution.counts[i],
                               format_score(d.distribution.total > 0 ? std::optional(d.distribution.proportions[i])
                                                                     : std::nullopt));
        out += fmt::format("{:<10}|{:>8}|\n", "total", d.distribution.total);
    }
    for (const auto& b : r.detection) {
        out += fmt::format("\nAverage AuROC: {} / {} / {}\n", b.dataset, b.detector, to_string(b.condition));
        out += fmt::format("{:<10}|{:>8}|{:>11}|{:>10}\n", "group", "count", "mean_auroc", "undefined");
        out += "----------|--------|-----------|----------\n";
        for (const auto& s : b.bins)
            out += fmt::format("{:<10}|{:>8}|{:>11}|{:>10}\n", s.bin.label(), s.count, format_score(s.mean),
                               s.undefined);
        out += fmt::format("{:<10}|{:>8}|{:>11}|{:>10}\n", "overall", binned_count(b),
                           format_score(b.overall_mean), undefined_count(b));
        out += fmt::format("excluded: {}\n", b.excluded);
    }
    for (const auto& d : r.enhancement) {
        out += fmt::format("\nEnhancement: {} / {} ({} -> {})\n", d.dataset, d.detector,
                           to_string(d.before_condition), to_string(d.after_condition));
        out += fmt::format("{:<10}|{:>8}|{:>8}|{:>8}\n", "group", "before", "after", "delta");
        out += "----------|--------|--------|--------\n";
        for (std::size_t i = 0; i < kBinCount; ++i)
            out += fmt::format("{:<10}|{:>8}|{:>8}|{:>8}\n", all_bins()[i].label(), format_score(d.bins[i].before),
                               format_score(d.bins[i].after), format_score(d.bins[i].delta));
        out += fmt::format("{:<10}|{:>8}|{:>8}|\n", "variation", format_score(d.variation_before),
                           format_score(d.variation_after));
    }
    for (const auto& t : r.semantic) {
        out += fmt::format("\nSemantic change: {}\n", t.dataset);
        out += fmt::format("{:<10}|{:>6}|{:>9}|{:>9}|{:>9}|{:>9}\n", "group", "count", "top1", "top5", "iou5", "pchange5");
        out += "----------|------|---------|---------|---------|---------\n";
        for (const auto& b : t.bins)
            out += fmt::format("{:<10}|{:>6}|{:>9}|{:>9}|{:>9}|{:>9}\n", b.bin.label(), b.count,
                               format_score(component(b.mean, &SemanticChange::top1_overlap)),
                               format_score(component(b.mean, &SemanticChange::top5_overlap)),
                               format_score(component(b.mean, &SemanticChange::top5_iou)),
                               format_score(component(b.mean, &SemanticChange::top5_prob_change)));
        out += fmt::format("trend: top1 {}, top5 {}, iou5 {}, pchange5 {}\n", to_string(t.top1_overlap),
                           to_string(t.top5_overlap), to_string(t.top5_iou), to_string(t.top5_prob_change));
    }
    return out;
}

// Rounded to 4 places so JSON numbers match the delimited output.
nlohmann::ordered_json json_score(std::optional<double> v) {
    if (!v) return nullptr;
    const double r = std::round(*v * 1e4) / 1e4;
    return r == 0.0 ? 0.0 : r;
}

std::string render_json(const ReportSet& r) {
    using oj = nlohmann::ordered_json;
    oj root;
    root["tool"] = fmt::format("{} {}", kToolName, kToolVersion);
    root["corpus"] = r.corpus_hash.empty() ? "unknown" : r.corpus_hash;
    oj dists = oj::array();
    for (const auto& d : r.distributions) {
        oj bins = oj::array();
        for (std::size_t i = 0; i < kBinCount; ++i)
            bins.push_back({{"bin_index", i + 1},
                            {"bin_label", all_bins()[i].label()},
                            {"count", d.distribution.counts[i]},
                            {"proportion", json_score(d.distribution.total > 0
                                                          ? std::optional(d.distribution.proportions[i])
                                                          : std::nullopt)}});
        dists.push_back({{"dataset", d.dataset}, {"total", d.distribution.total}, {"bins", bins}});
    }
    root["distributions"] = dists;
    oj det = oj::array();
    for (const auto& b : r.detection) {
        oj bins = oj::array();
        for (const auto& s : b.bins)
            bins.push_back({{"bin_index", s.bin.index},
                            {"bin_label", s.bin.label()},
                            {"count", s.count},
                            {"mean_auroc", json_score(s.mean)},
                            {"undefined_count", s.undefined}});
        det.push_back({{"dataset", b.dataset},
                       {"detector", b.detector},
                       {"condition", to_string(b.condition)},
                       {"bins", bins},
                       {"overall_mean_auroc", json_score(b.overall_mean)},
                       {"excluded", b.excluded}});
    }
    root["detection"] = det;
    oj enh = oj::array();
    for (const auto& d : r.enhancement) {
        oj bins = oj::array();
        for (std::size_t i = 0; i < kBinCount; ++i)
            bins.push_back({{"bin_index", i + 1},
                            {"bin_label", all_bins()[i].label()},
                            {"mean_before", json_score(d.bins[i].before)},
                            {"mean_after", json_score(d.bins[i].after)},
                            {"delta", json_score(d.bins[i].delta)}});
        enh.push_back({{"dataset", d.dataset},
                       {"detector", d.detector},
                       {"before_condition", to_string(d.before_condition)},
                       {"after_condition", to_string(d.after_condition)},
                       {"bins", bins},
                       {"variation_before", json_score(d.variation_before)},
                       {"variation_after", json_score(d.variation_after)}});
    }
    root["enhancement"] = enh;
    oj sem = oj::array();
    for (const auto& t : r.semantic) {
        oj bins = oj::array();
        for (const auto& b : t.bins) {
            oj row = {{"bin_index", b.bin.index}, {"count", b.count}};
            for (const auto& [name, field] : kSemanticFields) row[name] = json_score(component(b.mean, field));
            bins.push_back(row);
        }
        sem.push_back({{"dataset", t.dataset},
                       {"bins", bins},
                       {"trend",
                        {{"top1_overlap", to_string(t.top1_overlap)},
                         {"top5_overlap", to_string(t.top5_overlap)},
                         {"top5_iou", to_string(t.top5_iou)},
                         {"top5_prob_change", to_string(t.top5_prob_change)}}}});
    }
    root["semantic"] = sem;
    return root.dump(2) + '\n';
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const ReportSet& reports, ReportFormat format,
                                               const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw Error(ErrorCode::UnwritablePath, out_dir.string());

    std::vector<std::pair<std::string, std::string>> files;
    switch (format) {
        case ReportFormat::DelimitedValues: files = render_delimited(reports); break;
        case ReportFormat::TableText: files.emplace_back("report.txt", render_text(reports)); break;
        case ReportFormat::Json: files.emplace_back("report.json", render_json(reports)); break;
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [name, body] : files) {
        const auto path = out_dir / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << body;
        out.close();
        if (!out) throw Error(ErrorCode::UnwritablePath, path.string());
        written.push_back(path);
    }
    return written;
}

}  // namespace salbias
