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

#include "cli_commands.hpp"

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "salbias/annotation.hpp"
#include "salbias/corpus.hpp"
#include "salbias/error.hpp"
#include "salbias/parallel.hpp"
#include "salbias/provenance.hpp"
#include "salbias/report.hpp"
#include "salbias/saliency_binning.hpp"
#include "salbias/semantic.hpp"
#include "salbias/study.hpp"
#include "salbias/study_server.hpp"

namespace salbias::cli {

namespace {

using IdSet = std::set<std::string, std::less<>>;

void log(std::string_view level, const std::string& message) {
    std::fprintf(stderr, "%.*s: %s\n", static_cast<int>(level.size()), level.data(), message.c_str());
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::UnwritablePath, dir.string());
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) ensure_dir(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw Error(ErrorCode::UnwritablePath, path.string());
}

fs::path require_input(const fs::path& path, std::string_view what) {
    if (!fs::is_regular_file(path))
        throw Error(ErrorCode::MissingInput, fmt::format("{} not found: {}", what, path.string()));
    return path;
}

ArtifactLayout input_layout(const Common& c) { return ArtifactLayout(data_root(c.out)); }

fs::path assignments_path(const Common& c) { return c.out / "assignments.tsv"; }
fs::path runs_dir(const Common& c) { return c.out / "runs"; }
fs::path semantic_path(const Common& c) { return c.out / "semantic.tsv"; }

fs::path run_path(const Common& c, std::string_view detector, Condition cond) {
    return runs_dir(c) / fmt::format("{}__{}.tsv", detector, to_string(cond));
}

Condition condition_flag(const std::string& s) {
    const auto c = parse_condition(s);
    if (!c) throw Error(ErrorCode::BadFlag, "unknown condition: " + s);
    return *c;
}

void check_detector_name(const std::string& name) {
    const bool ok = !name.empty() && std::all_of(name.begin(), name.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.';
    });
    if (!ok || name.front() == '.') throw Error(ErrorCode::BadFlag, "invalid detector name: " + name);
}

IdSet read_exclusions(const Common& c, const Corpus& corpus) {
    IdSet ids;
    if (!c.exclude) return ids;
    std::ifstream in(require_input(*c.exclude, "exclusion list"));
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        ids.insert(line.substr(b, e - b + 1));
    }
    for (const auto& id : ids) {
        if (corpus.find(id) == nullptr) log("warning", fmt::format("excluded id {} is not in the corpus", id));
        else log("info", fmt::format("excluding {} (exclusion list)", id));
    }
    return ids;
}

// Dataset name -> ids, in name order.
std::map<std::string, IdSet> ids_by_dataset(const Corpus& corpus) {
    std::map<std::string, IdSet> out;
    for (const auto& r : corpus) out[std::string(to_string(r.dataset))].insert(r.id);
    return out;
}

DetectorRun subset(const DetectorRun& run, const IdSet& ids) {
    DetectorRun out{run.detector_name, run.condition, {}};
    for (const auto& s : run.scores)
        if (ids.count(s.image_id)) out.scores.push_back(s);
    return out;
}

AssignmentTable subset(const AssignmentTable& t, const IdSet& ids, const IdSet& exclusions = {}) {
    AssignmentTable out;
    for (const auto& a : t.assigned)
        if (ids.count(a.image_id) && !exclusions.count(a.image_id)) out.assigned.push_back(a);
    for (const auto& id : t.undefined_ids)
        if (ids.count(id) && !exclusions.count(id)) out.undefined_ids.push_back(id);
    return out;
}

void write_map_with_sidecar(const PixelMap& map, const fs::path& path, std::string_view kind,
                            const std::string& source_hash) {
    ensure_dir(path.parent_path());
    save_map(map, path);
    write_sidecar(path, Provenance{std::string(kind), source_hash});
}

std::map<std::string, std::vector<StudyResponse>, std::less<>> responses_by_image(const fs::path& path,
                                                                                  const Corpus& corpus) {
    std::map<std::string, std::vector<StudyResponse>, std::less<>> out;
    for (auto& r : read_responses_jsonl(require_input(path, "responses"))) {
        const ImageRecord* rec = corpus.find(r.image_id);
        if (rec == nullptr) throw Error(ErrorCode::UnknownImage, r.image_id + ": response for an image not in the corpus");
        validate_response(r, rec->width, rec->height);
        out[r.image_id].push_back(std::move(r));
    }
    return out;
}

AssignmentTable require_assignments(const Common& c, const Corpus& corpus) {
    const AssignmentTable t = read_assignment_table(require_input(assignments_path(c), "assignment table"));
    IdSet known;
    for (const auto& a : t.assigned) known.insert(a.image_id);
    known.insert(t.undefined_ids.begin(), t.undefined_ids.end());
    for (const auto& r : corpus)
        if (!known.count(r.id)) throw Error(ErrorCode::MissingInput, r.id + ": no saliency assignment");
    return t;
}

std::string join(const std::vector<std::string>& v, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += v[i];
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string part;
    while (std::getline(in, part, sep)) out.push_back(part);
    return out;
}

double parse_double(const std::string& s, const fs::path& path, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ParseError, fmt::format("{}:{}: not a number: {}", path.string(), line, s));
}

constexpr std::string_view kSemanticHeader =
    "image_id\ttop1_overlap\ttop5_overlap\ttop5_iou\ttop5_prob_change\tabsent_tags\n";

std::map<std::string, SemanticChange, std::less<>> read_semantic_table(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, path.string());
    std::map<std::string, SemanticChange, std::less<>> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (n == 1 || line.empty()) continue;
        const auto f = split(line, '\t');
        if (f.size() < 5) throw Error(ErrorCode::ParseError, fmt::format("{}:{}: expected 6 fields", path.string(), n));
        out[f[0]] = {parse_double(f[1], path, n), parse_double(f[2], path, n), parse_double(f[3], path, n),
                     parse_double(f[4], path, n)};
    }
    return out;
}

}  // namespace

void score_saliency(const Common& c, const ScoreOptions& o) {
    const auto source = parse_saliency_source(o.source);
    if (!source) throw Error(ErrorCode::BadFlag, "unknown saliency source: " + o.source);
    const Corpus corpus = load_manifest(c.manifest);
    const ArtifactLayout in_layout = input_layout(c);
    const ArtifactLayout out_layout(c.out);
    ensure_dir(c.out);

    std::map<std::string, std::vector<StudyResponse>, std::less<>> human;
    if (*source == SaliencySource::HumanStudy && o.responses) human = responses_by_image(*o.responses, corpus);

    std::vector<MetricResult> results(corpus.size());
    parallel_for(corpus.size(), c.jobs, [&](std::size_t i) {
        const ImageRecord& rec = corpus[i];
        const TamperMask gt = load_mask(rec);
        if (*source == SaliencySource::HumanStudy) {
            if (o.responses) {
                const auto it = human.find(rec.id);
                if (it == human.end()) throw Error(ErrorCode::MissingInput, rec.id + ": no study responses");
                results[i] = human_saliency_score(it->second, gt);
            } else {
                results[i] = saliency_score(load_aligned_artifact(rec, artifact::kHumanSaliency, &in_layout), gt);
            }
            return;
        }
        std::vector<std::string> kinds;
        for (const auto& [kind, path] : rec.derived)
            if (artifact::is_saliency_map(kind)) kinds.push_back(kind);
        if (kinds.empty()) kinds = {std::string(artifact::kSaliencyMapA), std::string(artifact::kSaliencyMapB)};
        std::vector<PixelMap> maps;
        std::string hashes;
        for (const auto& kind : kinds) {
            maps.push_back(load_aligned_artifact(rec, kind, &in_layout));
            hashes += sha256_file(*resolve_artifact(rec, kind, &in_layout));
        }
        const PixelMap fused = fuse_saliency(maps);
        results[i] = saliency_score(fused, gt);
        write_map_with_sidecar(fused, out_layout.map_path(rec.id, artifact::kFusedSaliency),
                               artifact::kFusedSaliency, sha256_hex(hashes));
    });

    AssignmentTable table;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (results[i].value)
            table.assigned.push_back({corpus[i].id, *results[i].value, assign_bin(*results[i].value), *source});
        else
            table.undefined_ids.push_back(corpus[i].id);
    }
    for (const auto& id : table.undefined_ids) log("info", id + ": degenerate mask, saliency score undefined");
    write_assignment_table(table, *source, assignments_path(c));
    log("info", fmt::format("scored {} images ({} undefined) -> {}", corpus.size(), table.undefined_ids.size(),
                            assignments_path(c).string()));
}

void bin(const Common& c, const BinOptions& o) {
    const Corpus corpus = load_manifest(c.manifest);
    ensure_dir(c.out);
    AssignmentTable table;
    if (!corpus.empty()) {
        const fs::path src = o.assignments.value_or(assignments_path(c));
        const AssignmentTable all = read_assignment_table(require_input(src, "assignment table"));
        IdSet ids;
        for (const auto& r : corpus) ids.insert(r.id);
        table = subset(all, ids, read_exclusions(c, corpus));
        IdSet seen;
        for (const auto& a : all.assigned) seen.insert(a.image_id);
        seen.insert(all.undefined_ids.begin(), all.undefined_ids.end());
        for (const auto& r : corpus)
            if (!seen.count(r.id)) throw Error(ErrorCode::MissingInput, r.id + ": no saliency assignment");
    }

    std::string rows = "image_id\tscore\tbin_index\tbin_label\n";
    for (const auto& a : table.assigned)
        rows += fmt::format("{}\t{}\t{}\t{}\n", a.image_id, a.score, a.bin.index, a.bin.label());
    write_file(c.out / "bins.tsv", rows);

    const BinDistribution d = bin_distribution(table.assigned);
    std::string dist = "bin_index\tbin_label\tcount\tproportion\n";
    for (const auto& b : all_bins())
        dist += fmt::format("{}\t{}\t{}\t{}\n", b.index, b.label(), d.counts[b.index - 1],
                            format_score(d.proportions[b.index - 1]));
    write_file(c.out / "distribution.tsv", dist);
    log("info", fmt::format("binned {} images ({} undefined)", table.assigned.size(), table.undefined_ids.size()));
}

void eval_detector(const Common& c, const EvalOptions& o) {
    check_detector_name(o.detector);
    const Condition cond = condition_flag(o.condition);
    const Corpus corpus = load_manifest(c.manifest);
    const ArtifactLayout layout = input_layout(c);
    const DetectorRun run = evaluate_run(corpus, o.detector, cond, &layout, c.jobs);
    const fs::path path = run_path(c, o.detector, cond);
    ensure_dir(path.parent_path());
    write_run(run, path);
    log("info", fmt::format("{} images -> {}", run.scores.size(), path.string()));
}

void enhance_compare(const Common& c, const CompareOptions& o) {
    check_detector_name(o.detector);
    const Condition before_c = condition_flag(o.before);
    const Condition after_c = condition_flag(o.after);
    const Corpus corpus = load_manifest(c.manifest);
    const AssignmentTable table = require_assignments(c, corpus);
    const IdSet exclusions = read_exclusions(c, corpus);
    const DetectorRun before = read_run(require_input(run_path(c, o.detector, before_c), "detector run"));
    const DetectorRun after = read_run(require_input(run_path(c, o.detector, after_c), "detector run"));

    std::string out = "dataset\tdetector\tbin_index\tbin_label\tbefore\tafter\tdelta\n";
    for (const auto& [dataset, ids] : ids_by_dataset(corpus)) {
        const EnhancementDelta d = enhancement_delta(subset(before, ids), subset(after, ids), table, exclusions);
        for (std::size_t b = 0; b < kBinCount; ++b)
            out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", dataset, o.detector, b + 1, bin_by_index(int(b) + 1).label(),
                               format_score(d.bins[b].before), format_score(d.bins[b].after),
                               format_score(d.bins[b].delta));
        out += fmt::format("{}\t{}\trange\tvariation\t{}\t{}\tNA\n", dataset, o.detector,
                           format_score(d.variation_before), format_score(d.variation_after));
    }
    const fs::path path = c.out / "enhancement" / (o.detector + ".tsv");
    write_file(path, out);
    log("info", "wrote " + path.string());
}

void semantic_change(const Common& c) {
    const Corpus corpus = load_manifest(c.manifest);
    const ArtifactLayout layout = input_layout(c);
    std::vector<SemanticResult> results(corpus.size());
    parallel_for(corpus.size(), c.jobs, [&](std::size_t i) {
        const ImageRecord& rec = corpus[i];
        auto load = [&](std::string_view kind) {
            const auto path = resolve_artifact(rec, kind, &layout);
            if (!path) throw Error(ErrorCode::MissingArtifact, fmt::format("{}: missing {}", rec.id, kind));
            TagReport r = read_tag_report(*path);
            if (r.image_id != rec.id)
                throw Error(ErrorCode::ImageIdMismatch,
                            fmt::format("{}: {} names image {}", rec.id, path->string(), r.image_id));
            return r;
        };
        results[i] = aggregate_semantic(load(artifact::kPristineTags), load(artifact::kTamperedTags));
    });

    std::string out(kSemanticHeader);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& r = results[i];
        std::vector<std::string> absent(r.absent_tags);
        std::sort(absent.begin(), absent.end());
        absent.erase(std::unique(absent.begin(), absent.end()), absent.end());
        if (!absent.empty())
            log("warning", fmt::format("{}: pristine top-5 tags missing from tampered list, scored as 0: {}",
                                       corpus[i].id, join(absent, ", ")));
        out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", corpus[i].id, r.change.top1_overlap, r.change.top5_overlap,
                           r.change.top5_iou, r.change.top5_prob_change, absent.empty() ? "-" : join(absent, ","));
    }
    write_file(semantic_path(c), out);
    log("info", fmt::format("{} images -> {}", corpus.size(), semantic_path(c).string()));
}

void aggregate_annotations(const Common& c, const AnnotationOptions& o) {
    const Corpus corpus = load_manifest(c.manifest);
    const auto by_image = responses_by_image(o.responses, corpus);
    const ArtifactLayout out_layout(c.out);
    const std::string source_hash = sha256_file(o.responses);

    std::vector<const ImageRecord*> todo;
    for (const auto& r : corpus) {
        if (by_image.count(r.id)) todo.push_back(&r);
        else log("info", r.id + ": no responses");
    }
    struct Row {
        int respondents = 0;
        MetricResult saliency;
        MetricResult detection;
    };
    std::vector<Row> rows(todo.size());
    parallel_for(todo.size(), c.jobs, [&](std::size_t i) {
        const ImageRecord& rec = *todo[i];
        const auto& responses = by_image.find(rec.id)->second;
        const TamperMask gt = load_mask(rec);
        const ConfidenceMap sal = aggregate_responses(responses, StudyTask::Saliency, gt.width(), gt.height());
        const ConfidenceMap man = aggregate_responses(responses, StudyTask::Manipulation, gt.width(), gt.height());
        write_map_with_sidecar(sal.map, out_layout.map_path(rec.id, artifact::kHumanSaliency),
                               artifact::kHumanSaliency, source_hash);
        write_map_with_sidecar(man.map, out_layout.map_path(rec.id, artifact::kHumanPrediction),
                               artifact::kHumanPrediction, source_hash);
        rows[i] = {sal.respondents, human_saliency_score(responses, gt), human_detection_score(responses, gt)};
    });

    std::string out = "image_id\trespondents\tsaliency_mean_recall\tdetection_auroc\n";
    DetectorRun run{"human", Condition::Original, {}};
    for (std::size_t i = 0; i < todo.size(); ++i) {
        auto num = [](const MetricResult& m) { return m.value ? fmt::format("{}", *m.value) : std::string("NA"); };
        out += fmt::format("{}\t{}\t{}\t{}\n", todo[i]->id, rows[i].respondents, num(rows[i].saliency),
                           num(rows[i].detection));
        run.scores.push_back({todo[i]->id, rows[i].detection});
    }
    write_file(c.out / "human_scores.tsv", out);
    const fs::path rp = run_path(c, run.detector_name, run.condition);
    ensure_dir(rp.parent_path());
    write_run(run, rp);
    log("info", fmt::format("aggregated {} images -> {}", todo.size(), (c.out / "human_scores.tsv").string()));
}

void report(const Common& c, const ReportOptions& o) {
    std::vector<ReportFormat> formats;
    if (o.format == "all") {
        formats = {ReportFormat::TableText, ReportFormat::DelimitedValues, ReportFormat::Json};
    } else if (const auto f = parse_report_format(o.format)) {
        formats = {*f};
    } else {
        throw Error(ErrorCode::BadFlag, "unknown report format: " + o.format);
    }
    const Corpus corpus = load_manifest(c.manifest);
    const AssignmentTable table = require_assignments(c, corpus);
    const IdSet exclusions = read_exclusions(c, corpus);

    std::vector<DetectorRun> runs;
    if (fs::is_directory(runs_dir(c))) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(runs_dir(c)))
            if (e.is_regular_file() && e.path().extension() == ".tsv") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) runs.push_back(read_run(f));
    }
    std::optional<std::map<std::string, SemanticChange, std::less<>>> semantic;
    if (fs::is_regular_file(semantic_path(c))) semantic = read_semantic_table(semantic_path(c));

    ReportSet set;
    set.corpus_hash = corpus.fingerprint();
    for (const auto& [dataset, ids] : ids_by_dataset(corpus)) {
        const AssignmentTable t = subset(table, ids, exclusions);
        set.distributions.push_back({dataset, bin_distribution(t.assigned)});
        for (const auto& run : runs) {
            const DetectorRun r = subset(run, ids);
            if (r.scores.empty()) continue;
            BinReport br = bin_means(r, table, exclusions);
            br.dataset = dataset;
            set.detection.push_back(std::move(br));
        }
        // Before/after pairs per detector: resized-baseline preferred over original.
        std::map<std::string, std::map<Condition, const DetectorRun*>> by_detector;
        for (const auto& run : runs) by_detector[run.detector_name][run.condition] = &run;
        for (const auto& [name, conds] : by_detector) {
            const auto after = conds.find(Condition::SaliencyEnhanced);
            if (after == conds.end()) continue;
            auto before = conds.find(Condition::ResizedBaseline);
            if (before == conds.end()) before = conds.find(Condition::Original);
            if (before == conds.end()) continue;
            EnhancementDelta d = enhancement_delta(subset(*before->second, ids), subset(*after->second, ids), table,
                                                   exclusions);
            d.dataset = dataset;
            set.enhancement.push_back(std::move(d));
        }
        if (semantic) {
            std::map<std::string, SemanticChange, std::less<>> part;
            for (const auto& [id, ch] : *semantic)
                if (ids.count(id)) part.emplace(id, ch);
            SemanticTrend st = semantic_trend(table, part, exclusions);
            st.dataset = dataset;
            set.semantic.push_back(std::move(st));
        }
    }
    for (const auto f : formats)
        for (const auto& path : emit_report(set, f, c.out / "report")) std::printf("%s\n", path.string().c_str());
}

void serve_study(const Common& c, const ServeOptions& o) {
    const Corpus corpus = load_manifest(c.manifest);
    std::vector<StudyImage> images;
    for (const auto& r : corpus) images.push_back({r.id, r.width, r.height});
    const StudyConfig cfg{o.study_id, o.images_per_session, o.target_reviews, c.seed};
    Study study(cfg, images, c.out / "study" / (o.study_id + ".journal.jsonl"));
    StudyServer server(study, corpus);

    sigset_t stop_signals;
    sigemptyset(&stop_signals);
    sigaddset(&stop_signals, SIGINT);
    sigaddset(&stop_signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

    const int port = server.bind(o.host, o.port);
    if (port < 0) throw Error(ErrorCode::UnwritablePath, fmt::format("cannot bind {}:{}", o.host, o.port));
    std::printf("listening on http://%s:%d/api/study/%s\n", o.host.c_str(), port, o.study_id.c_str());
    std::fflush(stdout);

    std::atomic<bool> signalled{false};
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&stop_signals, &sig);
        signalled = true;
        server.stop();
    });
    server.listen_after_bind();
    if (!signalled) pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    log("info", "study service stopped");
}

}  // namespace salbias::cli
