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

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cli_commands.hpp"
#include "salbias/corpus.hpp"
#include "salbias/error.hpp"
#include "salbias/provenance.hpp"
#include "salbias/saliency_binning.hpp"

namespace {

using namespace salbias;

std::string quoted(std::string_view s) {
    std::string out;
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        if (ch == '\n') {
            out += "\\n";
            continue;
        }
        out += ch;
    }
    return out;
}

int fail(std::string_view code, std::string_view message, int status) {
    std::fprintf(stderr, "error: code=%.*s message=\"%s\"\n", static_cast<int>(code.size()), code.data(),
                 quoted(message).c_str());
    return status;
}

struct Shared {
    cli::Common common;
    int bins = static_cast<int>(kBinCount);
};

void add_shared(CLI::App* sub, Shared& s) {
    sub->add_option("--manifest", s.common.manifest, "corpus manifest")->required();
    sub->add_option("--out", s.common.out, "output directory")->required();
    sub->add_option("--jobs", s.common.jobs, "worker threads (0 = all cores)")->capture_default_str();
    sub->add_option("--seed", s.common.seed, "seed for shuffled choices")->capture_default_str();
    sub->add_option("--exclude", s.common.exclude, "file listing image ids to leave out");
    sub->add_option("--bins", s.bins, "number of saliency bins (only 5 is supported)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Saliency-stratified evaluation of image manipulation detectors", "salbias"};
    app.set_version_flag("--version", fmt::format("{} {}", kToolName, kToolVersion));
    app.require_subcommand(1);

    Shared shared;
    cli::ScoreOptions score;
    cli::BinOptions bin;
    cli::EvalOptions eval;
    cli::CompareOptions compare;
    cli::AnnotationOptions annotations;
    cli::ReportOptions report;
    cli::ServeOptions serve;
    std::function<void()> action;

    auto* s = app.add_subcommand("score-saliency", "fuse saliency maps, score and bin every image");
    add_shared(s, shared);
    s->add_option("--source", score.source, "machine-fused or human-study")->capture_default_str();
    s->add_option("--responses", score.responses, "study responses (JSONL) for --source human-study");
    s->callback([&] { action = [&] { cli::score_saliency(shared.common, score); }; });

    s = app.add_subcommand("bin", "bin table and distribution from an assignment table");
    add_shared(s, shared);
    s->add_option("--assignments", bin.assignments, "assignment table (default <out>/assignments.tsv)");
    s->callback([&] { action = [&] { cli::bin(shared.common, bin); }; });

    s = app.add_subcommand("eval-detector", "per-image AuROC of one detector's heatmaps");
    add_shared(s, shared);
    s->add_option("--detector", eval.detector, "detector name")->required();
    s->add_option("--condition", eval.condition, "original, saliency-enhanced or resized-baseline")
        ->capture_default_str();
    s->callback([&] { action = [&] { cli::eval_detector(shared.common, eval); }; });

    s = app.add_subcommand("enhance-compare", "per-bin AuROC change between two conditions");
    add_shared(s, shared);
    s->add_option("--detector", compare.detector, "detector name")->required();
    s->add_option("--before", compare.before, "baseline condition")->capture_default_str();
    s->add_option("--after", compare.after, "enhanced condition")->capture_default_str();
    s->callback([&] { action = [&] { cli::enhance_compare(shared.common, compare); }; });

    s = app.add_subcommand("semantic-change", "tag-list change between pristine and tampered images");
    add_shared(s, shared);
    s->callback([&] { action = [&] { cli::semantic_change(shared.common); }; });

    s = app.add_subcommand("aggregate-annotations", "confidence maps and human scores from study responses");
    add_shared(s, shared);
    s->add_option("--responses", annotations.responses, "study responses or journal (JSONL)")->required();
    s->callback([&] { action = [&] { cli::aggregate_annotations(shared.common, annotations); }; });

    s = app.add_subcommand("report", "per-bin tables and plot data");
    add_shared(s, shared);
    s->add_option("--format", report.format, "table-text, delimited-values, structured-json-like or all")
        ->capture_default_str();
    s->callback([&] { action = [&] { cli::report(shared.common, report); }; });

    s = app.add_subcommand("serve-study", "HTTP service for the annotation study");
    add_shared(s, shared);
    s->add_option("--study-id", serve.study_id)->capture_default_str();
    s->add_option("--host", serve.host)->capture_default_str();
    s->add_option("--port", serve.port, "0 picks a free port")->capture_default_str();
    s->add_option("--images-per-session", serve.images_per_session)->capture_default_str();
    s->add_option("--target-reviews", serve.target_reviews)->capture_default_str();
    s->callback([&] { action = [&] { cli::serve_study(shared.common, serve); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(to_string(ErrorCode::BadFlag), e.what(), 2);
    }

    try {
        if (shared.bins != static_cast<int>(kBinCount))
            throw Error(ErrorCode::BadFlag, fmt::format("--bins must be {}", kBinCount));
        if (shared.common.jobs == 0) shared.common.jobs = std::max(1u, std::thread::hardware_concurrency());
        action();
    } catch (const Error& e) {
        return fail(to_string(e.code()), e.what(), 1);
    } catch (const std::exception& e) {
        return fail("Internal", e.what(), 1);
    }
    return 0;
}
