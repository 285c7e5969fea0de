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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace salbias::cli {

namespace fs = std::filesystem;

struct Common {
    fs::path manifest;
    fs::path out;
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    std::optional<fs::path> exclude;
};

struct ScoreOptions {
    std::string source = "machine-fused";
    std::optional<fs::path> responses;
};

struct BinOptions {
    std::optional<fs::path> assignments;
};

struct EvalOptions {
    std::string detector;
    std::string condition = "original";
};

struct CompareOptions {
    std::string detector;
    std::string before = "resized-baseline";
    std::string after = "saliency-enhanced";
};

struct AnnotationOptions {
    fs::path responses;
};

struct ReportOptions {
    std::string format = "delimited-values";
};

struct ServeOptions {
    std::string study_id = "study";
    std::string host = "127.0.0.1";
    int port = 8080;
    int images_per_session = 10;
    int target_reviews = 5;
};

void score_saliency(const Common& c, const ScoreOptions& o);
void bin(const Common& c, const BinOptions& o);
void eval_detector(const Common& c, const EvalOptions& o);
void enhance_compare(const Common& c, const CompareOptions& o);
void semantic_change(const Common& c);
void aggregate_annotations(const Common& c, const AnnotationOptions& o);
void report(const Common& c, const ReportOptions& o);
void serve_study(const Common& c, const ServeOptions& o);

}  // namespace salbias::cli
