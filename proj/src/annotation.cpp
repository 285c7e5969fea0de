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

#include "salbias/annotation.hpp"

#include <algorithm>
#include <fstream>
#include <regex>

#include <fmt/format.h>

#include "salbias/error.hpp"

namespace salbias {

using nlohmann::json;

std::optional<BoundingBox> BoundingBox::clamped(int image_w, int image_h) const {
    const long x0 = std::max<long>(x, 0);
    const long y0 = std::max<long>(y, 0);
    const long x1 = std::min<long>(static_cast<long>(x) + w, image_w);
    const long y1 = std::min<long>(static_cast<long>(y) + h, image_h);
    if (x1 <= x0 || y1 <= y0) return std::nullopt;
    return BoundingBox{static_cast<int>(x0), static_cast<int>(y0), static_cast<int>(x1 - x0),
                       static_cast<int>(y1 - y0)};
}

std::string_view to_string(StudyTask t) noexcept {
    return t == StudyTask::Saliency ? "saliency" : "manipulation";
}

bool is_iso8601_timestamp(std::string_view s) {
    static const std::regex re(
        R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?(Z|[+-]\d{2}:?\d{2})?)");
    return std::regex_match(s.begin(), s.end(), re);
}

void validate_response(const StudyResponse& r, int image_w, int image_h) {
    if (r.image_id.empty()) throw Error(ErrorCode::SchemaViolation, "image_id is empty");
    if (r.participant_id.empty()) throw Error(ErrorCode::SchemaViolation, "participant_id is empty");
    if (r.saliency_boxes.empty())
        throw Error(ErrorCode::SchemaViolation, "at least one saliency box is required");
    if (!r.timestamp.empty() && !is_iso8601_timestamp(r.timestamp))
        throw Error(ErrorCode::SchemaViolation, "timestamp is not ISO-8601: " + r.timestamp);
    for (const auto task : {StudyTask::Saliency, StudyTask::Manipulation}) {
        for (const auto& b : r.boxes(task)) {
            if (b.w < 1 || b.h < 1)
                throw Error(ErrorCode::SchemaViolation,
                            fmt::format("{} box has size {}x{}", to_string(task), b.w, b.h));
            if (!b.clamped(image_w, image_h))
                throw Error(ErrorCode::SchemaViolation,
                            fmt::format("{} box ({},{},{},{}) lies outside the {}x{} image",
                                        to_string(task), b.x, b.y, b.w, b.h, image_w, image_h));
        }
    }
}

namespace {

json boxes_to_json(const std::vector<BoundingBox>& boxes) {
    json arr = json::array();
    for (const auto& b : boxes) arr.push_back({{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}});
    return arr;
}

std::vector<BoundingBox> boxes_from_json(const json& j, std::string_view field) {
    if (!j.is_array()) throw Error(ErrorCode::SchemaViolation, fmt::format("{} must be an array", field));
    std::vector<BoundingBox> boxes;
    for (const auto& b : j) {
        if (!b.is_object())
            throw Error(ErrorCode::SchemaViolation, fmt::format("{} entries must be objects", field));
        BoundingBox box;
        for (auto [key, dst] : {std::pair{"x", &box.x}, {"y", &box.y}, {"w", &box.w}, {"h", &box.h}}) {
            const auto it = b.find(key);
            if (it == b.end() || !it->is_number_integer())
                throw Error(ErrorCode::SchemaViolation, fmt::format("{} entry needs integer '{}'", field, key));
            *dst = it->get<int>();
        }
        boxes.push_back(box);
    }
    return boxes;
}

std::string string_field(const json& j, const char* key, bool required) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        if (required) throw Error(ErrorCode::SchemaViolation, fmt::format("missing field '{}'", key));
        return {};
    }
    if (!it->is_string()) throw Error(ErrorCode::SchemaViolation, fmt::format("'{}' must be a string", key));
    return it->get<std::string>();
}

}  // namespace

json to_json(const StudyResponse& r) {
    return json{{"study_id", r.study_id},
                {"session_id", r.session_id},
                {"image_id", r.image_id},
                {"participant_id", r.participant_id},
                {"saliency_boxes", boxes_to_json(r.saliency_boxes)},
                {"manipulation_boxes", boxes_to_json(r.manipulation_boxes)},
                {"timestamp", r.timestamp}};
}

StudyResponse response_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "response must be a JSON object");
    StudyResponse r;
    r.study_id = string_field(j, "study_id", false);
    r.session_id = string_field(j, "session_id", false);
    r.image_id = string_field(j, "image_id", true);
    r.participant_id = string_field(j, "participant_id", true);
    r.timestamp = string_field(j, "timestamp", false);
    if (const auto it = j.find("saliency_boxes"); it != j.end())
        r.saliency_boxes = boxes_from_json(*it, "saliency_boxes");
    if (const auto it = j.find("manipulation_boxes"); it != j.end())
        r.manipulation_boxes = boxes_from_json(*it, "manipulation_boxes");
    return r;
}

std::vector<StudyResponse> read_responses_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, path.string());
    std::vector<StudyResponse> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::ParseError, fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
        }
        if (const auto type = j.find("type"); type != j.end()) {
            if (*type != "response") continue;  // other journal entries
            out.push_back(response_from_json(j.at("record")));
        } else {
            out.push_back(response_from_json(j));
        }
    }
    return out;
}

PixelMap rasterize_boxes(std::span<const BoundingBox> boxes, int w, int h) {
    PixelMap map(w, h, 0.0);
    for (const auto& b : boxes) {
        const auto c = b.clamped(w, h);
        if (!c) continue;
        for (int y = c->y; y < c->y + c->h; ++y)
            for (int x = c->x; x < c->x + c->w; ++x) map.set(x, y, 1.0);
    }
    return map;
}

ConfidenceMap aggregate_responses(std::span<const StudyResponse> responses, StudyTask task,
                                  int w, int h) {
    if (responses.empty()) throw Error(ErrorCode::EmptyInput, "no responses to aggregate");
    const std::string& image_id = responses.front().image_id;
    std::vector<int> covered(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
    for (const auto& r : responses) {
        if (r.image_id != image_id)
            throw Error(ErrorCode::MixedImageIds, fmt::format("{} vs {}", image_id, r.image_id));
        const PixelMap raster = rasterize_boxes(r.boxes(task), w, h);
        for (std::size_t i = 0; i < covered.size(); ++i) covered[i] += raster.values()[i] > 0.0 ? 1 : 0;
    }
    const int n = static_cast<int>(responses.size());
    std::vector<double> values(covered.size());
    std::transform(covered.begin(), covered.end(), values.begin(),
                   [n](int k) { return static_cast<double>(k) / n; });
    return ConfidenceMap{PixelMap(w, h, std::move(values)), n};
}

MetricResult human_saliency_score(std::span<const StudyResponse> responses, const TamperMask& gt) {
    const auto agg = aggregate_responses(responses, StudyTask::Saliency, gt.width(), gt.height());
    return mean_recall(agg.map, gt);
}

MetricResult human_detection_score(std::span<const StudyResponse> responses, const TamperMask& gt) {
    const auto agg = aggregate_responses(responses, StudyTask::Manipulation, gt.width(), gt.height());
    return auroc(agg.map, gt);
}

}  // namespace salbias
