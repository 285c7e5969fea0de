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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "salbias/maps.hpp"
#include "salbias/pixel_metrics.hpp"

namespace salbias {

struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 1;
    int h = 1;

    /// Intersection with a w×h image; empty when nothing remains.
    std::optional<BoundingBox> clamped(int image_w, int image_h) const;
    bool operator==(const BoundingBox&) const = default;
};

enum class StudyTask { Saliency, Manipulation };
std::string_view to_string(StudyTask t) noexcept;

/// One participant's answers for one image. Saliency boxes are mandatory;
/// an empty manipulation list means "looks pristine".
struct StudyResponse {
    std::string study_id;
    std::string session_id;
    std::string image_id;
    std::string participant_id;
    std::vector<BoundingBox> saliency_boxes;
    std::vector<BoundingBox> manipulation_boxes;
    std::string timestamp;  // ISO-8601

    const std::vector<BoundingBox>& boxes(StudyTask task) const {
        return task == StudyTask::Saliency ? saliency_boxes : manipulation_boxes;
    }
};

/// Throws SchemaViolation unless the response satisfies the record invariants
/// for an image of the given size.
void validate_response(const StudyResponse& r, int image_w, int image_h);

bool is_iso8601_timestamp(std::string_view s);

nlohmann::json to_json(const StudyResponse& r);
/// Throws SchemaViolation on missing or mistyped fields. Does not check boxes
/// against image bounds.
StudyResponse response_from_json(const nlohmann::json& j);

/// Reads JSON-lines of exchange records or study-journal response entries.
std::vector<StudyResponse> read_responses_jsonl(const std::filesystem::path& path);

/// Per-pixel fraction of respondents whose boxes cover the pixel.
struct ConfidenceMap {
    PixelMap map;
    int respondents = 0;
};

/// Union raster: 1 where at least one (clamped) box covers the pixel.
PixelMap rasterize_boxes(std::span<const BoundingBox> boxes, int w, int h);

/// Mean of per-participant union rasters. Throws EmptyInput, MixedImageIds.
ConfidenceMap aggregate_responses(std::span<const StudyResponse> responses, StudyTask task,
                                  int w, int h);

/// Mean Recall of the aggregated saliency task against the tamper mask.
MetricResult human_saliency_score(std::span<const StudyResponse> responses,
                                  const TamperMask& gt);

/// AuROC of the aggregated manipulation task against the tamper mask.
MetricResult human_detection_score(std::span<const StudyResponse> responses,
                                   const TamperMask& gt);

}  // namespace salbias
