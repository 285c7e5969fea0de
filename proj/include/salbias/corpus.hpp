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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "salbias/maps.hpp"

namespace salbias {

namespace fs = std::filesystem;

enum class Dataset { RT, MFC18, IMD2020, Custom };

std::string_view to_string(Dataset d) noexcept;
/// Accepts "RT", "MFC18", "IMD2020" and "custom" (case-sensitive).
std::optional<Dataset> parse_dataset(std::string_view s) noexcept;

/// Well-known artifact kinds. Detector heatmaps are "detector-heatmap:<name>",
/// optionally suffixed "@<condition>" for non-original conditions.
namespace artifact {
inline constexpr std::string_view kSaliencyMapA = "saliency-map-A";
inline constexpr std::string_view kSaliencyMapB = "saliency-map-B";
inline constexpr std::string_view kFusedSaliency = "fused-saliency";
inline constexpr std::string_view kEnhancedImage = "enhanced-image";
inline constexpr std::string_view kPristineTags = "pristine-tags";
inline constexpr std::string_view kTamperedTags = "tampered-tags";
inline constexpr std::string_view kHumanSaliency = "human-saliency";
inline constexpr std::string_view kHumanPrediction = "human-prediction";
inline constexpr std::string_view kSaliencyPrefix = "saliency-map-";
inline constexpr std::string_view kDetectorPrefix = "detector-heatmap:";

bool is_known_kind(std::string_view kind) noexcept;
bool is_saliency_map(std::string_view kind) noexcept;
/// "detector-heatmap:osn" for original, "detector-heatmap:osn@saliency-enhanced" otherwise.
std::string detector_kind(std::string_view detector, std::string_view condition);
}  // namespace artifact

struct ImageRecord {
    std::string id;
    fs::path image_path;
    /// More than one path for multi-manipulation images; unioned on load.
    std::vector<fs::path> mask_paths;
    Dataset dataset = Dataset::Custom;
    int width = 0;
    int height = 0;
    std::map<std::string, fs::path, std::less<>> derived;
};

/// Ordered, immutable-after-load collection of records with unique ids.
class Corpus {
public:
    Corpus() = default;
    /// Throws DuplicateId. `base_dir` only affects fingerprint().
    explicit Corpus(std::vector<ImageRecord> records, fs::path base_dir = {});

    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    const std::vector<ImageRecord>& records() const noexcept { return records_; }
    auto begin() const noexcept { return records_.begin(); }
    auto end() const noexcept { return records_.end(); }
    const ImageRecord& operator[](std::size_t i) const { return records_[i]; }

    const ImageRecord* find(std::string_view id) const;

    /// SHA-256 over a canonical serialization of every record.
    std::string fingerprint() const;

private:
    std::vector<ImageRecord> records_;
    fs::path base_dir_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Parses a manifest: one `key=value ...` record per line, `#` comments.
/// Relative paths resolve against the manifest's directory.
Corpus load_manifest(const fs::path& path);

/// Loads an 8- or 16-bit single-channel image as scores s / D.
PixelMap load_map(const fs::path& path);

/// Writes a 16-bit single-channel PNG (round-to-nearest quantization).
void save_map(const PixelMap& map, const fs::path& path);

inline constexpr double kDefaultMaskThreshold = 0.5;

/// bit = 1 iff score > threshold.
TamperMask binarize_mask(const PixelMap& map, double threshold = kDefaultMaskThreshold);

enum class Resample { Soft, Binary };

/// Soft maps: bilinear then clamp to [0,1]. Binary maps: nearest neighbour.
PixelMap align(const PixelMap& map, int target_w, int target_h, Resample kind);

/// Ground truth at record resolution: every mask binarized then unioned.
TamperMask load_mask(const ImageRecord& record);

/// On-disk layout for artifacts produced by the pipeline:
/// `<root>/<kind>/<image id>.png` plus a `.prov.json` sidecar.
class ArtifactLayout {
public:
    explicit ArtifactLayout(fs::path root) : root_(std::move(root)) {}

    const fs::path& root() const noexcept { return root_; }
    fs::path map_path(std::string_view image_id, std::string_view kind) const;
    fs::path file_path(std::string_view image_id, std::string_view kind,
                       std::string_view extension) const;

private:
    fs::path root_;
};

/// SALBIAS_DATA_DIR when set, otherwise `fallback`.
fs::path data_root(const fs::path& fallback);

/// Manifest entry for `kind` if present, else the layout path if it exists.
std::optional<fs::path> resolve_artifact(const ImageRecord& record, std::string_view kind,
                                         const ArtifactLayout* layout = nullptr);

/// Loads the named artifact and aligns it (soft) to the record's mask dims.
/// Throws MissingArtifact naming the image id when unresolvable.
PixelMap load_aligned_artifact(const ImageRecord& record, std::string_view kind,
                               const ArtifactLayout* layout = nullptr);

}  // namespace salbias
