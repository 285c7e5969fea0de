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

#include "salbias/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "salbias/error.hpp"
#include "salbias/provenance.hpp"

namespace salbias {

std::string_view to_string(Dataset d) noexcept {
    switch (d) {
        case Dataset::RT: return "RT";
        case Dataset::MFC18: return "MFC18";
        case Dataset::IMD2020: return "IMD2020";
        case Dataset::Custom: return "custom";
    }
    return "custom";
}

std::optional<Dataset> parse_dataset(std::string_view s) noexcept {
    if (s == "RT") return Dataset::RT;
    if (s == "MFC18") return Dataset::MFC18;
    if (s == "IMD2020") return Dataset::IMD2020;
    if (s == "custom") return Dataset::Custom;
    return std::nullopt;
}

namespace artifact {

bool is_saliency_map(std::string_view kind) noexcept {
    return kind.size() > kSaliencyPrefix.size() && kind.substr(0, kSaliencyPrefix.size()) == kSaliencyPrefix;
}

bool is_known_kind(std::string_view kind) noexcept {
    if (is_saliency_map(kind)) return true;
    if (kind.size() > kDetectorPrefix.size() && kind.substr(0, kDetectorPrefix.size()) == kDetectorPrefix)
        return true;
    return kind == kFusedSaliency || kind == kEnhancedImage || kind == kPristineTags ||
           kind == kTamperedTags || kind == kHumanSaliency || kind == kHumanPrediction;
}

std::string detector_kind(std::string_view detector, std::string_view condition) {
    std::string kind = std::string(kDetectorPrefix) + std::string(detector);
    if (!condition.empty() && condition != "original") kind += "@" + std::string(condition);
    return kind;
}

}  // namespace artifact

Corpus::Corpus(std::vector<ImageRecord> records, fs::path base_dir)
    : records_(std::move(records)), base_dir_(std::move(base_dir)) {
    index_.reserve(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& r = records_[i];
        if (r.id.empty()) throw Error(ErrorCode::ParseError, "record with empty id");
        if (!index_.emplace(r.id, i).second) throw Error(ErrorCode::DuplicateId, r.id);
    }
}

const ImageRecord* Corpus::find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &records_[it->second];
}

std::string Corpus::fingerprint() const {
    const auto rel = [&](const fs::path& p) {
        return (base_dir_.empty() ? p : p.lexically_relative(base_dir_)).generic_string();
    };
    std::string canon;
    for (const auto& r : records_) {
        canon += fmt::format("id={}\timage={}\tdataset={}\tsize={}x{}", r.id, rel(r.image_path),
                             to_string(r.dataset), r.width, r.height);
        for (const auto& m : r.mask_paths) canon += "\tmask=" + rel(m);
        for (const auto& [kind, path] : r.derived) canon += "\t" + kind + "=" + rel(path);
        canon += '\n';
    }
    return sha256_hex(canon);
}

namespace {

// Splits on whitespace; double quotes group a value containing spaces.
std::vector<std::string> tokenize(std::string_view line, std::size_t line_no) {
    std::vector<std::string> tokens;
    std::string cur;
    bool in_quotes = false;
    bool have = false;
    for (char c : line) {
        if (c == '"') {
            in_quotes = !in_quotes;
            have = true;
        } else if (!in_quotes && std::isspace(static_cast<unsigned char>(c))) {
            if (have) tokens.push_back(std::move(cur));
            cur.clear();
            have = false;
        } else {
            cur += c;
            have = true;
        }
    }
    if (in_quotes) throw Error(ErrorCode::ParseError, fmt::format("line {}: unterminated quote", line_no));
    if (have) tokens.push_back(std::move(cur));
    return tokens;
}

int parse_dim(const std::string& v, std::size_t line_no) {
    char* end = nullptr;
    const long n = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || n < 1 || n > 1'000'000)
        throw Error(ErrorCode::ParseError, fmt::format("line {}: bad dimension '{}'", line_no, v));
    return static_cast<int>(n);
}

std::pair<int, int> probe_dims(const fs::path& path) {
    if (!fs::exists(path)) throw Error(ErrorCode::MissingFile, path.string());
    const cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (m.empty()) throw Error(ErrorCode::UnsupportedFormat, path.string());
    return {m.cols, m.rows};
}

}  // namespace

Corpus load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, path.string());
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    const auto resolve = [&](const std::string& v) {
        const fs::path p(v);
        return p.is_absolute() ? p : (base / p).lexically_normal();
    };

    std::vector<ImageRecord> records;
    std::unordered_map<std::string, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        ImageRecord rec;
        bool has_dataset = false;
        for (const auto& tok : tokenize(line, line_no)) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos || eq == 0)
                throw Error(ErrorCode::ParseError, fmt::format("line {}: expected key=value, got '{}'", line_no, tok));
            const std::string key = tok.substr(0, eq);
            const std::string value = tok.substr(eq + 1);
            if (value.empty())
                throw Error(ErrorCode::ParseError, fmt::format("line {}: empty value for '{}'", line_no, key));
            if (key == "id") {
                rec.id = value;
            } else if (key == "image") {
                rec.image_path = resolve(value);
            } else if (key == "mask") {
                rec.mask_paths.push_back(resolve(value));
            } else if (key == "dataset") {
                const auto d = parse_dataset(value);
                if (!d) throw Error(ErrorCode::ParseError, fmt::format("line {}: unknown dataset '{}'", line_no, value));
                rec.dataset = *d;
                has_dataset = true;
            } else if (key == "width") {
                rec.width = parse_dim(value, line_no);
            } else if (key == "height") {
                rec.height = parse_dim(value, line_no);
            } else if (artifact::is_known_kind(key)) {
                if (!rec.derived.emplace(key, resolve(value)).second)
                    throw Error(ErrorCode::ParseError, fmt::format("line {}: artifact '{}' listed twice", line_no, key));
            } else {
                throw Error(ErrorCode::ParseError, fmt::format("line {}: unknown key '{}'", line_no, key));
            }
        }
        if (rec.id.empty() || rec.image_path.empty() || rec.mask_paths.empty() || !has_dataset)
            throw Error(ErrorCode::ParseError,
                        fmt::format("line {}: id, image, mask and dataset are required", line_no));
        if ((rec.width == 0) != (rec.height == 0))
            throw Error(ErrorCode::ParseError, fmt::format("line {}: width and height go together", line_no));
        if (rec.width == 0) std::tie(rec.width, rec.height) = probe_dims(rec.mask_paths.front());
        if (!seen.emplace(rec.id, records.size()).second) throw Error(ErrorCode::DuplicateId, rec.id);
        records.push_back(std::move(rec));
    }
    return Corpus(std::move(records), base);
}

PixelMap load_map(const fs::path& path) {
    if (!fs::exists(path)) throw Error(ErrorCode::MissingFile, path.string());
    const cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (m.empty()) throw Error(ErrorCode::UnsupportedFormat, path.string());
    if (m.channels() != 1)
        throw Error(ErrorCode::MultiChannelInput,
                    fmt::format("{} has {} channels", path.string(), m.channels()));
    double scale = 0.0;
    if (m.depth() == CV_8U)
        scale = 255.0;
    else if (m.depth() == CV_16U)
        scale = 65535.0;
    else
        throw Error(ErrorCode::UnsupportedFormat, path.string() + ": not 8- or 16-bit");

    std::vector<double> values;
    values.reserve(m.total());
    for (int y = 0; y < m.rows; ++y)
        for (int x = 0; x < m.cols; ++x)
            values.push_back((m.depth() == CV_8U ? m.at<std::uint8_t>(y, x) : m.at<std::uint16_t>(y, x)) / scale);
    return PixelMap(m.cols, m.rows, std::move(values));
}

void save_map(const PixelMap& map, const fs::path& path) {
    cv::Mat m(map.height(), map.width(), CV_16U);
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
            m.at<std::uint16_t>(y, x) = static_cast<std::uint16_t>(std::lround(map.at(x, y) * 65535.0));
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), m);
    } catch (const cv::Exception&) {
        ok = false;
    }
    if (!ok) throw Error(ErrorCode::UnwritablePath, path.string());
}

TamperMask binarize_mask(const PixelMap& map, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw Error(ErrorCode::OutOfRange, "threshold outside [0,1]");
    std::vector<std::uint8_t> bits(map.size());
    std::transform(map.values().begin(), map.values().end(), bits.begin(),
                   [threshold](double v) -> std::uint8_t { return v > threshold ? 1 : 0; });
    return TamperMask(map.width(), map.height(), std::move(bits));
}

PixelMap align(const PixelMap& map, int target_w, int target_h, Resample kind) {
    if (target_w <= 0 || target_h <= 0)
        throw Error(ErrorCode::ZeroTargetDimension, fmt::format("target {}x{}", target_w, target_h));
    if (map.empty()) throw Error(ErrorCode::EmptyInput, "cannot align an empty map");
    if (map.width() == target_w && map.height() == target_h) return map;

    const int sw = map.width();
    const int sh = map.height();
    const auto src = [&](int x, int y) {
        return map.values()[static_cast<std::size_t>(std::clamp(y, 0, sh - 1)) * static_cast<std::size_t>(sw) +
                            static_cast<std::size_t>(std::clamp(x, 0, sw - 1))];
    };
    // Pixel centres are aligned: destination x maps to (x + 0.5) * sw / dw - 0.5.
    const double sx = static_cast<double>(sw) / target_w;
    const double sy = static_cast<double>(sh) / target_h;
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(target_w) * static_cast<std::size_t>(target_h));
    for (int y = 0; y < target_h; ++y) {
        const double fy = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < target_w; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            if (kind == Resample::Binary) {
                values.push_back(src(static_cast<int>(std::floor(fx + 0.5)), static_cast<int>(std::floor(fy + 0.5))));
                continue;
            }
            const int x0 = static_cast<int>(std::floor(fx));
            const int y0 = static_cast<int>(std::floor(fy));
            const double wx = fx - x0;
            const double wy = fy - y0;
            const double top = src(x0, y0) * (1.0 - wx) + src(x0 + 1, y0) * wx;
            const double bottom = src(x0, y0 + 1) * (1.0 - wx) + src(x0 + 1, y0 + 1) * wx;
            values.push_back(std::clamp(top * (1.0 - wy) + bottom * wy, 0.0, 1.0));
        }
    }
    return PixelMap(target_w, target_h, std::move(values));
}

TamperMask load_mask(const ImageRecord& record) {
    std::optional<TamperMask> mask;
    for (const auto& path : record.mask_paths) {
        const PixelMap m = load_map(path);
        if (m.width() != record.width || m.height() != record.height)
            throw Error(ErrorCode::DimensionMismatch,
                        fmt::format("{}: mask {} is {}x{}, record says {}x{}", record.id, path.string(),
                                    m.width(), m.height(), record.width, record.height));
        TamperMask bin = binarize_mask(m);
        mask = mask ? mask->unite(bin) : std::move(bin);
    }
    if (!mask) throw Error(ErrorCode::MissingInput, record.id + ": no mask");
    return *mask;
}

namespace {

std::string sanitize_kind(std::string_view kind) {
    std::string out(kind);
    std::replace(out.begin(), out.end(), ':', '_');
    std::replace(out.begin(), out.end(), '@', '_');
    return out;
}

}  // namespace

fs::path ArtifactLayout::map_path(std::string_view image_id, std::string_view kind) const {
    return file_path(image_id, kind, ".png");
}

fs::path ArtifactLayout::file_path(std::string_view image_id, std::string_view kind,
                                   std::string_view extension) const {
    return root_ / sanitize_kind(kind) / (std::string(image_id) + std::string(extension));
}

fs::path data_root(const fs::path& fallback) {
    if (const char* env = std::getenv("SALBIAS_DATA_DIR"); env != nullptr && *env != '\0') return fs::path(env);
    return fallback;
}

std::optional<fs::path> resolve_artifact(const ImageRecord& record, std::string_view kind,
                                         const ArtifactLayout* layout) {
    if (const auto it = record.derived.find(kind); it != record.derived.end()) return it->second;
    if (layout != nullptr) {
        const bool is_tags = kind == artifact::kPristineTags || kind == artifact::kTamperedTags;
        auto p = is_tags ? layout->file_path(record.id, kind, ".tags") : layout->map_path(record.id, kind);
        if (fs::exists(p)) return p;
    }
    return std::nullopt;
}

PixelMap load_aligned_artifact(const ImageRecord& record, std::string_view kind,
                               const ArtifactLayout* layout) {
    const auto path = resolve_artifact(record, kind, layout);
    if (!path || !fs::exists(*path))
        throw Error(ErrorCode::MissingArtifact, fmt::format("{}: missing {}", record.id, kind));
    return align(load_map(*path), record.width, record.height, Resample::Soft);
}

}  // namespace salbias
