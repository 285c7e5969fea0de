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
#include <cstdint>
#include <vector>

namespace salbias {

/// Row-major grid of scores in [0, 1]. Carrier for saliency maps, detector
/// heatmaps and human confidence maps.
class PixelMap {
public:
    PixelMap() = default;
    PixelMap(int width, int height, double fill = 0.0);
    /// Throws OutOfRange if a value leaves [0, 1] or the count mismatches.
    PixelMap(int width, int height, std::vector<double> values);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double at(int x, int y) const { return values_[index(x, y)]; }
    void set(int x, int y, double v);

    const std::vector<double>& values() const noexcept { return values_; }

    bool same_shape(const PixelMap& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

/// Binary ground-truth manipulation mask.
class TamperMask {
public:
    TamperMask() = default;
    TamperMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }

    bool at(int x, int y) const {
        return bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                     static_cast<std::size_t>(x)] != 0;
    }
    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

    std::size_t positive_count() const noexcept { return positives_; }
    std::size_t negative_count() const noexcept { return bits_.size() - positives_; }
    /// All-zero or all-one masks have no ROC.
    bool degenerate() const noexcept { return positives_ == 0 || positives_ == bits_.size(); }

    /// The mask as a {0,1}-valued PixelMap.
    PixelMap as_map() const;

    /// Pixelwise OR; both masks must share dims.
    TamperMask unite(const TamperMask& other) const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
    std::size_t positives_ = 0;
};

}  // namespace salbias
