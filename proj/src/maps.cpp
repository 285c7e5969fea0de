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

#include "salbias/maps.hpp"

#include <algorithm>
#include <string>

#include "salbias/error.hpp"

namespace salbias {

namespace {

void check_dims(int width, int height) {
    if (width < 0 || height < 0)
        throw Error(ErrorCode::OutOfRange, "negative map dimensions");
}

}  // namespace

PixelMap::PixelMap(int width, int height, double fill) : width_(width), height_(height) {
    check_dims(width, height);
    if (!(fill >= 0.0 && fill <= 1.0))
        throw Error(ErrorCode::OutOfRange, "fill value outside [0,1]");
    values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

PixelMap::PixelMap(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    check_dims(width, height);
    if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw Error(ErrorCode::DimensionMismatch,
                    "value count " + std::to_string(values_.size()) + " != " +
                        std::to_string(width) + "x" + std::to_string(height));
    for (double v : values_)
        if (!(v >= 0.0 && v <= 1.0))
            throw Error(ErrorCode::OutOfRange, "map value outside [0,1]: " + std::to_string(v));
}

void PixelMap::set(int x, int y, double v) {
    if (!(v >= 0.0 && v <= 1.0))
        throw Error(ErrorCode::OutOfRange, "map value outside [0,1]: " + std::to_string(v));
    values_[index(x, y)] = v;
}

TamperMask::TamperMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    check_dims(width, height);
    if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw Error(ErrorCode::DimensionMismatch, "mask bit count does not match dims");
    for (auto& b : bits_) b = b != 0 ? 1 : 0;
    positives_ = static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

PixelMap TamperMask::as_map() const {
    std::vector<double> values(bits_.begin(), bits_.end());
    return PixelMap(width_, height_, std::move(values));
}

TamperMask TamperMask::unite(const TamperMask& other) const {
    if (width_ != other.width_ || height_ != other.height_)
        throw Error(ErrorCode::DimensionMismatch, "cannot unite masks of different dims");
    std::vector<std::uint8_t> bits(bits_.size());
    std::transform(bits_.begin(), bits_.end(), other.bits_.begin(), bits.begin(),
                   [](std::uint8_t a, std::uint8_t b) -> std::uint8_t { return a | b; });
    return TamperMask(width_, height_, std::move(bits));
}

}  // namespace salbias
