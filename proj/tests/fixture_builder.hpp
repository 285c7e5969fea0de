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

// Generates a synthetic corpus on disk with a planted saliency score per
// image and detector heatmaps whose signal rises with that score.
//
// Each image is size×size with a square tamper region. Saliency maps A and
// B hold score±delta inside the region and 0 outside, so the fused map's
// Mean Recall is the planted score. Heatmap pixels are (u + a·gt)/(1 + a)
// with u ~ U(0,1) and amplitude a equal to the planted score; for such maps
// the expected AuROC is 1 − (1 − a)²/2, increasing in a.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "salbias/corpus.hpp"
#include "salbias/saliency_binning.hpp"
#include "salbias/semantic.hpp"
#include "test_support.hpp"

namespace salbias::testing {

struct FixtureOptions {
    int per_bin = 10;
    int size = 48;
    int region = 12;
    std::uint64_t seed = 1234;
    std::string detector = "synth";
    /// Also write resized-baseline and saliency-enhanced heatmaps; the
    /// enhanced ones gain `boost` amplitude in bins 1 and 2 only.
    bool enhancement = false;
    double boost = 0.3;
    bool tags = false;
    /// Leave the heatmap of this image id out (empty: none).
    std::string drop_heatmap_for;
};

struct FixtureImage {
    std::string id;
    double planted_score = 0.0;
    int bin = 1;
};

struct Fixture {
    fs::path manifest;
    std::vector<FixtureImage> images;
};

inline double planted_score(int bin_index, int j, int per_bin) {
    const double lower = 0.2 * (bin_index - 1);
    return lower + 0.02 + 0.16 * (per_bin > 1 ? static_cast<double>(j) / (per_bin - 1) : 0.5);
}

inline PixelMap synthetic_heatmap(std::mt19937_64& rng, const TamperMask& gt, double amplitude) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(gt.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (u(rng) + amplitude * gt.bits()[i]) / (1.0 + amplitude);
    return PixelMap(gt.width(), gt.height(), std::move(v));
}

inline TagReport synthetic_tags(const std::string& id, TagVariant variant, double drift, std::mt19937_64& rng) {
    static const std::vector<std::string> base{"dog", "grass", "park", "ball", "tree", "bench", "sky", "path"};
    static const std::vector<std::string> intruders{"car", "road", "sign", "truck", "wall"};
    TagReport r{id, variant, "synthetic-tagger/0", "nouns-synthetic", {}};
    std::uniform_real_distribution<double> jitter(-0.01, 0.01);
    for (int t = 1; t <= 5; ++t) {
        std::vector<TagEntry> e;
        const int replaced = variant == TagVariant::Tampered ? static_cast<int>(drift * 5.0 + 0.5) : 0;
        for (std::size_t i = 0; i < base.size(); ++i) {
            const double p = 0.3 - 0.035 * static_cast<double>(i) + jitter(rng);
            const bool swap = static_cast<int>(i) < replaced;
            e.push_back({swap ? intruders[i % intruders.size()] : base[i], std::clamp(p, 0.0, 1.0)});
        }
        std::sort(e.begin(), e.end(), [](const TagEntry& a, const TagEntry& b) {
            return a.probability != b.probability ? a.probability > b.probability : a.tag < b.tag;
        });
        r.trials.push_back({std::move(e), t});
    }
    return r;
}

inline Fixture build_fixture(const fs::path& dir, const FixtureOptions& opt = {}) {
    Fixture fx;
    fx.manifest = dir / "manifest.txt";
    std::mt19937_64 rng(opt.seed);
    std::string manifest = "# synthetic saliency-trend fixture\n";
    const int off = (opt.size - opt.region) / 2;
    for (int b = 1; b <= kBinCount; ++b) {
        for (int j = 0; j < opt.per_bin; ++j) {
            const std::string id = fmt::format("syn_b{}_{:02d}", b, j);
            const double score = planted_score(b, j, opt.per_bin);
            fx.images.push_back({id, score, b});

            std::vector<std::uint8_t> bits(static_cast<std::size_t>(opt.size) * opt.size, 0);
            for (int y = off; y < off + opt.region; ++y)
                for (int x = off; x < off + opt.region; ++x) bits[static_cast<std::size_t>(y) * opt.size + x] = 1;
            const TamperMask gt(opt.size, opt.size, bits);
            save_map(gt.as_map(), dir / "masks" / (id + ".png"));

            const double delta = std::min({0.05, score, 1.0 - score});
            std::vector<double> a(bits.size(), 0.0), bmap(bits.size(), 0.0);
            for (std::size_t i = 0; i < bits.size(); ++i)
                if (bits[i]) {
                    a[i] = score + delta;
                    bmap[i] = score - delta;
                }
            save_map(PixelMap(opt.size, opt.size, a), dir / "saliency" / (id + "_a.png"));
            save_map(PixelMap(opt.size, opt.size, bmap), dir / "saliency" / (id + "_b.png"));

            std::string line = fmt::format(
                "id={} image=images/{}.png mask=masks/{}.png dataset=custom saliency-map-A=saliency/{}_a.png "
                "saliency-map-B=saliency/{}_b.png",
                id, id, id, id, id);
            const std::uint64_t image_seed = opt.seed * 1000003u + static_cast<std::uint64_t>(b * 100 + j);
            if (id != opt.drop_heatmap_for) {
                std::mt19937_64 noise(image_seed);
                save_map(synthetic_heatmap(noise, gt, score), dir / "det" / "original" / (id + ".png"));
                line += fmt::format(" detector-heatmap:{}=det/original/{}.png", opt.detector, id);
            }
            if (opt.enhancement) {
                std::mt19937_64 n1(image_seed), n2(image_seed);
                save_map(synthetic_heatmap(n1, gt, score), dir / "det" / "resized" / (id + ".png"));
                save_map(synthetic_heatmap(n2, gt, b <= 2 ? score + opt.boost : score),
                         dir / "det" / "enhanced" / (id + ".png"));
                line += fmt::format(" detector-heatmap:{}@resized-baseline=det/resized/{}.png", opt.detector, id);
                line += fmt::format(" detector-heatmap:{}@saliency-enhanced=det/enhanced/{}.png", opt.detector, id);
            }
            if (opt.tags) {
                std::mt19937_64 tr(image_seed);
                write_tag_report(synthetic_tags(id, TagVariant::Pristine, score, tr), dir / "tags" / (id + "_p.tags"));
                write_tag_report(synthetic_tags(id, TagVariant::Tampered, score, tr), dir / "tags" / (id + "_t.tags"));
                line += fmt::format(" pristine-tags=tags/{}_p.tags tampered-tags=tags/{}_t.tags", id, id);
            }
            manifest += line + "\n";
        }
    }
    write_text(fx.manifest, manifest);
    return fx;
}

}  // namespace salbias::testing
