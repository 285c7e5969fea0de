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

#include <doctest.h>

#include <algorithm>

#include "salbias/annotation.hpp"
#include "salbias/error.hpp"
#include "test_support.hpp"

using namespace salbias;
namespace st = salbias::testing;

namespace {

StudyResponse response(std::string participant, std::vector<BoundingBox> sal, std::vector<BoundingBox> man) {
    StudyResponse r;
    r.image_id = "img";
    r.participant_id = std::move(participant);
    r.saliency_boxes = std::move(sal);
    r.manipulation_boxes = std::move(man);
    r.timestamp = "2026-01-02T03:04:05Z";
    return r;
}

// Membership test per pixel, independent of the raster loop.
bool covered(const std::vector<BoundingBox>& boxes, int x, int y) {
    return std::any_of(boxes.begin(), boxes.end(),
                       [&](const BoundingBox& b) { return x >= b.x && x < b.x + b.w && y >= b.y && y < b.y + b.h; });
}

std::vector<BoundingBox> random_boxes(std::mt19937_64& rng, int w, int h, int max_count) {
    std::uniform_int_distribution<int> count(1, max_count);
    std::uniform_int_distribution<int> px(-2, w), py(-2, h), size(1, std::max(w, h));
    std::vector<BoundingBox> out;
    const int n = count(rng);
    while (static_cast<int>(out.size()) < n) {
        BoundingBox b{px(rng), py(rng), size(rng), size(rng)};
        if (b.clamped(w, h)) out.push_back(b);
    }
    return out;
}

}  // namespace

TEST_CASE("BoundingBox clamping") {
    CHECK(BoundingBox{-3, -1, 5, 4}.clamped(10, 10) == BoundingBox{0, 0, 2, 3});
    CHECK(BoundingBox{8, 8, 5, 5}.clamped(10, 10) == BoundingBox{8, 8, 2, 2});
    CHECK_FALSE(BoundingBox{10, 0, 3, 3}.clamped(10, 10));
    CHECK_FALSE(BoundingBox{-5, 0, 5, 3}.clamped(10, 10));
}

TEST_CASE("rasterize_boxes") {
    CHECK(rasterize_boxes({}, 4, 3).values() == std::vector<double>(12, 0.0));
    const std::vector<BoundingBox> full{{0, 0, 4, 3}};
    CHECK(rasterize_boxes(full, 4, 3).values() == std::vector<double>(12, 1.0));

    const std::vector<BoundingBox> two{{0, 0, 3, 2}, {1, 1, 3, 3}};
    const PixelMap m = rasterize_boxes(two, 4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) CHECK(m.at(x, y) == (covered(two, x, y) ? 1.0 : 0.0));
    // 6 + 9 - 2 overlapping pixels
    double sum = 0.0;
    for (double v : m.values()) sum += v;
    CHECK(sum == 13.0);
}

TEST_CASE("rasterize_boxes agrees with per-pixel membership on random boxes") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 200; ++t) {
        const int w = 3 + t % 9, h = 2 + t % 7;
        const auto boxes = random_boxes(rng, w, h, 4);
        const PixelMap m = rasterize_boxes(boxes, w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) CHECK(m.at(x, y) == (covered(boxes, x, y) ? 1.0 : 0.0));
    }
}

TEST_CASE("aggregate_responses") {
    const std::vector<StudyResponse> one{response("p1", {{0, 0, 2, 1}}, {})};
    const auto a1 = aggregate_responses(one, StudyTask::Saliency, 3, 2);
    CHECK(a1.respondents == 1);
    CHECK(a1.map.values() == std::vector<double>{1, 1, 0, 0, 0, 0});

    std::vector<StudyResponse> five;
    for (int i = 0; i < 5; ++i)
        five.push_back(response("p" + std::to_string(i), {{0, 0, 1, 1}},
                                i < 3 ? std::vector<BoundingBox>{{1, 1, 1, 1}} : std::vector<BoundingBox>{}));
    const auto man = aggregate_responses(five, StudyTask::Manipulation, 3, 3);
    CHECK(man.respondents == 5);
    CHECK(man.map.at(1, 1) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(man.map.at(0, 0) == 0.0);

    std::vector<StudyResponse> pristine(5, response("p", {{0, 0, 1, 1}}, {}));
    const auto none = aggregate_responses(pristine, StudyTask::Manipulation, 4, 4);
    for (double v : none.map.values()) CHECK(v == 0.0);

    auto mixed = five;
    mixed[2].image_id = "other";
    try {
        aggregate_responses(mixed, StudyTask::Saliency, 3, 3);
        FAIL("expected MixedImageIds");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MixedImageIds);
    }
}

TEST_CASE("aggregation values are multiples of 1/n and permutation invariant") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 100; ++t) {
        const int w = 6, h = 5, n = 1 + t % 7;
        std::vector<StudyResponse> rs;
        for (int i = 0; i < n; ++i) rs.push_back(response("p" + std::to_string(i), random_boxes(rng, w, h, 3), {}));
        const auto a = aggregate_responses(rs, StudyTask::Saliency, w, h);
        for (double v : a.map.values()) {
            const double k = v * n;
            CHECK(std::abs(k - std::round(k)) <= 1e-9);
        }
        std::shuffle(rs.begin(), rs.end(), rng);
        CHECK(aggregate_responses(rs, StudyTask::Saliency, w, h).map.values() == a.map.values());
    }
}

TEST_CASE("adding a consensus response moves pixels by at most 1/(n+1)") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 100; ++t) {
        const int w = 7, h = 6, n = 1 + t % 6;
        std::vector<StudyResponse> rs;
        for (int i = 0; i < n; ++i) rs.push_back(response("p" + std::to_string(i), random_boxes(rng, w, h, 3), {}));
        const auto before = aggregate_responses(rs, StudyTask::Saliency, w, h);
        // A participant whose raster is the aggregate rounded at 0.5.
        std::vector<BoundingBox> consensus;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (before.map.at(x, y) >= 0.5) consensus.push_back({x, y, 1, 1});
        if (consensus.empty()) continue;
        rs.push_back(response("consensus", consensus, {}));
        const auto after = aggregate_responses(rs, StudyTask::Saliency, w, h);
        for (std::size_t i = 0; i < after.map.size(); ++i)
            CHECK(std::abs(after.map.values()[i] - before.map.values()[i]) <= 1.0 / (n + 1) + 1e-12);
    }
}

TEST_CASE("human scores") {
    const TamperMask gt(4, 4, {0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0});
    std::vector<StudyResponse> unanimous(5, response("p", {{1, 1, 2, 2}}, {{1, 1, 2, 2}}));
    CHECK(*human_detection_score(unanimous, gt).value == 1.0);
    CHECK(*human_saliency_score(unanimous, gt).value == 1.0);

    std::vector<StudyResponse> empty(5, response("p", {{0, 0, 1, 1}}, {}));
    CHECK(*human_detection_score(empty, gt).value == 0.5);
    CHECK(*human_saliency_score(empty, gt).value == 0.0);

    // 3 correct boxes, 2 boxes on a pristine corner.
    std::vector<StudyResponse> split;
    for (int i = 0; i < 5; ++i)
        split.push_back(response("p" + std::to_string(i), {{0, 0, 4, 4}},
                                 i < 3 ? std::vector<BoundingBox>{{1, 1, 2, 2}} : std::vector<BoundingBox>{{0, 0, 2, 1}}));
    const auto agg = aggregate_responses(split, StudyTask::Manipulation, 4, 4);
    const auto oracle = st::brute_force_auroc(agg.map.values(), gt.bits());
    CHECK(*human_detection_score(split, gt).value == doctest::Approx(*oracle).epsilon(1e-12));
    // positives all at 0.6; negatives: 2 at 0.4, 10 at 0 -> every pair is a win
    CHECK(*oracle == 1.0);

    std::vector<StudyResponse> partly;
    for (int i = 0; i < 5; ++i)
        partly.push_back(response("p" + std::to_string(i), {{0, 0, 4, 4}},
                                  i < 3 ? std::vector<BoundingBox>{{1, 1, 1, 2}} : std::vector<BoundingBox>{{0, 0, 4, 2}}));
    const auto agg2 = aggregate_responses(partly, StudyTask::Manipulation, 4, 4);
    const auto oracle2 = st::brute_force_auroc(agg2.map.values(), gt.bits());
    CHECK(*human_detection_score(partly, gt).value == doctest::Approx(*oracle2).epsilon(1e-12));
}

TEST_CASE("human saliency recall is the mean of per-participant recalls") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 100; ++t) {
        const int w = 8, h = 6, n = 1 + t % 7;
        const TamperMask gt = st::random_mask(rng, w, h, 0.3);
        if (gt.positive_count() == 0) continue;
        std::vector<StudyResponse> rs;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            rs.push_back(response("p" + std::to_string(i), random_boxes(rng, w, h, 3), {}));
            sum += *mean_recall(rasterize_boxes(rs.back().saliency_boxes, w, h), gt).value;
        }
        CHECK(std::abs(*human_saliency_score(rs, gt).value - sum / n) <= 1e-12);
    }
}

TEST_CASE("response validation and exchange records") {
    auto r = response("p1", {{0, 0, 2, 2}}, {{1, 1, 5, 5}});
    CHECK_NOTHROW(validate_response(r, 4, 4));
    auto no_sal = r;
    no_sal.saliency_boxes.clear();
    CHECK_THROWS_AS(validate_response(no_sal, 4, 4), Error);
    auto zero = r;
    zero.manipulation_boxes = {{0, 0, 0, 3}};
    CHECK_THROWS_AS(validate_response(zero, 4, 4), Error);
    auto outside = r;
    outside.saliency_boxes = {{9, 9, 2, 2}};
    CHECK_THROWS_AS(validate_response(outside, 4, 4), Error);
    auto bad_ts = r;
    bad_ts.timestamp = "yesterday";
    CHECK_THROWS_AS(validate_response(bad_ts, 4, 4), Error);
    CHECK(is_iso8601_timestamp("2026-10-19T12:00:00.123+02:00"));

    r.study_id = "s";
    r.session_id = "s-000001";
    const auto back = response_from_json(to_json(r));
    CHECK(back.saliency_boxes == r.saliency_boxes);
    CHECK(back.manipulation_boxes == r.manipulation_boxes);
    CHECK(back.session_id == r.session_id);
    CHECK(back.timestamp == r.timestamp);

    try {
        response_from_json(nlohmann::json{{"image_id", "x"}, {"participant_id", 3}});
        FAIL("expected SchemaViolation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SchemaViolation);
    }
    CHECK_THROWS_AS(response_from_json(nlohmann::json::parse(
                        R"({"image_id":"x","participant_id":"p","saliency_boxes":[{"x":1,"y":2,"w":3}]})")),
                    Error);
}

TEST_CASE("read_responses_jsonl accepts plain records and journal entries") {
    st::TempDir dir;
    const auto r = response("p1", {{0, 0, 2, 2}}, {});
    const nlohmann::json journal_entry = {{"type", "response"}, {"session_id", "s"}, {"record", to_json(r)}};
    const nlohmann::json session_entry = {{"type", "session"}, {"session_id", "s"}};
    st::write_text(dir / "r.jsonl", to_json(r).dump() + "\n\n" + session_entry.dump() + "\n" + journal_entry.dump() + "\n");
    const auto rs = read_responses_jsonl(dir / "r.jsonl");
    REQUIRE(rs.size() == 2);
    CHECK(rs[1].participant_id == "p1");
}
