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

#include "salbias/error.hpp"
#include "salbias/saliency_binning.hpp"
#include "test_support.hpp"

using namespace salbias;
namespace st = salbias::testing;

TEST_CASE("fuse_saliency") {
    const PixelMap a(2, 1, std::vector<double>{0.2, 0.8});
    const PixelMap b(2, 1, std::vector<double>{0.4, 0.6});
    CHECK(fuse_saliency(std::vector{a}).values() == a.values());
    const auto zero_one = fuse_saliency(std::vector{PixelMap(3, 3, 0.0), PixelMap(3, 3, 1.0)});
    for (double v : zero_one.values()) CHECK(v == 0.5);
    const auto ab = fuse_saliency(std::vector{a, b});
    CHECK(ab.values()[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(ab.values()[1] == doctest::Approx(0.7).epsilon(1e-15));

    try {
        fuse_saliency(std::vector<PixelMap>{});
        FAIL("expected EmptyInput");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyInput);
    }
    try {
        fuse_saliency(std::vector{a, PixelMap(1, 2, 0.1)});
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("fuse_saliency is commutative, idempotent and bounded") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
        const auto a = st::random_map(rng, 4, 3, false);
        const auto b = st::random_map(rng, 4, 3, false);
        const auto ab = fuse_saliency(std::vector{a, b});
        const auto ba = fuse_saliency(std::vector{b, a});
        CHECK(ab.values() == ba.values());
        const auto aa = fuse_saliency(std::vector{a, a});
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(aa.values()[i] == doctest::Approx(a.values()[i]).epsilon(1e-15));
            CHECK(ab.values()[i] >= std::min(a.values()[i], b.values()[i]) - 1e-15);
            CHECK(ab.values()[i] <= std::max(a.values()[i], b.values()[i]) + 1e-15);
        }
    }
}

TEST_CASE("saliency_score delegates to mean recall and aligns") {
    const TamperMask gt(2, 2, {1, 1, 0, 0});
    CHECK(*saliency_score(gt.as_map(), gt).value == 1.0);
    CHECK(*saliency_score(PixelMap(2, 2, 0.0), gt).value == 0.0);
    CHECK(*saliency_score(PixelMap(2, 2, std::vector<double>{1.0, 0.5, 0.0, 0.25}), gt).value == 0.75);
    // Lower-resolution map is brought to mask resolution first.
    CHECK(*saliency_score(PixelMap(1, 1, 0.6), gt).value == doctest::Approx(0.6));
    CHECK_FALSE(saliency_score(PixelMap(2, 2, 0.3), TamperMask(2, 2, {0, 0, 0, 0})).defined());
}

TEST_CASE("assign_bin boundaries") {
    CHECK(assign_bin(0.0).index == 1);
    CHECK(assign_bin(0.19999999).index == 1);
    CHECK(assign_bin(0.2).index == 2);
    CHECK(assign_bin(0.4).index == 3);
    CHECK(assign_bin(0.6).index == 4);
    CHECK(assign_bin(0.8).index == 5);
    CHECK(assign_bin(1.0).index == 5);
    CHECK(assign_bin(0.5).label() == ".4 - .6");
    CHECK(bin_by_index(1).label() == "< .2");
    CHECK(bin_by_index(5).label() == "> .8");
    for (double bad : {-0.01, 1.0000001, std::nan("")}) {
        try {
            assign_bin(bad);
            FAIL("expected OutOfRange");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::OutOfRange);
        }
    }
}

TEST_CASE("assign_bin is total and monotone") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double prev_score = 0.0;
    int prev_bin = 1;
    std::vector<double> scores(20000);
    for (auto& s : scores) s = u(rng);
    std::sort(scores.begin(), scores.end());
    for (double s : scores) {
        const auto b = assign_bin(s);
        CHECK(b.lower <= s);
        CHECK((s < b.upper || (s == 1.0 && b.index == 5)));
        if (s > prev_score) CHECK(b.index >= prev_bin);
        prev_score = s;
        prev_bin = b.index;
    }
}

TEST_CASE("bin_distribution") {
    CHECK(bin_distribution({}).total == 0);
    CHECK(bin_distribution({}).counts == std::array<std::size_t, 5>{});

    std::vector<SaliencyAssignment> five;
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) five.push_back({"img", s, assign_bin(s), SaliencySource::MachineFused});
    const auto d = bin_distribution(five);
    CHECK(d.counts == std::array<std::size_t, 5>{1, 1, 1, 1, 1});
    double sum = 0.0;
    for (double p : d.proportions) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("assignment table round-trips exactly") {
    st::TempDir dir;
    AssignmentTable t;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const double s = i == 0 ? 1.0 : u(rng);
        t.assigned.push_back({"img_" + std::to_string(i), s, assign_bin(s), SaliencySource::HumanStudy});
    }
    t.undefined_ids = {"blank_a", "blank_b"};
    write_assignment_table(t, SaliencySource::HumanStudy, dir / "a.tsv");
    const auto back = read_assignment_table(dir / "a.tsv");
    REQUIRE(back.assigned.size() == 30);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(back.assigned[i].image_id == t.assigned[i].image_id);
        CHECK(back.assigned[i].score == t.assigned[i].score);
        CHECK(back.assigned[i].bin == t.assigned[i].bin);
        CHECK(back.assigned[i].source == SaliencySource::HumanStudy);
    }
    CHECK(back.undefined_ids == t.undefined_ids);
    CHECK(back.find("img_3") != nullptr);

    st::write_text(dir / "bad.tsv", "image_id\tscore\tbin_index\tsource\nx\t0.5\t2\tmachine-fused\n");
    try {
        read_assignment_table(dir / "bad.tsv");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
    }
}
