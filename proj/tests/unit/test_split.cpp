#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "zipper/errors.hpp"
#include "zipper/split.hpp"

using namespace zipper;

namespace {

std::vector<std::size_t> iota_vec(std::size_t n, std::size_t start = 0) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), start);
    return v;
}

void check_partition(const ZipperSplit& s, const std::vector<std::size_t>& fold) {
    std::vector<std::size_t> all;
    all.insert(all.end(), s.a.begin(), s.a.end());
    all.insert(all.end(), s.b.begin(), s.b.end());
    all.insert(all.end(), s.o.begin(), s.o.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expected = fold;
    std::sort(expected.begin(), expected.end());
    CHECK(all == expected);  // union is the fold and nothing repeats
    CHECK(s.a.size() == s.b.size());
}

}  // namespace

TEST_SUITE("split") {

TEST_CASE("fold sizes are balanced") {
    RandomSource rng(1);
    const FoldPlan even = make_folds(10, 5, rng);
    for (auto size : even.sizes()) CHECK(size == 2);

    const FoldPlan odd = make_folds(11, 5, rng);
    auto sizes = odd.sizes();
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{2, 2, 2, 2, 3});

    for (std::size_t n : {20u, 37u, 101u, 500u}) {
        for (std::size_t k : {2u, 3u, 5u}) {
            const FoldPlan plan = make_folds(n, k, rng);
            const auto s = plan.sizes();
            CHECK(*std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end()) <= 1);
            std::size_t total = 0;
            for (std::size_t f = 0; f < k; ++f) {
                const auto members = plan.members(f);
                const auto rest = plan.complement(f);
                CHECK(members.size() + rest.size() == n);
                total += members.size();
            }
            CHECK(total == n);
        }
    }
}

TEST_CASE("fold plans are deterministic") {
    RandomSource a(77), b(77);
    CHECK(make_folds(500, 5, a).assignment == make_folds(500, 5, b).assignment);
}

TEST_CASE("fold count limits") {
    RandomSource rng(1);
    CHECK_THROWS_AS(make_folds(20, 1, rng), ConfigError);
    CHECK_THROWS_AS(make_folds(20, 21, rng), ConfigError);
    CHECK_NOTHROW(make_folds(20, 20, rng));
    // a zipper plan needs at least four observations per fold
    CHECK_THROWS_AS(make_plan(20, 6, 0.5, rng), ConfigError);
    CHECK_NOTHROW(make_plan(20, 5, 0.5, rng));
}

TEST_CASE("split geometry examples") {
    auto s = split_sizes(100, 0.0);
    CHECK(s.m == 50);
    CHECK(s.o == 0);
    CHECK(s.a == 50);

    s = split_sizes(100, 400.0 / 450.0);
    CHECK(s.m == 90);
    CHECK(s.o == 80);
    CHECK(s.a == 10);

    s = split_sizes(100, 0.5);
    CHECK(s.m == 67);
    CHECK(s.o == 34);
    CHECK(s.a == 33);

    RandomSource rng(3);
    const auto fold = iota_vec(100);
    const ZipperSplit z = zipper_split(fold, 0.5, rng);
    CHECK(z.tau_realized() == doctest::Approx(34.0 / 67.0));
    CHECK(z.tau_realized() == doctest::Approx(0.507).epsilon(1e-3));

    CHECK_THROWS_WITH_AS(split_sizes(100, 1.0), "slider must lie in [0,1)", ConfigError);
    CHECK_THROWS_AS(split_sizes(100, -0.1), ConfigError);
}

TEST_CASE("split partitions every fold") {
    RandomSource rng(8);
    for (std::size_t nk : {4u, 5u, 9u, 50u, 99u, 100u, 101u}) {
        for (double tau : {0.0, 0.1, 0.25, 0.5, 0.6}) {
            const auto fold = iota_vec(nk, 1000);
            const ZipperSplit z = zipper_split(fold, tau, rng, 3);
            check_partition(z, fold);
            const auto expected = split_sizes(nk, tau);
            CHECK(z.o.size() == expected.o);
            CHECK(z.o.size() + z.a.size() == expected.m);
            CHECK(z.fold == 3);
            if (tau == 0.0 && nk % 2 == 0) CHECK(z.o.empty());
        }
    }
}

TEST_CASE("tight folds are rejected") {
    RandomSource rng(1);
    const auto tiny = iota_vec(3);
    CHECK_THROWS_AS(zipper_split(tiny, 0.0, rng), SplitError);
    const auto fold = iota_vec(10);
    CHECK_THROWS_AS(zipper_split(fold, 0.95, rng), SplitError);
}

TEST_CASE("overlap positions are random") {
    RandomSource rng(4);
    const auto fold = iota_vec(40);
    std::set<std::vector<std::size_t>> seen;
    for (int i = 0; i < 10; ++i) seen.insert(zipper_split(fold, 0.5, rng).o);
    CHECK(seen.size() == 10);
}

TEST_CASE("slider selection") {
    const auto automatic = SliderConfig::automatic(50);
    CHECK(select_slider(500, automatic) == doctest::Approx(400.0 / 450.0));
    CHECK(select_slider(10000, automatic) == 0.9);
    CHECK(select_slider(100, automatic) == 0.0);
    CHECK(select_slider(60, automatic) == 0.0);
    CHECK(select_slider(500, SliderConfig::fixed(0.3)) == 0.3);
    CHECK(select_slider(10000, SliderConfig::automatic(50, 0.95)) == 0.95);
    CHECK(select_slider(1000, SliderConfig::automatic(50, 0.95)) == doctest::Approx(900.0 / 950.0));

    CHECK_THROWS_AS(SliderConfig::fixed(1.0).validate(), ConfigError);
    CHECK_THROWS_AS(SliderConfig::automatic(1).validate(), ConfigError);
    CHECK_THROWS_AS(SliderConfig::automatic(50, 1.0).validate(), ConfigError);
}

TEST_CASE("plan totals stay within rounding slack") {
    RandomSource rng(12);
    for (std::size_t n : {40u, 97u, 500u, 1003u}) {
        for (std::size_t k : {2u, 5u, 10u}) {
            if (n < 8 * k) continue;
            for (double tau : {0.0, 0.3, 0.8}) {
                const ZipperPlan plan = make_plan(n, k, tau, rng);
                const double ideal = static_cast<double>(n) / (2.0 - tau);
                CHECK(static_cast<double>(plan.total_m()) >= ideal - 1e-9);
                CHECK(static_cast<double>(plan.total_m()) <= ideal + static_cast<double>(k));
                CHECK(plan.tau_realized() ==
                      doctest::Approx(static_cast<double>(plan.total_overlap()) /
                                      static_cast<double>(plan.total_m())));
                for (const auto& s : plan.splits) check_partition(s, plan.folds.members(s.fold));
            }
        }
    }
}

TEST_CASE("plan survives a JSON round trip") {
    RandomSource rng(5);
    const ZipperPlan plan = make_plan(60, 3, 0.4, rng);
    const ZipperPlan back = plan_from_json(to_json(plan));
    CHECK(back.folds.assignment == plan.folds.assignment);
    CHECK(back.tau_nominal == plan.tau_nominal);
    REQUIRE(back.splits.size() == plan.splits.size());
    for (std::size_t k = 0; k < plan.splits.size(); ++k) {
        CHECK(back.splits[k].a == plan.splits[k].a);
        CHECK(back.splits[k].b == plan.splits[k].b);
        CHECK(back.splits[k].o == plan.splits[k].o);
    }
    CHECK(to_json(back) == to_json(plan));
}

}
