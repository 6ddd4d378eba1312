#include <catch2/catch_amalgamated.hpp>

#include "settol/subset.hpp"

using namespace settol;

TEST_CASE("subset algebra", "[subset]") {
    const Subset a = Subset::of({0, 2, 5});
    const Subset b = Subset::of({2, 3});
    REQUIRE((a | b) == Subset::of({0, 2, 3, 5}));
    REQUIRE((a & b) == Subset::of({2}));
    REQUIRE((a - b) == Subset::of({0, 5}));
    REQUIRE(a.size() == 3);
    REQUIRE(a.contains(5));
    REQUIRE_FALSE(a.contains(1));
    REQUIRE(Subset::of({2}).is_subset_of(a));
    REQUIRE_FALSE(a.is_subset_of(b));
    REQUIRE(a.complement_in(6) == Subset::of({1, 3, 4}));
    REQUIRE(a.elements() == std::vector<std::size_t>{0, 2, 5});
    REQUIRE(Subset().empty());
}

TEST_CASE("subset bounds are enforced", "[subset]") {
    REQUIRE_THROWS_AS(Subset::single(64), usage_error);
    REQUIRE_THROWS_AS(Subset::full(65), usage_error);
    REQUIRE(Subset::full(64).size() == 64);
    REQUIRE(Subset::full(0).empty());
}

TEST_CASE("subset enumeration is complete, ascending, duplicate-free", "[subset]") {
    const Subset s = Subset::of({1, 3, 4, 7});
    const auto subs = s.subsets();
    REQUIRE(subs.size() == 16u);
    for (std::size_t i = 0; i + 1 < subs.size(); ++i) REQUIRE(subs[i] < subs[i + 1]);
    for (Subset f : subs) REQUIRE(f.is_subset_of(s));
    REQUIRE(subs.front().empty());
    REQUIRE(subs.back() == s);
}
