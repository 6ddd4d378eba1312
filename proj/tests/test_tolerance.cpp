#include <catch2/catch_amalgamated.hpp>

#include "settol/oracle.hpp"
#include "settol/tolerance.hpp"
#include "support/fixtures.hpp"

using namespace settol;
using settol::testing::edge_set;
using settol::testing::fixture_e1;
using settol::testing::fixture_e2;
using settol::testing::fixture_graph;
using settol::testing::triangle_csp;

TEST_CASE("single tolerances on the triangle instance", "[tolerance]") {
    const ExplicitCsp tri = triangle_csp();
    REQUIRE(single_upper(tri, 0).value == ExtendedValue(3));
    REQUIRE(single_upper(tri, 2).value.is_infinite());
    REQUIRE(single_lower(tri, 2).value == ExtendedValue(2));
    REQUIRE(single_lower(tri, 0).value == ExtendedValue(0));

    // an element in no feasible solution has infinite lower tolerance
    const ExplicitCsp spare({"a", "b", "d"}, {Rational(1), Rational(1), Rational(9)},
                            {Subset::of({0}), Subset::of({1})});
    REQUIRE(single_lower(spare, 2).value.is_infinite());
}

TEST_CASE("single tolerances on the fixture graph via the generic engine", "[tolerance]") {
    const MstCsp inst(fixture_graph());
    REQUIRE(single_upper(inst, *inst.index_of("v1-v2")).value == ExtendedValue(1));
    REQUIRE(single_lower(inst, *inst.index_of("v5-v7")).value == ExtendedValue(4));
}

TEST_CASE("restricted value table on the triangle", "[tolerance]") {
    const ExplicitCsp tri = triangle_csp();
    tri.reset_solve_count();
    RestrictedValueTable t = restricted_values(tri, Subset::of({0, 1}));
    REQUIRE(tri.solve_count() == 4); // 2^2 solves
    const Subset e = Subset::of({0, 1});
    REQUIRE(t.restricted(e, e) == ExtendedValue(3));
    REQUIRE(t.restricted(e, Subset::of({0})) == ExtendedValue(5));
    REQUIRE(t.restricted(e, Subset::of({1})) == ExtendedValue(6));
    REQUIRE(t.restricted(e, Subset()).is_infinite());
    REQUIRE(tri.solve_count() == 4); // all cached

    // the F = E row is the include value by definition
    REQUIRE(t.restricted(e, e) == t.include_value(e));
}

TEST_CASE("restricted values reject the empty target set", "[tolerance]") {
    const ExplicitCsp tri = triangle_csp();
    REQUIRE_THROWS_AS(restricted_values(tri, Subset()), usage_error);
    REQUIRE_THROWS_AS(set_upper_eul(tri, Subset()), usage_error);
    REQUIRE_THROWS_AS(set_lower_ell(tri, Subset()), usage_error);
}

TEST_CASE("set upper tolerance via the exact upper program", "[tolerance]") {
    const ExplicitCsp tri = triangle_csp();
    const ToleranceReport rep = set_upper_eul(tri, Subset::of({0, 1}));
    REQUIRE(rep.value == ExtendedValue(5));
    REQUIRE(rep.method == Method::Eul);
    REQUIRE(*rep.witness == std::vector<Rational>{Rational(3), Rational(2)});

    const MstCsp inst(fixture_graph());
    REQUIRE(set_upper_eul(inst, fixture_e1(inst)).value.is_infinite());
    // the optimal distribution on the eight-edge set: +4 on the four edges at
    // v6/v7, +2 on the two edges at v4, +3 on the two remaining ones
    const ToleranceReport e2 = set_upper_eul(inst, fixture_e2(inst));
    REQUIRE(e2.value == ExtendedValue(26));
    REQUIRE(*e2.witness ==
            std::vector<Rational>{Rational(3), Rational(3), Rational(2), Rational(2), Rational(4),
                                  Rational(4), Rational(4), Rational(4)});
}

TEST_CASE("set lower tolerance via the exact lower program", "[tolerance]") {
    const ExplicitCsp tri = triangle_csp();
    const ToleranceReport rep = set_lower_ell(tri, Subset::of({0, 2}));
    REQUIRE(rep.value == ExtendedValue(2));
    REQUIRE(*rep.witness == std::vector<Rational>{Rational(0), Rational(2)});

    const MstCsp inst(fixture_graph());
    REQUIRE(set_lower_ell(inst, fixture_e1(inst)).value == ExtendedValue(6));
    REQUIRE(set_lower_ell(inst, fixture_e2(inst)).value == ExtendedValue(0));
}

TEST_CASE("include lower program agrees and reuses the memo", "[tolerance]") {
    const ExplicitCsp tri = triangle_csp();
    REQUIRE(set_lower_ill(tri, Subset::of({0, 2})).value == ExtendedValue(2));

    // warm memo: only the include value of E itself is a fresh solve
    RestrictedValueTable memo(tri);
    memo.cstar();
    const Subset e = Subset::of({0, 2});
    e.for_each_subset([&](Subset f) {
        if (!f.empty() && f != e) memo.include_value(f);
    });
    tri.reset_solve_count();
    const ToleranceReport rep = set_lower_ill(tri, e, &memo);
    REQUIRE(rep.value == ExtendedValue(2));
    REQUIRE(rep.solves_used == 1);
    REQUIRE(tri.solve_count() == 1);

    const MstCsp inst(fixture_graph());
    REQUIRE(set_lower_ill(inst, fixture_e1(inst)).value == ExtendedValue(6));
}

TEST_CASE("tolerance lower program and its degenerate singleton", "[tolerance]") {
    const ExplicitCsp tri = triangle_csp();
    REQUIRE(set_lower_tll(tri, Subset::of({0, 2})).value == ExtendedValue(2));
    // |E| = 1 reduces to the single lower formula
    REQUIRE(set_lower_tll(tri, Subset::of({2})).value == single_lower(tri, 2).value);

    const MstCsp inst(fixture_graph());
    REQUIRE(set_lower_tll(inst, fixture_e2(inst)).value == ExtendedValue(0));
}

TEST_CASE("all-subsets recursion: values, counts, ordering", "[tolerance]") {
    const ExplicitCsp tri = triangle_csp();

    const auto tll = all_subsets_lower(tri, LowerMethod::Tll);
    REQUIRE(tll.size() == 7);
    REQUIRE(tri.solve_count() <= 8); // 2^3
    REQUIRE(tll.at(Subset::of({0, 1, 2})).value == ExtendedValue(2));
    REQUIRE(tll.at(Subset::of({2})).value == ExtendedValue(2));
    REQUIRE(tll.at(Subset::of({0, 1})).value == ExtendedValue(0));

    const auto ill = all_subsets_lower(tri, LowerMethod::Ill);
    REQUIRE(tri.solve_count() <= 8);
    for (const auto& [e, rep] : tll) REQUIRE(ill.at(e).value == rep.value);

    const auto naive = all_subsets_lower(tri, LowerMethod::EllNaive);
    REQUIRE(tri.solve_count() == 27); // 3^3, strictly more
    for (const auto& [e, rep] : tll) REQUIRE(naive.at(e).value == rep.value);
}

TEST_CASE("all-subsets cap produces a usage error with the required count", "[tolerance]") {
    Rng rng(5);
    OracleConfig cfg;
    const ExplicitCsp inst = random_explicit_csp(rng, 5, cfg);
    AllSubsetsOptions opt;
    opt.cap = 2;
    REQUIRE_THROWS_AS(all_subsets_lower(inst, LowerMethod::Tll, opt), usage_error);
    try {
        all_subsets_lower(inst, LowerMethod::Tll, opt);
    } catch (const usage_error& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find(std::to_string(1ull << inst.ground_size())) != std::string::npos);
    }
}

TEST_CASE("stratum parallelism is bit-identical to the sequential run", "[tolerance]") {
    Rng rng(11);
    OracleConfig cfg;
    for (int trial = 0; trial < 10; ++trial) {
        const ExplicitCsp inst = random_explicit_csp(rng, 6, cfg);
        const auto seq = all_subsets_lower(inst, LowerMethod::Tll);
        const std::uint64_t seq_solves = inst.solve_count();
        AllSubsetsOptions opt;
        opt.jobs = 4;
        const auto par = all_subsets_lower(inst, LowerMethod::Tll, opt);
        REQUIRE(inst.solve_count() == seq_solves);
        REQUIRE(par.size() == seq.size());
        for (const auto& [e, rep] : seq) {
            REQUIRE(par.at(e).value == rep.value);
            REQUIRE(par.at(e).witness == rep.witness);
        }
    }
}

TEST_CASE("closed form, two-element upper", "[tolerance]") {
    const ExplicitCsp tri = triangle_csp();
    const ToleranceReport ab = closed_upper_2(tri, Subset::of({0, 1}));
    REQUIRE(ab.value == ExtendedValue(5));
    REQUIRE(ab.case_label == "a");

    // both elements appear in optimal solutions but never together
    const ExplicitCsp split({"a", "b"}, {Rational(2), Rational(2)},
                            {Subset::of({0}), Subset::of({1}), Subset::of({0, 1})});
    const ToleranceReport b = closed_upper_2(split, Subset::of({0, 1}));
    REQUIRE(b.case_label == "b");
    REQUIRE(b.value.is_infinite());
    REQUIRE(set_upper_eul(split, Subset::of({0, 1})).value.is_infinite());

    const ToleranceReport c = closed_upper_2(tri, Subset::of({0, 2}));
    REQUIRE(c.case_label == "c");
    REQUIRE(c.value.is_infinite());
}

TEST_CASE("closed form, three-element upper", "[tolerance]") {
    // the three cheapest-tier edges around v6/v7 in the fixture: every one of
    // them sits in some minimum tree, value frozen against the exact program
    const MstCsp inst(fixture_graph());
    const Subset green = edge_set(inst, {"v5-v6", "v6-v7", "v1-v7"});
    const ToleranceReport rep = closed_upper_3(inst, green);
    REQUIRE(rep.value == ExtendedValue(0));
    REQUIRE(rep.value == set_upper_eul(inst, green).value);

    // an element in no solution at all forces the final fallback case
    const ExplicitCsp with_z({"a", "b", "c", "z"},
                             {Rational(1), Rational(2), Rational(4), Rational(5)},
                             {Subset::of({0, 1}), Subset::of({0, 2}), Subset::of({1, 2})});
    const ToleranceReport f = closed_upper_3(with_z, Subset::of({0, 1, 3}));
    REQUIRE(f.case_label == "f");
    REQUIRE(f.value.is_infinite());
}

TEST_CASE("closed form, two-element lower", "[tolerance]") {
    const ExplicitCsp tri = triangle_csp();
    REQUIRE(closed_lower_2(tri, Subset::of({0, 2})).value == ExtendedValue(2));
    // both elements inside the optimal solution: capped at zero
    REQUIRE(closed_lower_2(tri, Subset::of({0, 1})).value == ExtendedValue(0));

    const MstCsp inst(fixture_graph());
    const Subset pair = edge_set(inst, {"v3-v4", "v5-v7"});
    REQUIRE(closed_lower_2(inst, pair).value == ExtendedValue(6));
    // the cheapest tree through both edges costs 19 = 13 + 6
    RestrictedValueTable t(inst);
    REQUIRE(t.include_value(pair) == ExtendedValue(19));
}

TEST_CASE("closed form, three-element lower", "[tolerance]") {
    const ExplicitCsp tri = triangle_csp();
    REQUIRE(closed_lower_3(tri, Subset::of({0, 1, 2})).value == ExtendedValue(2));

    // all three in one optimal solution with a zero cap
    const ExplicitCsp flat({"a", "b", "c", "d"},
                           {Rational(1), Rational(1), Rational(1), Rational(3)},
                           {Subset::of({0, 1, 2}), Subset::of({3})});
    REQUIRE(closed_lower_3(flat, Subset::of({0, 1, 2})).value == ExtendedValue(0));
}

TEST_CASE("closed forms equal the exact programs on random instances", "[tolerance]") {
    Rng rng(31337);
    OracleConfig cfg;
    for (int trial = 0; trial < 200; ++trial) {
        const ExplicitCsp inst = random_explicit_csp(rng, 5, cfg);
        const std::size_t m = inst.ground_size();
        for (std::size_t k : {std::size_t{2}, std::size_t{3}}) {
            if (m < k) continue;
            Subset e;
            while (e.size() < k) e = e.with(rng.below(m));
            if (k == 2) {
                REQUIRE(closed_upper_2(inst, e).value == set_upper_eul(inst, e).value);
                REQUIRE(closed_lower_2(inst, e).value == set_lower_ell(inst, e).value);
            } else {
                REQUIRE(closed_upper_3(inst, e).value == set_upper_eul(inst, e).value);
                REQUIRE(closed_lower_3(inst, e).value == set_lower_ell(inst, e).value);
            }
        }
    }
}

TEST_CASE("lower methods are exactly equivalent on random instances", "[tolerance]") {
    Rng rng(424242);
    OracleConfig cfg;
    for (int trial = 0; trial < 120; ++trial) {
        const ExplicitCsp inst = random_explicit_csp(rng, 6, cfg);
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(4, inst.ground_size()));
        Subset e;
        while (e.size() < k) e = e.with(rng.below(inst.ground_size()));
        const ExtendedValue ell = set_lower_ell(inst, e).value;
        REQUIRE(set_lower_ill(inst, e).value == ell);
        REQUIRE(set_lower_tll(inst, e).value == ell);
    }
}

TEST_CASE("bound report values on the triangle", "[tolerance]") {
    const ExplicitCsp tri = triangle_csp();
    const Subset e = Subset::of({0, 1, 2});
    BoundsQuery q;
    q.binomial_s = 2;
    q.partition = std::vector<Subset>{Subset::of({0}), Subset::of({1, 2})};
    const BoundsReport rep = bounds_report(tri, e, q);
    REQUIRE(rep.max_single_lower == ExtendedValue(2));
    REQUIRE(rep.sum_single_lower == ExtendedValue(2));
    REQUIRE(rep.min_cost_bound.is_infinite());
    // s = 2 sums the pairwise ltowers 0, 2, 2 and divides by 2
    REQUIRE(*rep.binomial_bound == ExtendedValue(2));
    REQUIRE(*rep.partition_bound == ExtendedValue(2)); // 0 + 2
    // the third element sits in no optimal solution, so its upper tolerance
    // (and with it the max) is infinite
    REQUIRE(rep.max_single_upper.is_infinite());
}

TEST_CASE("bound report rejects bad queries", "[tolerance]") {
    const ExplicitCsp tri = triangle_csp();
    const Subset e = Subset::of({0, 1, 2});
    BoundsQuery bad_s;
    bad_s.binomial_s = 3;
    REQUIRE_THROWS_AS(bounds_report(tri, e, bad_s), usage_error);
    bad_s.binomial_s = 0;
    REQUIRE_THROWS_AS(bounds_report(tri, e, bad_s), usage_error);

    BoundsQuery bad_p;
    bad_p.partition = std::vector<Subset>{Subset::of({0})};
    REQUIRE_THROWS_AS(bounds_report(tri, e, bad_p), usage_error); // misses elements
    bad_p.partition = std::vector<Subset>{Subset::of({0, 1}), Subset::of({1, 2})};
    REQUIRE_THROWS_AS(bounds_report(tri, e, bad_p), usage_error); // overlap
    bad_p.partition = std::vector<Subset>{e};
    REQUIRE_THROWS_AS(bounds_report(tri, e, bad_p), usage_error); // self-referential
}

TEST_CASE("bound sandwich holds on random instances", "[tolerance]") {
    Rng rng(555);
    OracleConfig cfg;
    for (int trial = 0; trial < 80; ++trial) {
        const ExplicitCsp inst = random_explicit_csp(rng, 5, cfg);
        const std::size_t k = 2 + rng.below(std::min<std::size_t>(3, inst.ground_size() - 1));
        Subset e;
        while (e.size() < k) e = e.with(rng.below(inst.ground_size()));

        const ExtendedValue lower = set_lower_ell(inst, e).value;
        const ExtendedValue upper = set_upper_eul(inst, e).value;
        BoundsQuery q;
        q.binomial_s = 1 + rng.below(k - 1);
        // random two-block partition
        const auto elems = e.elements();
        Subset block;
        for (std::size_t i = 0; i + 1 < elems.size(); ++i)
            if (rng.coin()) block = block.with(elems[i]);
        if (block.empty()) block = Subset::single(elems[0]);
        q.partition = std::vector<Subset>{block, e - block};
        const BoundsReport rep = bounds_report(inst, e, q);

        REQUIRE(rep.max_single_lower <= lower);
        REQUIRE(lower <= rep.sum_single_lower);
        REQUIRE(lower <= rep.min_cost_bound);
        REQUIRE(lower <= *rep.binomial_bound);
        REQUIRE(lower <= *rep.partition_bound);
        REQUIRE(rep.max_single_upper <= upper);
    }
}

TEST_CASE("binomial bound with s = k-1 averages the pairwise lowers", "[tolerance]") {
    const ExplicitCsp tri = triangle_csp();
    BoundsQuery q;
    q.binomial_s = 2;
    const BoundsReport rep = bounds_report(tri, Subset::of({0, 1, 2}), q);
    const ExtendedValue expect =
        (set_lower_ell(tri, Subset::of({0, 1})).value + set_lower_ell(tri, Subset::of({0, 2})).value +
         set_lower_ell(tri, Subset::of({1, 2})).value)
            .scaled(Rational(1, 2));
    REQUIRE(*rep.binomial_bound == expect);
}

TEST_CASE("finite lower witnesses re-evaluate to the optimum and are maximal", "[tolerance]") {
    Rng rng(808);
    OracleConfig cfg;
    const Rational eps(1, 1000);
    for (int trial = 0; trial < 60; ++trial) {
        const ExplicitCsp inst = random_explicit_csp(rng, 5, cfg);
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(3, inst.ground_size()));
        Subset e;
        while (e.size() < k) e = e.with(rng.below(inst.ground_size()));
        const ToleranceReport rep = set_lower_ell(inst, e);
        if (!rep.witness) continue;
        REQUIRE(certify_lower_witness(inst, e, *rep.witness));
        REQUIRE(lower_witness_is_maximal(inst, e, *rep.witness, eps));
    }
}

TEST_CASE("lower tolerance is zero whenever the include value equals the optimum",
          "[tolerance]") {
    Rng rng(909);
    OracleConfig cfg;
    for (int trial = 0; trial < 80; ++trial) {
        const ExplicitCsp inst = random_explicit_csp(rng, 5, cfg);
        RestrictedValueTable t(inst);
        const ExtendedValue cstar = t.cstar();
        const Subset full = inst.full_set();
        const Subset e = Subset::of_bits(rng.raw() & full.bits());
        if (e.empty()) continue;
        if (t.include_value(e) == cstar)
            REQUIRE(set_lower_ell(inst, e).value == ExtendedValue(0));
    }
}

TEST_CASE("solve-count accounting across ground sizes", "[tolerance]") {
    Rng rng(616);
    OracleConfig cfg;
    for (std::size_t m : {std::size_t{3}, std::size_t{4}, std::size_t{5}}) {
        ExplicitCsp inst = [&] {
            for (;;) {
                ExplicitCsp candidate = random_explicit_csp(rng, m, cfg);
                if (candidate.ground_size() == m) return candidate;
            }
        }();
        std::uint64_t twoM = 1ull << m;
        std::uint64_t threeM = 1;
        for (std::size_t i = 0; i < m; ++i) threeM *= 3;

        all_subsets_lower(inst, LowerMethod::Tll);
        REQUIRE(inst.solve_count() <= twoM);
        all_subsets_lower(inst, LowerMethod::Ill);
        REQUIRE(inst.solve_count() <= twoM);
        all_subsets_lower(inst, LowerMethod::EllNaive);
        REQUIRE(inst.solve_count() == threeM);
    }
}
