#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "settol/csp.hpp"
#include "settol/errors.hpp"
#include "settol/lp.hpp"
#include "settol/mst.hpp"
#include "settol/rational.hpp"
#include "settol/subset.hpp"

namespace settol {

/// Caps and reproducibility knobs for the brute-force verification machinery.
struct OracleConfig {
    std::size_t max_ground = 12;
    std::size_t max_vertices = 9;
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    long long cost_min = -5;
    long long cost_max = 9;
};

/// Deterministic seeded generator. Bounds go through the raw engine so the
/// stream is stable across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    /// Uniform in [lo, hi].
    long long between(long long lo, long long hi) {
        return lo + static_cast<long long>(raw() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(raw() % n); }

    bool coin() { return (raw() & 1u) != 0; }

private:
    std::mt19937_64 eng_;
};

namespace oracle_detail {

/// Direct filter-and-minimize over the listed solutions. This deliberately
/// repeats what ExplicitCsp::solve does rather than calling it, so oracle
/// results do not share a code path with the engine under test.
inline ExtendedValue best_value(const ExplicitCsp& inst, Subset exclude, Subset include) {
    ExtendedValue best = ExtendedValue::infinity();
    for (Subset s : inst.solutions()) {
        if (s.intersects(exclude) || !include.is_subset_of(s)) continue;
        best = min(best, inst.objective_of(s));
    }
    return best;
}

inline std::vector<Subset> optimal_solutions(const ExplicitCsp& inst) {
    const ExtendedValue cstar = best_value(inst, Subset(), Subset());
    std::vector<Subset> out;
    for (Subset s : inst.solutions())
        if (inst.objective_of(s) == cstar) out.push_back(s);
    return out;
}

inline void check_caps(const ExplicitCsp& inst, const OracleConfig& cfg) {
    if (inst.ground_size() > cfg.max_ground)
        throw usage_error("oracle capped at ground sets of " + std::to_string(cfg.max_ground) +
                          " elements");
}

} // namespace oracle_detail

/// Definition-level set lower tolerance: an independently built program over
/// values obtained by scanning the solution list, plus a re-evaluation of the
/// witness under the decreased costs.
inline ExtendedValue oracle_set_lower(const ExplicitCsp& inst, Subset e,
                                      const OracleConfig& cfg = {}) {
    oracle_detail::check_caps(inst, cfg);
    detail::require_nonempty(e);
    const ExtendedValue cstar = oracle_detail::best_value(inst, Subset(), Subset());
    const auto elems = e.elements();

    LinearProgram lp(std::vector<Rational>(elems.size(), Rational(1)));
    for (Subset f : e.subsets()) {
        const ExtendedValue v = oracle_detail::best_value(inst, e - f, f);
        if (v.is_infinite()) continue;
        std::vector<Rational> row(elems.size(), Rational(0));
        for (std::size_t i = 0; i < elems.size(); ++i)
            if (f.contains(elems[i])) row[i] = 1;
        lp.add_constraint(std::move(row), Relation::Le, v - cstar);
    }
    const LpOutcome out = solve_lp(lp);
    if (out.status == LpStatus::Unbounded) return ExtendedValue::infinity();

    // Certify: decreasing costs by the witness keeps the optimum at cstar.
    std::vector<Rational> costs = inst.costs();
    for (std::size_t i = 0; i < elems.size(); ++i) costs[elems[i]] -= (*out.witness)[i];
    ExtendedValue perturbed = ExtendedValue::infinity();
    for (Subset s : inst.solutions()) {
        Rational c = 0;
        for (std::size_t i : s.elements()) c += costs[i];
        perturbed = min(perturbed, ExtendedValue(std::move(c)));
    }
    if (perturbed != cstar)
        throw internal_error("oracle lower witness failed re-evaluation");
    return out.value;
}

/// Definition-level set upper tolerance: independently built program plus a
/// per-solution optimality re-check of the witness.
inline ExtendedValue oracle_set_upper(const ExplicitCsp& inst, Subset e,
                                      const OracleConfig& cfg = {}) {
    oracle_detail::check_caps(inst, cfg);
    detail::require_nonempty(e);
    const ExtendedValue cstar = oracle_detail::best_value(inst, Subset(), Subset());
    const auto optima = oracle_detail::optimal_solutions(inst);
    const Subset eprime = e & optima.front();
    const auto elems = e.elements();

    LinearProgram lp(std::vector<Rational>(elems.size(), Rational(1)));
    for (Subset f : e.subsets()) {
        const ExtendedValue v = oracle_detail::best_value(inst, e - f, f);
        if (v.is_infinite()) continue;
        std::vector<Rational> row(elems.size(), Rational(0));
        for (std::size_t i = 0; i < elems.size(); ++i)
            row[i] = Rational((eprime.contains(elems[i]) ? 1 : 0) -
                              (f.contains(elems[i]) ? 1 : 0));
        if (v == cstar)
            lp.add_constraint(std::move(row), Relation::Eq, ExtendedValue(0));
        else
            lp.add_constraint(std::move(row), Relation::Le, v - cstar);
    }
    const LpOutcome out = solve_lp(lp);
    if (out.status == LpStatus::Unbounded) return ExtendedValue::infinity();

    // Certify: under the increased costs every originally optimal solution
    // is still no worse than any listed solution.
    std::vector<Rational> costs = inst.costs();
    for (std::size_t i = 0; i < elems.size(); ++i) costs[elems[i]] += (*out.witness)[i];
    auto perturbed_cost = [&](Subset s) {
        Rational c = 0;
        for (std::size_t i : s.elements()) c += costs[i];
        return c;
    };
    for (Subset opt : optima)
        for (Subset s : inst.solutions())
            if (perturbed_cost(opt) > perturbed_cost(s))
                throw internal_error("oracle upper witness failed re-evaluation");
    return out.value;
}

/// Reproducible random explicit instance: 2..max_m elements, integer costs in
/// [cost_min, cost_max], a nonempty duplicate-free solution family.
inline ExplicitCsp random_explicit_csp(Rng& rng, std::size_t max_m, const OracleConfig& cfg = {}) {
    const std::size_t m = 2 + rng.below(max_m - 1);
    std::vector<Rational> costs;
    costs.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
        costs.emplace_back(rng.between(cfg.cost_min, cfg.cost_max));
    const std::size_t want = 1 + rng.below(std::min<std::size_t>(10, (1u << m) - 1));
    std::set<Subset> sols;
    while (sols.size() < want) {
        Subset s;
        for (std::size_t i = 0; i < m; ++i)
            if (rng.coin()) s = s.with(i);
        if (!s.empty()) sols.insert(s);
    }
    return ExplicitCsp({}, std::move(costs),
                       std::vector<Subset>(sols.begin(), sols.end()));
}

/// Reproducible random connected graph: a random attachment tree plus a few
/// extra edges (parallels allowed), integer costs.
inline Graph random_connected_graph(Rng& rng, std::size_t max_n, const OracleConfig& cfg = {}) {
    const std::size_t n = 2 + rng.below(max_n - 1);
    std::vector<std::tuple<std::size_t, std::size_t, Rational>> edges;
    for (std::size_t v = 1; v < n; ++v)
        edges.emplace_back(rng.below(v), v, Rational(rng.between(cfg.cost_min, cfg.cost_max)));
    const std::size_t extra = rng.below(n);
    for (std::size_t i = 0; i < extra && edges.size() < Subset::max_elements; ++i) {
        const std::size_t u = rng.below(n);
        std::size_t v = rng.below(n);
        if (u == v) continue;
        edges.emplace_back(u, v, Rational(rng.between(cfg.cost_min, cfg.cost_max)));
    }
    return Graph(n, std::move(edges));
}

/// True iff decreasing costs over E by alpha leaves the optimum exactly at
/// the original value.
inline bool certify_lower_witness(const CspInstance& inst, Subset e,
                                  const std::vector<Rational>& alpha) {
    const auto elems = e.elements();
    if (alpha.size() != elems.size()) throw usage_error("witness length mismatch");
    const ExtendedValue cstar = inst.solve(Subset(), Subset()).value;
    std::vector<Rational> costs = inst.costs();
    for (std::size_t i = 0; i < elems.size(); ++i) costs[elems[i]] -= alpha[i];
    const auto modified = inst.with_costs(std::move(costs));
    return modified->solve(Subset(), Subset()).value == cstar;
}

/// True iff bumping any single coordinate of alpha by eps pushes the modified
/// optimum strictly below the original value (the witness sits at a maximum).
inline bool lower_witness_is_maximal(const CspInstance& inst, Subset e,
                                     const std::vector<Rational>& alpha, const Rational& eps) {
    const auto elems = e.elements();
    if (alpha.size() != elems.size()) throw usage_error("witness length mismatch");
    const ExtendedValue cstar = inst.solve(Subset(), Subset()).value;
    for (std::size_t bump = 0; bump < elems.size(); ++bump) {
        std::vector<Rational> costs = inst.costs();
        for (std::size_t i = 0; i < elems.size(); ++i) costs[elems[i]] -= alpha[i];
        costs[elems[bump]] -= eps;
        const auto modified = inst.with_costs(std::move(costs));
        if (modified->solve(Subset(), Subset()).value >= cstar) return false;
    }
    return true;
}

/// True iff increasing costs over E by alpha keeps every originally optimal
/// solution optimal.
inline bool certify_upper_witness(const ExplicitCsp& inst, Subset e,
                                  const std::vector<Rational>& alpha) {
    const auto elems = e.elements();
    if (alpha.size() != elems.size()) throw usage_error("witness length mismatch");
    const auto optima = oracle_detail::optimal_solutions(inst);
    std::vector<Rational> costs = inst.costs();
    for (std::size_t i = 0; i < elems.size(); ++i) costs[elems[i]] += alpha[i];
    auto cost_of = [&](Subset s) {
        Rational c = 0;
        for (std::size_t i : s.elements()) c += costs[i];
        return c;
    };
    ExtendedValue best = ExtendedValue::infinity();
    for (Subset s : inst.solutions()) best = min(best, ExtendedValue(cost_of(s)));
    for (Subset opt : optima)
        if (ExtendedValue(cost_of(opt)) != best) return false;
    return true;
}

/// True iff bumping any single coordinate of alpha by eps displaces some
/// originally optimal solution.
inline bool upper_witness_is_maximal(const ExplicitCsp& inst, Subset e,
                                     const std::vector<Rational>& alpha, const Rational& eps) {
    const auto elems = e.elements();
    for (std::size_t bump = 0; bump < elems.size(); ++bump) {
        std::vector<Rational> bumped = alpha;
        bumped[bump] += eps;
        if (certify_upper_witness(inst, e, bumped)) return false;
    }
    return true;
}

} // namespace settol
