#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "settol/csp.hpp"
#include "settol/errors.hpp"
#include "settol/lp.hpp"
#include "settol/rational.hpp"
#include "settol/subset.hpp"

namespace settol {

enum class Method { SingleFormula, Eul, Ell, Ill, Tll, ClosedForm2, ClosedForm3, MstFormula };

inline std::string_view method_name(Method m) {
    switch (m) {
        case Method::SingleFormula: return "single";
        case Method::Eul: return "eul";
        case Method::Ell: return "ell";
        case Method::Ill: return "ill";
        case Method::Tll: return "tll";
        case Method::ClosedForm2: return "closed2";
        case Method::ClosedForm3: return "closed3";
        case Method::MstFormula: return "mst";
    }
    return "?";
}

/// Result of one tolerance computation. The witness, when present, lists one
/// cost change per element of E in ascending index order and sums to value.
struct ToleranceReport {
    ExtendedValue value;
    Method method = Method::SingleFormula;
    std::optional<std::vector<Rational>> witness;
    std::uint64_t solves_used = 0;
    std::string case_label; // closed forms only: which case fired
};

/// Cache of constrained-solve values around a computation: v(E, F) is the
/// cheapest solution avoiding E\F and containing F, include values are
/// v(F, F), and lower(F) memoizes finished lower tolerances so recursive
/// methods never recompute them.
class RestrictedValueTable {
public:
    explicit RestrictedValueTable(const CspInstance& inst) : inst_(&inst) {}

    const CspInstance& instance() const { return *inst_; }

    const ExtendedValue& cstar() { return include_value(Subset()); }

    /// An optimal solution of the unconstrained instance (deterministic).
    Subset optimal_witness() {
        cstar();
        if (!sstar_) throw internal_error("instance has no optimal solution");
        return *sstar_;
    }

    /// f_c of the best solution containing F.
    const ExtendedValue& include_value(Subset f) {
        auto it = dplus_.find(f);
        if (it != dplus_.end()) return it->second;
        SolveResult r = inst_->solve(Subset(), f);
        if (f.empty()) {
            if (r.value.is_infinite())
                throw internal_error("instance has an empty feasible set");
            sstar_ = r.witness;
        }
        check_at_least_cstar(r.value);
        return dplus_.emplace(f, std::move(r.value)).first->second;
    }

    /// f_c of the best solution avoiding E\F and containing F (F subset of E).
    const ExtendedValue& restricted(Subset e, Subset f) {
        if (!f.is_subset_of(e)) throw usage_error("F must be a subset of E");
        if (f == e) return include_value(f);
        auto key = std::make_pair(e.bits(), f.bits());
        auto it = values_.find(key);
        if (it != values_.end()) return it->second;
        SolveResult r = inst_->solve(e - f, f);
        check_at_least_cstar(r.value);
        return values_.emplace(key, std::move(r.value)).first->second;
    }

    /// Solves every v(E, F) for F subset of E; 2^|E| constrained solves on a
    /// cold cache.
    void fill(Subset e) {
        e.for_each_subset([&](Subset f) { restricted(e, f); });
    }

    bool has_lower(Subset f) const { return lower_.count(f) != 0; }

    const ExtendedValue& lower(Subset f) const {
        auto it = lower_.find(f);
        if (it == lower_.end()) throw internal_error("lower tolerance not memoized");
        return it->second;
    }

    void set_lower(Subset f, ExtendedValue v) { lower_.emplace(f, std::move(v)); }

    /// Publishes an include value computed outside the table (the stratum
    /// driver batches solves and commits them afterwards).
    void commit_include(Subset f, ExtendedValue v) { dplus_.emplace(f, std::move(v)); }

    const ExtendedValue* find_include(Subset f) const {
        auto it = dplus_.find(f);
        return it == dplus_.end() ? nullptr : &it->second;
    }

private:
    void check_at_least_cstar(const ExtendedValue& v) const {
        auto it = dplus_.find(Subset());
        if (it != dplus_.end() && v < it->second)
            throw internal_error("constrained value below the unconstrained optimum");
    }

    const CspInstance* inst_;
    std::map<std::pair<std::uint64_t, std::uint64_t>, ExtendedValue> values_;
    std::map<Subset, ExtendedValue> dplus_;
    std::map<Subset, ExtendedValue> lower_;
    std::optional<Subset> sstar_;
};

namespace detail {

inline void require_nonempty(Subset e) {
    if (e.empty()) throw usage_error("tolerance target set must be nonempty");
}

inline ToleranceReport finish_report(Method method, LpOutcome&& out, std::uint64_t solves,
                                     std::string case_label = {}) {
    ToleranceReport rep;
    rep.method = method;
    rep.solves_used = solves;
    rep.case_label = std::move(case_label);
    if (out.status == LpStatus::Unbounded) {
        rep.value = ExtendedValue::infinity();
        return rep;
    }
    rep.value = std::move(out.value);
    rep.witness = std::move(out.witness);
    if (rep.value < ExtendedValue(0))
        throw internal_error("negative tolerance value");
    if (rep.witness) {
        Rational sum = 0;
        for (const Rational& a : *rep.witness) {
            if (a < 0) throw internal_error("negative witness entry");
            sum += a;
        }
        if (ExtendedValue(sum) != rep.value)
            throw internal_error("witness does not sum to the tolerance value");
    }
    return rep;
}

/// Exact upper LP: equality rows tie the increase over E' = E ∩ S* to every
/// subset F that also attains the optimum; inequality rows keep S* no worse
/// than the best solution of each remaining F-class.
template <class ValueOf>
LinearProgram build_eul_lp(const std::vector<std::size_t>& elems, Subset eprime,
                           ValueOf&& value_of, const ExtendedValue& cstar, Subset e) {
    LinearProgram lp(std::vector<Rational>(elems.size(), Rational(1)));
    e.for_each_subset([&](Subset f) {
        const ExtendedValue& v = value_of(f);
        if (v.is_infinite()) return;
        std::vector<Rational> row(elems.size(), Rational(0));
        for (std::size_t i = 0; i < elems.size(); ++i) {
            if (eprime.contains(elems[i])) row[i] += 1;
            if (f.contains(elems[i])) row[i] -= 1;
        }
        if (v == cstar)
            lp.add_constraint(std::move(row), Relation::Eq, ExtendedValue(0));
        else
            lp.add_constraint(std::move(row), Relation::Le, v - cstar);
    });
    return lp;
}

/// Exact lower LP: the total decrease over each F stays within what the best
/// solution of that F-class can absorb. The trivially-true F = ∅ row is
/// dropped.
template <class ValueOf>
LinearProgram build_ell_lp(const std::vector<std::size_t>& elems, ValueOf&& value_of,
                           const ExtendedValue& cstar, Subset e) {
    LinearProgram lp(std::vector<Rational>(elems.size(), Rational(1)));
    e.for_each_subset([&](Subset f) {
        if (f.empty()) return;
        const ExtendedValue& v = value_of(f);
        std::vector<Rational> row(elems.size(), Rational(0));
        for (std::size_t i = 0; i < elems.size(); ++i)
            if (f.contains(elems[i])) row[i] = 1;
        lp.add_constraint(std::move(row), Relation::Le,
                          v.is_infinite() ? ExtendedValue::infinity() : v - cstar);
    });
    return lp;
}

/// Include lower LP: like the exact lower LP but with the cheaper-to-obtain
/// include values on the right-hand sides.
template <class IncludeOf>
LinearProgram build_ill_lp(const std::vector<std::size_t>& elems, IncludeOf&& include_of,
                           const ExtendedValue& cstar, Subset e) {
    LinearProgram lp(std::vector<Rational>(elems.size(), Rational(1)));
    e.for_each_subset([&](Subset f) {
        if (f.empty()) return;
        const ExtendedValue& v = include_of(f);
        std::vector<Rational> row(elems.size(), Rational(0));
        for (std::size_t i = 0; i < elems.size(); ++i)
            if (f.contains(elems[i])) row[i] = 1;
        lp.add_constraint(std::move(row), Relation::Le,
                          v.is_infinite() ? ExtendedValue::infinity() : v - cstar);
    });
    return lp;
}

/// Tolerance lower LP: one fresh include value for E itself plus memoized
/// lower tolerances of every proper nonempty subset.
template <class LowerOf>
LinearProgram build_tll_lp(const std::vector<std::size_t>& elems, const ExtendedValue& dplus_e,
                           LowerOf&& lower_of, const ExtendedValue& cstar, Subset e) {
    LinearProgram lp(std::vector<Rational>(elems.size(), Rational(1)));
    lp.add_constraint(std::vector<Rational>(elems.size(), Rational(1)), Relation::Le,
                      dplus_e.is_infinite() ? ExtendedValue::infinity() : dplus_e - cstar);
    e.for_each_subset([&](Subset f) {
        if (f.empty() || f == e) return;
        const ExtendedValue& lf = lower_of(f);
        std::vector<Rational> row(elems.size(), Rational(0));
        for (std::size_t i = 0; i < elems.size(); ++i)
            if (f.contains(elems[i])) row[i] = 1;
        lp.add_constraint(std::move(row), Relation::Le, lf);
    });
    return lp;
}

inline LpOutcome solve_or_internal(const LinearProgram& lp, const char* what) {
    try {
        return solve_lp(lp);
    } catch (const infeasible_error&) {
        throw internal_error(std::string(what) + ": constructed program is infeasible");
    }
}

} // namespace detail

/// Maximum increase of c(e) keeping every minimum-cost solution optimal:
/// finite exactly when e lies in some optimal solution.
inline ToleranceReport single_upper(const CspInstance& inst, std::size_t e) {
    const std::uint64_t before = inst.solve_count();
    RestrictedValueTable t(inst);
    const ExtendedValue cstar = t.cstar();
    const Subset se = Subset::single(e);
    ToleranceReport rep;
    rep.method = Method::SingleFormula;
    if (t.include_value(se) == cstar) {
        const ExtendedValue& dminus = t.restricted(se, Subset());
        rep.value = dminus.is_infinite() ? ExtendedValue::infinity() : dminus - cstar;
    } else {
        rep.value = ExtendedValue::infinity();
    }
    if (rep.value.is_finite()) rep.witness = std::vector<Rational>{rep.value.finite()};
    rep.solves_used = inst.solve_count() - before;
    return rep;
}

/// Maximum decrease of c(e) keeping the optimal value unchanged: the include
/// value of e minus the optimum, +inf iff e lies in no feasible solution.
inline ToleranceReport single_lower(const CspInstance& inst, std::size_t e) {
    const std::uint64_t before = inst.solve_count();
    RestrictedValueTable t(inst);
    const ExtendedValue cstar = t.cstar();
    const ExtendedValue& dplus = t.include_value(Subset::single(e));
    ToleranceReport rep;
    rep.method = Method::SingleFormula;
    rep.value = dplus.is_infinite() ? ExtendedValue::infinity() : dplus - cstar;
    if (rep.value.is_finite()) rep.witness = std::vector<Rational>{rep.value.finite()};
    rep.solves_used = inst.solve_count() - before;
    return rep;
}

/// Table of v(E, F) for every F subset of E; 2^|E| counted solves.
inline RestrictedValueTable restricted_values(const CspInstance& inst, Subset e) {
    detail::require_nonempty(e);
    RestrictedValueTable t(inst);
    t.fill(e);
    return t;
}

/// Set upper tolerance of E via the exact upper LP.
inline ToleranceReport set_upper_eul(const CspInstance& inst, Subset e) {
    detail::require_nonempty(e);
    const std::uint64_t before = inst.solve_count();
    RestrictedValueTable t(inst);
    const ExtendedValue cstar = t.cstar();
    const Subset eprime = e & t.optimal_witness();
    t.fill(e);
    const auto elems = e.elements();
    LinearProgram lp = detail::build_eul_lp(
        elems, eprime, [&](Subset f) -> const ExtendedValue& { return t.restricted(e, f); },
        cstar, e);
    return detail::finish_report(Method::Eul, detail::solve_or_internal(lp, "set_upper_eul"),
                                 inst.solve_count() - before);
}

/// Set lower tolerance of E via the exact lower LP.
inline ToleranceReport set_lower_ell(const CspInstance& inst, Subset e) {
    detail::require_nonempty(e);
    const std::uint64_t before = inst.solve_count();
    RestrictedValueTable t(inst);
    const ExtendedValue cstar = t.cstar();
    t.fill(e);
    const auto elems = e.elements();
    LinearProgram lp = detail::build_ell_lp(
        elems, [&](Subset f) -> const ExtendedValue& { return t.restricted(e, f); }, cstar, e);
    return detail::finish_report(Method::Ell, detail::solve_or_internal(lp, "set_lower_ell"),
                                 inst.solve_count() - before);
}

/// Set lower tolerance of E via the include lower LP. With a warm memo the
/// only fresh solve is the include value of E itself.
inline ToleranceReport set_lower_ill(const CspInstance& inst, Subset e,
                                     RestrictedValueTable* memo = nullptr) {
    detail::require_nonempty(e);
    const std::uint64_t before = inst.solve_count();
    RestrictedValueTable local(inst);
    RestrictedValueTable& t = memo ? *memo : local;
    const ExtendedValue cstar = t.cstar();
    const auto elems = e.elements();
    LinearProgram lp = detail::build_ill_lp(
        elems, [&](Subset f) -> const ExtendedValue& { return t.include_value(f); }, cstar, e);
    return detail::finish_report(Method::Ill, detail::solve_or_internal(lp, "set_lower_ill"),
                                 inst.solve_count() - before);
}

namespace detail {

/// Lower tolerance of f via the tolerance lower LP, memoizing every proper
/// subset first (each value is computed exactly once per table).
inline const ExtendedValue& ensure_lower_tll(RestrictedValueTable& t, Subset f) {
    if (t.has_lower(f)) return t.lower(f);
    require_nonempty(f);
    f.for_each_subset([&](Subset g) {
        if (!g.empty() && g != f && !t.has_lower(g)) ensure_lower_tll(t, g);
    });
    const ExtendedValue cstar = t.cstar();
    const ExtendedValue dplus_f = t.include_value(f);
    const auto elems = f.elements();
    LinearProgram lp = build_tll_lp(
        elems, dplus_f, [&](Subset g) -> const ExtendedValue& { return t.lower(g); }, cstar, f);
    LpOutcome out = solve_or_internal(lp, "set_lower_tll");
    t.set_lower(f, out.status == LpStatus::Unbounded ? ExtendedValue::infinity() : out.value);
    return t.lower(f);
}

} // namespace detail

/// Set lower tolerance of E via the tolerance lower LP. Missing memo entries
/// for proper subsets are computed recursively, never guessed.
inline ToleranceReport set_lower_tll(const CspInstance& inst, Subset e,
                                     RestrictedValueTable* memo = nullptr) {
    detail::require_nonempty(e);
    const std::uint64_t before = inst.solve_count();
    RestrictedValueTable local(inst);
    RestrictedValueTable& t = memo ? *memo : local;
    const ExtendedValue cstar = t.cstar();
    e.for_each_subset([&](Subset g) {
        if (!g.empty() && g != e && !t.has_lower(g)) detail::ensure_lower_tll(t, g);
    });
    const ExtendedValue dplus_e = t.include_value(e);
    const auto elems = e.elements();
    LinearProgram lp = detail::build_tll_lp(
        elems, dplus_e, [&](Subset g) -> const ExtendedValue& { return t.lower(g); }, cstar, e);
    ToleranceReport rep =
        detail::finish_report(Method::Tll, detail::solve_or_internal(lp, "set_lower_tll"),
                              inst.solve_count() - before);
    if (!t.has_lower(e)) t.set_lower(e, rep.value);
    return rep;
}

enum class LowerMethod { Ill, Tll, EllNaive };

struct AllSubsetsOptions {
    std::size_t cap = 12;
    unsigned jobs = 1;
};

/// Lower tolerances for every nonempty subset of the ground set, in
/// (cardinality, mask) order. The recursive ILL/TLL drivers spend one fresh
/// constrained solve per subset (2^m total including the initial optimum);
/// the naive ELL driver rebuilds its value table per subset (3^m total).
/// With jobs > 1, subsets within one cardinality stratum are evaluated in
/// parallel; results are identical to the sequential run.
inline std::map<Subset, ToleranceReport> all_subsets_lower(const CspInstance& inst,
                                                           LowerMethod method,
                                                           AllSubsetsOptions opt = {}) {
    const std::size_t m = inst.ground_size();
    if (m > opt.cap)
        throw usage_error("ground set of " + std::to_string(m) + " elements exceeds cap " +
                          std::to_string(opt.cap) + "; full run would need " +
                          ExtendedValue(Rational(BigInt(1) << m)).str() + " constrained solves");
    inst.reset_solve_count();

    std::vector<Subset> order;
    order.reserve((std::size_t{1} << m) - 1);
    inst.full_set().for_each_subset([&](Subset s) {
        if (!s.empty()) order.push_back(s);
    });
    std::stable_sort(order.begin(), order.end(),
                     [](Subset a, Subset b) { return a.size() < b.size(); });

    std::map<Subset, ToleranceReport> out;

    if (method == LowerMethod::EllNaive) {
        SolveResult base = inst.solve(Subset(), Subset());
        const ExtendedValue cstar = base.value;
        for (Subset e : order) {
            const std::uint64_t before = inst.solve_count();
            std::map<Subset, ExtendedValue> values;
            e.for_each_subset(
                [&](Subset f) { values.emplace(f, inst.solve(e - f, f).value); });
            LinearProgram lp = detail::build_ell_lp(
                e.elements(), [&](Subset f) -> const ExtendedValue& { return values.at(f); },
                cstar, e);
            out.emplace(e, detail::finish_report(
                               Method::Ell, detail::solve_or_internal(lp, "all_subsets_lower"),
                               inst.solve_count() - before));
        }
        return out;
    }

    RestrictedValueTable t(inst);
    const ExtendedValue cstar = t.cstar();
    const Method tag = method == LowerMethod::Ill ? Method::Ill : Method::Tll;

    auto compute_one = [&](Subset e, const ExtendedValue& dplus_e) {
        const auto elems = e.elements();
        LinearProgram lp =
            method == LowerMethod::Ill
                ? detail::build_ill_lp(
                      elems,
                      [&](Subset f) -> const ExtendedValue& {
                          if (f == e) return dplus_e;
                          const ExtendedValue* v = t.find_include(f);
                          if (!v) throw internal_error("include value missing from memo");
                          return *v;
                      },
                      cstar, e)
                : detail::build_tll_lp(
                      elems, dplus_e, [&](Subset f) -> const ExtendedValue& { return t.lower(f); },
                      cstar, e);
        return detail::solve_or_internal(lp, "all_subsets_lower");
    };

    std::size_t begin = 0;
    while (begin < order.size()) {
        std::size_t end = begin;
        while (end < order.size() && order[end].size() == order[begin].size()) ++end;
        const std::size_t width = end - begin;
        std::vector<std::pair<ExtendedValue, LpOutcome>> results(width);
        const unsigned jobs =
            std::max<unsigned>(1, std::min<unsigned>(opt.jobs, static_cast<unsigned>(width)));
        auto worker = [&](unsigned id) {
            for (std::size_t idx = id; idx < width; idx += jobs) {
                Subset e = order[begin + idx];
                ExtendedValue dplus_e = inst.solve(Subset(), e).value;
                results[idx] = {dplus_e, compute_one(e, dplus_e)};
            }
        };
        if (jobs == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(jobs);
            pool.reserve(jobs);
            for (unsigned id = 0; id < jobs; ++id)
                pool.emplace_back([&, id] {
                    try {
                        worker(id);
                    } catch (...) {
                        errors[id] = std::current_exception();
                    }
                });
            for (auto& th : pool) th.join();
            for (const auto& e : errors)
                if (e) std::rethrow_exception(e);
        }
        for (std::size_t idx = 0; idx < width; ++idx) {
            Subset e = order[begin + idx];
            t.commit_include(e, results[idx].first);
            ToleranceReport rep = detail::finish_report(tag, std::move(results[idx].second), 1);
            t.set_lower(e, rep.value);
            out.emplace(e, std::move(rep));
        }
        begin = end;
    }
    return out;
}

struct BoundsQuery {
    std::optional<std::size_t> binomial_s;
    std::optional<std::vector<Subset>> partition;
};

/// Provable bounds on the set tolerances of E, none of which require the
/// tolerance of E itself.
struct BoundsReport {
    ExtendedValue max_single_lower;                 // <= lower tolerance
    ExtendedValue sum_single_lower;                 // >= lower tolerance
    ExtendedValue min_cost_bound;                   // >= lower tolerance
    std::optional<ExtendedValue> binomial_bound;    // >= lower tolerance
    std::optional<ExtendedValue> partition_bound;   // >= lower tolerance
    ExtendedValue max_single_upper;                 // <= upper tolerance
    std::uint64_t solves_used = 0;
};

inline BoundsReport bounds_report(const CspInstance& inst, Subset e, const BoundsQuery& q = {}) {
    detail::require_nonempty(e);
    const std::uint64_t before = inst.solve_count();
    RestrictedValueTable t(inst);
    const ExtendedValue cstar = t.cstar();
    const auto elems = e.elements();
    const std::size_t k = elems.size();

    BoundsReport rep;
    rep.max_single_lower = ExtendedValue(0);
    rep.sum_single_lower = ExtendedValue(0);
    rep.max_single_upper = ExtendedValue(0);
    for (std::size_t idx : elems) {
        const Subset se = Subset::single(idx);
        const ExtendedValue& dplus = t.include_value(se);
        const ExtendedValue low =
            dplus.is_infinite() ? ExtendedValue::infinity() : dplus - cstar;
        rep.max_single_lower = max(rep.max_single_lower, low);
        rep.sum_single_lower += low;
        ExtendedValue up = ExtendedValue::infinity();
        if (dplus == cstar) {
            const ExtendedValue& dminus = t.restricted(se, Subset());
            up = dminus.is_infinite() ? ExtendedValue::infinity() : dminus - cstar;
        }
        rep.max_single_upper = max(rep.max_single_upper, up);
    }

    const ExtendedValue& dplus_e = t.include_value(e);
    rep.min_cost_bound = dplus_e.is_infinite() ? ExtendedValue::infinity() : dplus_e - cstar;

    if (q.binomial_s) {
        const std::size_t s = *q.binomial_s;
        if (s < 1 || s >= k)
            throw usage_error("binomial bound cardinality must lie in [1, |E|-1]");
        ExtendedValue total(0);
        e.for_each_subset([&](Subset f) {
            if (f.size() == s) total += detail::ensure_lower_tll(t, f);
        });
        // Each element of E appears in C(k-1, s-1) of the summed subsets.
        BigInt coeff = 1;
        for (std::size_t i = 0; i < s - 1; ++i) {
            coeff *= BigInt(k - 1 - i);
            coeff /= BigInt(i + 1);
        }
        rep.binomial_bound = total.is_infinite()
                                 ? ExtendedValue::infinity()
                                 : total.scaled(Rational(BigInt(1), coeff));
    }

    if (q.partition) {
        Subset covered;
        for (Subset block : *q.partition) {
            if (block.empty()) throw usage_error("partition blocks must be nonempty");
            if (!block.is_subset_of(e) || covered.intersects(block))
                throw usage_error("blocks must partition E");
            if (block == e)
                throw usage_error("the single-block partition is not a usable bound");
            covered = covered | block;
        }
        if (covered != e) throw usage_error("blocks must partition E");
        ExtendedValue total(0);
        for (Subset block : *q.partition) total += detail::ensure_lower_tll(t, block);
        rep.partition_bound = total;
    }

    rep.solves_used = inst.solve_count() - before;
    return rep;
}

namespace detail {

struct ClosedFormContext {
    RestrictedValueTable& t;
    ExtendedValue cstar;

    ExtendedValue minus_cstar(const ExtendedValue& v) const {
        return v.is_infinite() ? ExtendedValue::infinity() : v - cstar;
    }

    ExtendedValue single_upper_value(std::size_t e) {
        const Subset se = Subset::single(e);
        if (t.include_value(se) != cstar) return ExtendedValue::infinity();
        return minus_cstar(t.restricted(se, Subset()));
    }

    ExtendedValue single_lower_value(std::size_t e) {
        return minus_cstar(t.include_value(Subset::single(e)));
    }
};

inline ExtendedValue closed_upper_2_value(ClosedFormContext& ctx, Subset e, std::string& label) {
    const auto el = e.elements();
    const Subset s1 = Subset::single(el[0]);
    const Subset s2 = Subset::single(el[1]);
    if (ctx.t.include_value(e) == ctx.cstar) {
        label = "a";
        const ExtendedValue sum = ctx.single_upper_value(el[0]) + ctx.single_upper_value(el[1]);
        return min(sum, ctx.minus_cstar(ctx.t.restricted(e, Subset())));
    }
    if (ctx.t.restricted(e, s2) == ctx.cstar && ctx.t.restricted(e, s1) == ctx.cstar) {
        label = "b";
        return ctx.minus_cstar(ctx.t.restricted(e, Subset())).scaled(2);
    }
    label = "c";
    return ExtendedValue::infinity();
}

inline ExtendedValue closed_lower_2_value(ClosedFormContext& ctx, Subset e) {
    const auto el = e.elements();
    const ExtendedValue sum = ctx.single_lower_value(el[0]) + ctx.single_lower_value(el[1]);
    return min(sum, ctx.minus_cstar(ctx.t.include_value(e)));
}

} // namespace detail

/// Closed form for the set upper tolerance of a two-element set.
inline ToleranceReport closed_upper_2(const CspInstance& inst, Subset e) {
    if (e.size() != 2) throw usage_error("closed_upper_2 requires |E| = 2");
    const std::uint64_t before = inst.solve_count();
    RestrictedValueTable t(inst);
    detail::ClosedFormContext ctx{t, t.cstar()};
    ToleranceReport rep;
    rep.method = Method::ClosedForm2;
    rep.value = detail::closed_upper_2_value(ctx, e, rep.case_label);
    rep.solves_used = inst.solve_count() - before;
    return rep;
}

/// Closed form for the set upper tolerance of a three-element set. The case
/// guards are evaluated in order with exact comparisons; when several
/// permutations satisfy a guard their values must agree, otherwise this
/// throws a diagnostic.
inline ToleranceReport closed_upper_3(const CspInstance& inst, Subset e) {
    if (e.size() != 3) throw usage_error("closed_upper_3 requires |E| = 3");
    const std::uint64_t before = inst.solve_count();
    RestrictedValueTable t(inst);
    detail::ClosedFormContext ctx{t, t.cstar()};
    const auto el = e.elements();
    const ExtendedValue& cstar = ctx.cstar;

    // excl[i]: best solution avoiding el[i] and containing the other two;
    // incl[i]: best solution containing el[i] and avoiding the other two.
    ExtendedValue excl[3], incl[3];
    for (int i = 0; i < 3; ++i) {
        const Subset si = Subset::single(el[static_cast<std::size_t>(i)]);
        excl[i] = t.restricted(e, e - si);
        incl[i] = t.restricted(e, si);
    }
    const ExtendedValue dminus = ctx.minus_cstar(t.restricted(e, Subset()));

    ToleranceReport rep;
    rep.method = Method::ClosedForm3;
    auto done = [&](ExtendedValue v, const char* label) {
        rep.value = std::move(v);
        rep.case_label = label;
        rep.solves_used = inst.solve_count() - before;
        return rep;
    };

    if (t.include_value(e) == cstar) {
        std::string ignored;
        const ExtendedValue u12 = detail::closed_upper_2_value(ctx, e - Subset::single(el[2]), ignored);
        const ExtendedValue u13 = detail::closed_upper_2_value(ctx, e - Subset::single(el[1]), ignored);
        const ExtendedValue u23 = detail::closed_upper_2_value(ctx, e - Subset::single(el[0]), ignored);
        ExtendedValue best = dminus;
        best = min(best, ctx.single_upper_value(el[0]) + u23);
        best = min(best, ctx.single_upper_value(el[1]) + u13);
        best = min(best, ctx.single_upper_value(el[2]) + u12);
        best = min(best, (u12 + u13 + u23).scaled(Rational(1, 2)));
        return done(best, "a");
    }

    if (excl[0] == cstar && excl[1] == cstar && excl[2] == cstar) {
        ExtendedValue best = dminus.scaled(Rational(3, 2));
        for (int i = 0; i < 3; ++i) best = min(best, ctx.minus_cstar(incl[i]).scaled(3));
        return done(best, "b");
    }

    {
        std::optional<ExtendedValue> value;
        for (int i1 = 0; i1 < 3; ++i1) {
            const int j = (i1 + 1) % 3, k = (i1 + 2) % 3;
            if (excl[j] != cstar || excl[k] != cstar) continue;
            const ExtendedValue y1 = ctx.minus_cstar(incl[i1]);
            ExtendedValue cand = ctx.minus_cstar(excl[i1]) + y1.scaled(3);
            cand = min(cand, ctx.minus_cstar(incl[j]) + y1.scaled(2));
            cand = min(cand, ctx.minus_cstar(incl[k]) + y1.scaled(2));
            cand = min(cand, y1 + dminus);
            cand = min(cand, dminus.scaled(2));
            if (value && *value != cand)
                throw internal_error("closed_upper_3: permutations of one case disagree (" +
                                     value->str() + " vs " + cand.str() + ")");
            value = std::move(cand);
        }
        if (value) return done(*value, "c");
    }

    {
        std::optional<ExtendedValue> value;
        for (int i3 = 0; i3 < 3; ++i3) {
            if (excl[i3] != cstar || incl[i3] != cstar) continue;
            const int j = (i3 + 1) % 3, k = (i3 + 2) % 3;
            ExtendedValue cand = (ctx.minus_cstar(incl[j]) + ctx.minus_cstar(incl[k])).scaled(2);
            cand = min(cand, dminus.scaled(2));
            if (value && *value != cand)
                throw internal_error("closed_upper_3: permutations of one case disagree (" +
                                     value->str() + " vs " + cand.str() + ")");
            value = std::move(cand);
        }
        if (value) return done(*value, "d");
    }

    if (incl[0] == cstar && incl[1] == cstar && incl[2] == cstar)
        return done(dminus.scaled(3), "e");

    return done(ExtendedValue::infinity(), "f");
}

/// Closed form for the set lower tolerance of a two-element set.
inline ToleranceReport closed_lower_2(const CspInstance& inst, Subset e) {
    if (e.size() != 2) throw usage_error("closed_lower_2 requires |E| = 2");
    const std::uint64_t before = inst.solve_count();
    RestrictedValueTable t(inst);
    detail::ClosedFormContext ctx{t, t.cstar()};
    ToleranceReport rep;
    rep.method = Method::ClosedForm2;
    rep.value = detail::closed_lower_2_value(ctx, e);
    rep.solves_used = inst.solve_count() - before;
    return rep;
}

/// Closed form for the set lower tolerance of a three-element set.
inline ToleranceReport closed_lower_3(const CspInstance& inst, Subset e) {
    if (e.size() != 3) throw usage_error("closed_lower_3 requires |E| = 3");
    const std::uint64_t before = inst.solve_count();
    RestrictedValueTable t(inst);
    detail::ClosedFormContext ctx{t, t.cstar()};
    const auto el = e.elements();
    const ExtendedValue l12 = detail::closed_lower_2_value(ctx, e - Subset::single(el[2]));
    const ExtendedValue l13 = detail::closed_lower_2_value(ctx, e - Subset::single(el[1]));
    const ExtendedValue l23 = detail::closed_lower_2_value(ctx, e - Subset::single(el[0]));
    ExtendedValue best = ctx.minus_cstar(t.include_value(e));
    best = min(best, ctx.single_lower_value(el[0]) + l23);
    best = min(best, ctx.single_lower_value(el[1]) + l13);
    best = min(best, ctx.single_lower_value(el[2]) + l12);
    best = min(best, (l12 + l13 + l23).scaled(Rational(1, 2)));
    ToleranceReport rep;
    rep.method = Method::ClosedForm3;
    rep.value = std::move(best);
    rep.solves_used = inst.solve_count() - before;
    return rep;
}

} // namespace settol
