#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "settol/errors.hpp"
#include "settol/rational.hpp"
#include "settol/subset.hpp"

namespace settol {

struct SolveResult {
    ExtendedValue value;
    std::optional<Subset> witness; // present iff value is finite
};

using CostOverrides = std::unordered_map<std::size_t, Rational>;

/// A combinatorial sum-minimization instance: a ground set with exact costs
/// and a constrained-solve capability. solve(X, I) returns the cheapest
/// feasible solution disjoint from X and containing I, or +inf if none
/// exists. Instances are immutable; the only mutable state is an atomic
/// counter of constrained solves, reset per computation.
class CspInstance {
public:
    virtual ~CspInstance() = default;

    std::size_t ground_size() const { return costs_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }

    const std::string& label(std::size_t index) const {
        check_element(index);
        return labels_[index];
    }

    const Rational& cost(std::size_t index) const {
        check_element(index);
        return costs_[index];
    }

    const std::vector<Rational>& costs() const { return costs_; }

    std::optional<std::size_t> index_of(std::string_view label) const {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == label) return i;
        return std::nullopt;
    }

    Subset full_set() const { return Subset::full(ground_size()); }

    /// Constrained solve. Rejects overlapping or out-of-range arguments and
    /// increments the solve counter on every accepted call.
    SolveResult solve(Subset exclude, Subset include) const {
        check_subset(exclude);
        check_subset(include);
        if (exclude.intersects(include))
            throw usage_error("exclude and include sets overlap");
        solves_.fetch_add(1, std::memory_order_relaxed);
        return solve_impl(exclude, include);
    }

    ExtendedValue objective_of(Subset s) const {
        check_subset(s);
        Rational total = 0;
        for (std::size_t i : s.elements()) total += costs_[i];
        return ExtendedValue(std::move(total));
    }

    /// Objective under explicitly overridden costs; pure, no counter effect.
    ExtendedValue objective_of(Subset s, const CostOverrides& overrides) const {
        check_subset(s);
        Rational total = 0;
        for (std::size_t i : s.elements()) {
            auto it = overrides.find(i);
            total += (it != overrides.end()) ? it->second : costs_[i];
        }
        return ExtendedValue(std::move(total));
    }

    std::uint64_t solve_count() const { return solves_.load(std::memory_order_relaxed); }
    void reset_solve_count() const { solves_.store(0, std::memory_order_relaxed); }

    /// A copy of this instance with replaced costs (same feasible set).
    virtual std::unique_ptr<CspInstance> with_costs(std::vector<Rational> costs) const = 0;

protected:
    // copies are fresh computations: the counter restarts at zero
    CspInstance(const CspInstance& o) : labels_(o.labels_), costs_(o.costs_) {}
    CspInstance(CspInstance&& o) noexcept
        : labels_(std::move(o.labels_)), costs_(std::move(o.costs_)) {}
    CspInstance& operator=(const CspInstance& o) {
        labels_ = o.labels_;
        costs_ = o.costs_;
        return *this;
    }
    CspInstance& operator=(CspInstance&& o) noexcept {
        labels_ = std::move(o.labels_);
        costs_ = std::move(o.costs_);
        return *this;
    }

    CspInstance(std::vector<std::string> labels, std::vector<Rational> costs)
        : labels_(std::move(labels)), costs_(std::move(costs)) {
        if (costs_.size() > Subset::max_elements)
            throw usage_error("ground set larger than 64 elements");
        if (labels_.empty()) {
            labels_.reserve(costs_.size());
            for (std::size_t i = 0; i < costs_.size(); ++i)
                labels_.push_back("e" + std::to_string(i));
        }
        if (labels_.size() != costs_.size())
            throw usage_error("label/cost count mismatch");
        std::set<std::string> seen(labels_.begin(), labels_.end());
        if (seen.size() != labels_.size())
            throw usage_error("duplicate element labels");
    }

    virtual SolveResult solve_impl(Subset exclude, Subset include) const = 0;

    void check_element(std::size_t index) const {
        if (index >= ground_size()) throw usage_error("element index out of range");
    }

    void check_subset(Subset s) const {
        if (!s.is_subset_of(full_set()))
            throw usage_error("subset contains indices outside the ground set");
    }

private:
    std::vector<std::string> labels_;
    std::vector<Rational> costs_;
    mutable std::atomic<std::uint64_t> solves_{0};
};

/// Instance backed by an explicit, duplicate-free list of feasible solutions.
/// Constrained solves scan the list; ties break toward the smaller bitmask so
/// witnesses are deterministic.
class ExplicitCsp final : public CspInstance {
public:
    ExplicitCsp(std::vector<std::string> labels, std::vector<Rational> costs,
                std::vector<Subset> solutions)
        : CspInstance(std::move(labels), std::move(costs)), solutions_(std::move(solutions)) {
        if (solutions_.empty())
            throw usage_error("solution list must be nonempty");
        std::set<Subset> seen;
        for (Subset s : solutions_) {
            if (s.empty()) throw usage_error("the empty set is not a feasible solution");
            if (!s.is_subset_of(full_set()))
                throw usage_error("solution references elements outside the ground set");
            if (!seen.insert(s).second) throw usage_error("duplicate solution in list");
        }
    }

    const std::vector<Subset>& solutions() const { return solutions_; }

    std::unique_ptr<CspInstance> with_costs(std::vector<Rational> costs) const override {
        return std::make_unique<ExplicitCsp>(labels(), std::move(costs), solutions_);
    }

    /// Reads `{"elements": [...], "costs": {label: "p/q"|int}, "solutions": [[labels]]}`.
    static ExplicitCsp from_json(const nlohmann::json& j) {
        try {
            std::vector<std::string> labels = j.at("elements").get<std::vector<std::string>>();
            std::vector<Rational> costs;
            costs.reserve(labels.size());
            const auto& jc = j.at("costs");
            for (const auto& lbl : labels) {
                const auto& v = jc.at(lbl);
                if (v.is_string())
                    costs.push_back(parse_rational(v.get<std::string>()));
                else if (v.is_number_integer())
                    costs.push_back(Rational(v.get<long long>()));
                else
                    throw io_error("cost for '" + lbl + "' must be an integer or \"p/q\" string");
            }
            std::vector<Subset> sols;
            for (const auto& js : j.at("solutions")) {
                Subset s;
                for (const auto& lbl : js) {
                    auto name = lbl.get<std::string>();
                    std::size_t idx = labels.size();
                    for (std::size_t i = 0; i < labels.size(); ++i)
                        if (labels[i] == name) { idx = i; break; }
                    if (idx == labels.size())
                        throw io_error("solution references unknown element '" + name + "'");
                    s = s.with(idx);
                }
                sols.push_back(s);
            }
            return ExplicitCsp(std::move(labels), std::move(costs), std::move(sols));
        } catch (const nlohmann::json::exception& e) {
            throw io_error(std::string("malformed explicit-CSP JSON: ") + e.what());
        } catch (const usage_error& e) {
            throw io_error(std::string("invalid explicit-CSP data: ") + e.what());
        }
    }

    static ExplicitCsp load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw io_error("cannot open '" + path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw io_error("cannot parse '" + path + "': " + e.what());
        }
        return from_json(j);
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["elements"] = labels();
        nlohmann::json jc = nlohmann::json::object();
        for (std::size_t i = 0; i < ground_size(); ++i)
            jc[label(i)] = to_string(cost(i));
        j["costs"] = jc;
        nlohmann::json js = nlohmann::json::array();
        for (Subset s : solutions_) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t i : s.elements()) row.push_back(label(i));
            js.push_back(row);
        }
        j["solutions"] = js;
        return j;
    }

private:
    SolveResult solve_impl(Subset exclude, Subset include) const override {
        std::optional<Subset> best;
        Rational best_cost;
        for (Subset s : solutions_) {
            if (s.intersects(exclude) || !include.is_subset_of(s)) continue;
            Rational c = objective_of(s).finite();
            if (!best || c < best_cost || (c == best_cost && s < *best)) {
                best = s;
                best_cost = std::move(c);
            }
        }
        if (!best) return {ExtendedValue::infinity(), std::nullopt};
        return {ExtendedValue(best_cost), best};
    }

    std::vector<Subset> solutions_;
};

} // namespace settol
