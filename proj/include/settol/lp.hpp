#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "settol/errors.hpp"
#include "settol/rational.hpp"

namespace settol {

enum class Relation { Eq, Le };

struct LpConstraint {
    std::vector<Rational> coeffs;
    Relation rel;
    Rational rhs;
};

/// Maximization program over nonnegative variables with exact-rational data.
/// Constraints whose right-hand side is +inf impose nothing and are dropped
/// at construction time.
class LinearProgram {
public:
    explicit LinearProgram(std::vector<Rational> objective)
        : objective_(std::move(objective)) {}

    void add_constraint(std::vector<Rational> coeffs, Relation rel, const ExtendedValue& rhs) {
        if (coeffs.size() != objective_.size())
            throw usage_error("constraint width does not match variable count");
        if (rhs.is_infinite()) {
            ++dropped_;
            return;
        }
        rows_.push_back({std::move(coeffs), rel, rhs.finite()});
    }

    std::size_t variable_count() const { return objective_.size(); }
    const std::vector<Rational>& objective() const { return objective_; }
    const std::vector<LpConstraint>& constraints() const { return rows_; }
    std::size_t dropped_constraints() const { return dropped_; }

private:
    std::vector<Rational> objective_;
    std::vector<LpConstraint> rows_;
    std::size_t dropped_ = 0;
};

enum class LpStatus { Optimal, Unbounded };

struct LpOutcome {
    LpStatus status;
    ExtendedValue value;                          // +inf iff Unbounded
    std::optional<std::vector<Rational>> witness; // present iff Optimal
};

/// True iff the point satisfies every retained constraint exactly, including
/// the implicit nonnegativity bounds.
inline bool check_feasible(const LinearProgram& lp, std::span<const Rational> point) {
    if (point.size() != lp.variable_count())
        throw usage_error("point length does not match variable count");
    for (const Rational& x : point)
        if (x < 0) return false;
    for (const auto& row : lp.constraints()) {
        Rational lhs = 0;
        for (std::size_t j = 0; j < point.size(); ++j) lhs += row.coeffs[j] * point[j];
        if (row.rel == Relation::Eq ? lhs != row.rhs : lhs > row.rhs) return false;
    }
    return true;
}

namespace detail {

struct Tableau {
    std::vector<std::vector<Rational>> a; // m x ncols
    std::vector<Rational> b;              // m, kept nonnegative
    std::vector<std::size_t> basis;       // m basic column indices

    void pivot(std::size_t row, std::size_t col) {
        const Rational p = a[row][col];
        for (auto& v : a[row]) v /= p;
        b[row] /= p;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == row || a[i][col] == 0) continue;
            const Rational f = a[i][col];
            for (std::size_t j = 0; j < a[i].size(); ++j) a[i][j] -= f * a[row][j];
            b[i] -= f * b[row];
        }
        basis[row] = col;
    }

    void dump(std::ostream& os, const char* tag) const {
        os << "[lp] " << tag << " (" << a.size() << " rows)\n";
        for (std::size_t i = 0; i < a.size(); ++i) {
            os << "[lp]  x" << basis[i] << " |";
            for (const auto& v : a[i]) os << ' ' << to_string(v);
            os << " | " << to_string(b[i]) << '\n';
        }
    }
};

/// Bland's rule: entering column is the lowest index with positive reduced
/// cost, leaving row breaks ratio ties toward the lowest basic index. This
/// cannot cycle, so the loop always terminates.
inline LpStatus bland_simplex(Tableau& t, const std::vector<Rational>& cost,
                              const std::vector<bool>& allowed, std::ostream* trace) {
    const std::size_t m = t.a.size();
    const std::size_t ncols = cost.size();
    for (;;) {
        std::vector<const Rational*> cb(m);
        for (std::size_t i = 0; i < m; ++i) cb[i] = &cost[t.basis[i]];
        std::size_t enter = ncols;
        for (std::size_t j = 0; j < ncols && enter == ncols; ++j) {
            if (!allowed[j]) continue;
            Rational reduced = cost[j];
            for (std::size_t i = 0; i < m; ++i)
                if (*cb[i] != 0) reduced -= *cb[i] * t.a[i][j];
            if (reduced > 0) enter = j;
        }
        if (enter == ncols) return LpStatus::Optimal;
        std::size_t leave = m;
        Rational best;
        for (std::size_t i = 0; i < m; ++i) {
            if (t.a[i][enter] <= 0) continue;
            Rational ratio = t.b[i] / t.a[i][enter];
            if (leave == m || ratio < best || (ratio == best && t.basis[i] < t.basis[leave])) {
                leave = i;
                best = std::move(ratio);
            }
        }
        if (leave == m) return LpStatus::Unbounded;
        if (trace) *trace << "[lp] pivot enter=x" << enter << " leave=x" << t.basis[leave] << '\n';
        t.pivot(leave, enter);
        if (trace) t.dump(*trace, "tableau");
    }
}

} // namespace detail

/// Process-wide tableau trace sink; the CLI points this at stderr behind its
/// verbosity flag. Single-threaded use only.
inline std::ostream*& lp_trace_sink() {
    static std::ostream* sink = nullptr;
    return sink;
}

/// Two-phase simplex over exact rationals. Throws infeasible_error when the
/// feasible region is empty; reports unboundedness as value +inf with no
/// witness. An optimal witness is re-checked against the program before it
/// is returned.
inline LpOutcome solve_lp(const LinearProgram& lp, std::ostream* trace = nullptr) {
    if (!trace) trace = lp_trace_sink();
    const std::size_t n = lp.variable_count();
    enum class Kind { Le, Ge, Eq };
    struct Row {
        std::vector<Rational> coeffs;
        Rational rhs;
        Kind kind;
    };
    std::vector<Row> rows;
    rows.reserve(lp.constraints().size());
    for (const auto& c : lp.constraints()) {
        Row r{c.coeffs, c.rhs, c.rel == Relation::Eq ? Kind::Eq : Kind::Le};
        if (r.rhs < 0) {
            for (auto& v : r.coeffs) v = -v;
            r.rhs = -r.rhs;
            if (r.kind == Kind::Le) r.kind = Kind::Ge;
        }
        rows.push_back(std::move(r));
    }

    const std::size_t m = rows.size();
    std::size_t nslack = 0;
    std::size_t nart = 0;
    for (const auto& r : rows) {
        if (r.kind != Kind::Eq) ++nslack;
        if (r.kind != Kind::Le) ++nart;
    }
    const std::size_t ncols = n + nslack + m; // one reserved artificial slot per row
    const std::size_t art_base = n + nslack;

    detail::Tableau t;
    t.a.assign(m, std::vector<Rational>(ncols, Rational(0)));
    t.b.resize(m);
    t.basis.assign(m, 0);
    std::vector<bool> allowed(ncols, true);
    std::vector<bool> is_art(ncols, false);

    std::size_t slack = n;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t.a[i][j] = rows[i].coeffs[j];
        t.b[i] = rows[i].rhs;
        switch (rows[i].kind) {
            case Kind::Le:
                t.a[i][slack] = 1;
                t.basis[i] = slack++;
                break;
            case Kind::Ge:
                t.a[i][slack++] = -1;
                [[fallthrough]];
            case Kind::Eq:
                t.a[i][art_base + i] = 1;
                t.basis[i] = art_base + i;
                is_art[art_base + i] = true;
                break;
        }
    }
    for (std::size_t j = art_base; j < ncols; ++j)
        if (!is_art[j]) allowed[j] = false;

    if (trace) t.dump(*trace, "initial tableau");

    if (nart > 0) {
        std::vector<Rational> phase1(ncols, Rational(0));
        for (std::size_t j = art_base; j < ncols; ++j)
            if (is_art[j]) phase1[j] = -1;
        if (trace) *trace << "[lp] phase 1\n";
        if (detail::bland_simplex(t, phase1, allowed, trace) != LpStatus::Optimal)
            throw internal_error("phase-1 objective cannot be unbounded");
        for (std::size_t i = 0; i < t.a.size(); ++i)
            if (is_art[t.basis[i]] && t.b[i] != 0)
                throw infeasible_error("linear program has no feasible point");
        // Drive leftover artificials out of the basis; rows that cannot be
        // pivoted are redundant and get dropped.
        for (std::size_t i = t.a.size(); i-- > 0;) {
            if (!is_art[t.basis[i]]) continue;
            std::size_t col = ncols;
            for (std::size_t j = 0; j < art_base && col == ncols; ++j)
                if (t.a[i][j] != 0) col = j;
            if (col != ncols) {
                t.pivot(i, col);
            } else {
                t.a.erase(t.a.begin() + static_cast<std::ptrdiff_t>(i));
                t.b.erase(t.b.begin() + static_cast<std::ptrdiff_t>(i));
                t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
            }
        }
        for (std::size_t j = art_base; j < ncols; ++j) allowed[j] = false;
    }

    std::vector<Rational> cost(ncols, Rational(0));
    for (std::size_t j = 0; j < n; ++j) cost[j] = lp.objective()[j];
    if (trace) *trace << "[lp] phase 2\n";
    const LpStatus status = detail::bland_simplex(t, cost, allowed, trace);
    if (status == LpStatus::Unbounded)
        return {LpStatus::Unbounded, ExtendedValue::infinity(), std::nullopt};

    std::vector<Rational> x(n, Rational(0));
    for (std::size_t i = 0; i < t.basis.size(); ++i)
        if (t.basis[i] < n) x[t.basis[i]] = t.b[i];
    Rational value = 0;
    for (std::size_t j = 0; j < n; ++j) value += lp.objective()[j] * x[j];
    if (!check_feasible(lp, x))
        throw internal_error("simplex produced an infeasible witness");
    if (trace) t.dump(*trace, "final tableau");
    return {LpStatus::Optimal, ExtendedValue(std::move(value)), std::move(x)};
}

} // namespace settol
