#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "settol/csp.hpp"
#include "settol/errors.hpp"
#include "settol/rational.hpp"
#include "settol/subset.hpp"
#include "settol/tolerance.hpp"

namespace settol {

struct GraphEdge {
    std::size_t u, v; // 0-based, u < v
    Rational cost;
    std::string label; // "v{u+1}-v{v+1}", "#k" suffix for parallel edges
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Returns false when x and y were already connected.
    bool unite(std::size_t x, std::size_t y) {
        std::size_t rx = find(x), ry = find(y);
        if (rx == ry) return false;
        if (size_[rx] < size_[ry]) std::swap(rx, ry);
        parent_[ry] = rx;
        size_[rx] += size_[ry];
        return true;
    }

    bool connected(std::size_t x, std::size_t y) { return find(x) == find(y); }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

} // namespace detail

/// Connected undirected graph with exact edge costs. Edge indices double as
/// ground-set indices for the tolerance machinery; parallel edges are
/// allowed, self-loops are not.
class Graph {
public:
    Graph(std::size_t vertex_count,
          std::vector<std::tuple<std::size_t, std::size_t, Rational>> edges)
        : n_(vertex_count) {
        if (n_ < 2) throw usage_error("graph needs at least 2 vertices");
        if (edges.size() > Subset::max_elements)
            throw usage_error("graph is limited to 64 edges");
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
        for (auto& [u, v, cost] : edges) {
            if (u >= n_ || v >= n_) throw usage_error("edge endpoint out of range");
            if (u == v) throw usage_error("self-loops are not allowed");
            if (u > v) std::swap(u, v);
            std::string label = "v" + std::to_string(u + 1) + "-v" + std::to_string(v + 1);
            const std::size_t copy = ++seen[{u, v}];
            if (copy > 1) label += "#" + std::to_string(copy);
            edges_.push_back({u, v, std::move(cost), std::move(label)});
        }
        detail::UnionFind uf(n_);
        std::size_t parts = n_;
        for (const auto& e : edges_)
            if (uf.unite(e.u, e.v)) --parts;
        if (parts != 1) throw usage_error("graph must be connected");
    }

    std::size_t vertex_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const GraphEdge& edge(std::size_t i) const {
        if (i >= edges_.size()) throw usage_error("edge index out of range");
        return edges_[i];
    }
    const std::vector<GraphEdge>& edges() const { return edges_; }

    /// Resolves "v1-v2", "1-2", reversed endpoints, and the "#k" suffix for
    /// parallel edges.
    std::optional<std::size_t> edge_index(std::string_view label) const {
        std::string suffix;
        std::string body(label);
        if (auto hash = body.find('#'); hash != std::string::npos) {
            suffix = body.substr(hash);
            body = body.substr(0, hash);
        }
        const auto dash = body.find('-');
        if (dash == std::string::npos) return std::nullopt;
        auto endpoint = [](std::string s) -> std::optional<std::size_t> {
            if (!s.empty() && (s.front() == 'v' || s.front() == 'V')) s.erase(0, 1);
            if (s.empty()) return std::nullopt;
            for (char c : s)
                if (c < '0' || c > '9') return std::nullopt;
            return static_cast<std::size_t>(std::stoull(s));
        };
        auto a = endpoint(body.substr(0, dash));
        auto b = endpoint(body.substr(dash + 1));
        if (!a || !b || *a == 0 || *b == 0) return std::nullopt;
        if (*a > *b) std::swap(*a, *b);
        std::string canonical =
            "v" + std::to_string(*a) + "-v" + std::to_string(*b) + suffix;
        for (std::size_t i = 0; i < edges_.size(); ++i)
            if (edges_[i].label == canonical) return i;
        return std::nullopt;
    }

    std::vector<Rational> costs() const {
        std::vector<Rational> out;
        out.reserve(edges_.size());
        for (const auto& e : edges_) out.push_back(e.cost);
        return out;
    }

    Graph with_costs(std::vector<Rational> costs) const {
        if (costs.size() != edges_.size()) throw usage_error("cost count mismatch");
        std::vector<std::tuple<std::size_t, std::size_t, Rational>> spec;
        spec.reserve(edges_.size());
        for (std::size_t i = 0; i < edges_.size(); ++i)
            spec.emplace_back(edges_[i].u, edges_[i].v, std::move(costs[i]));
        return Graph(n_, std::move(spec));
    }

    /// Plain-text format: one "u v cost" triple per line, 1-based vertices,
    /// '#' starts a comment. The vertex count is the largest endpoint.
    static Graph from_text(std::istream& in) {
        std::vector<std::tuple<std::size_t, std::size_t, Rational>> edges;
        std::size_t n = 0;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string u, v, cost;
            if (!(ls >> u)) continue;
            if (!(ls >> v >> cost))
                throw io_error("line " + std::to_string(lineno) + ": expected 'u v cost'");
            std::string extra;
            if (ls >> extra)
                throw io_error("line " + std::to_string(lineno) + ": trailing tokens");
            std::size_t ui, vi;
            try {
                ui = std::stoull(u);
                vi = std::stoull(v);
            } catch (...) {
                throw io_error("line " + std::to_string(lineno) + ": bad vertex id");
            }
            if (ui == 0 || vi == 0)
                throw io_error("line " + std::to_string(lineno) + ": vertices are 1-based");
            Rational c;
            try {
                c = parse_rational(cost);
            } catch (const usage_error& e) {
                throw io_error("line " + std::to_string(lineno) + ": " + e.what());
            }
            n = std::max({n, ui, vi});
            edges.emplace_back(ui - 1, vi - 1, std::move(c));
        }
        if (edges.empty()) throw io_error("no edges in graph file");
        try {
            return Graph(n, std::move(edges));
        } catch (const usage_error& e) {
            throw io_error(std::string("invalid graph: ") + e.what());
        }
    }

    static Graph from_json(const nlohmann::json& j) {
        try {
            const std::size_t n = j.at("vertices").get<std::size_t>();
            std::vector<std::tuple<std::size_t, std::size_t, Rational>> edges;
            for (const auto& je : j.at("edges")) {
                const std::size_t u = je.at("u").get<std::size_t>();
                const std::size_t v = je.at("v").get<std::size_t>();
                const auto& jc = je.at("cost");
                Rational c = jc.is_string() ? parse_rational(jc.get<std::string>())
                                            : Rational(jc.get<long long>());
                if (u == 0 || v == 0) throw io_error("vertices are 1-based");
                edges.emplace_back(u - 1, v - 1, std::move(c));
            }
            return Graph(n, std::move(edges));
        } catch (const nlohmann::json::exception& e) {
            throw io_error(std::string("malformed graph JSON: ") + e.what());
        } catch (const usage_error& e) {
            throw io_error(std::string("invalid graph: ") + e.what());
        }
    }

    static Graph load_text(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw io_error("cannot open '" + path + "'");
        return from_text(in);
    }

    static Graph load_json(const std::string& path) {
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

private:
    std::size_t n_;
    std::vector<GraphEdge> edges_;
};

/// A spanning tree of a graph, with adjacency for path queries.
class SpanningTree {
public:
    SpanningTree(const Graph& g, Subset edges) : g_(&g), edges_(edges), adj_(g.vertex_count()) {
        if (edges.size() != g.vertex_count() - 1)
            throw usage_error("spanning tree needs exactly n-1 edges");
        detail::UnionFind uf(g.vertex_count());
        for (std::size_t i : edges.elements()) {
            const auto& e = g.edge(i);
            if (!uf.unite(e.u, e.v)) throw usage_error("edge set contains a cycle");
            adj_[e.u].emplace_back(e.v, i);
            adj_[e.v].emplace_back(e.u, i);
        }
        // n-1 acyclic edges over n vertices always span
    }

    const Graph& graph() const { return *g_; }
    Subset edge_set() const { return edges_; }
    bool contains(std::size_t edge_index) const { return edges_.contains(edge_index); }

    ExtendedValue cost() const {
        Rational total = 0;
        for (std::size_t i : edges_.elements()) total += g_->edge(i).cost;
        return ExtendedValue(std::move(total));
    }

    /// Edge indices of the unique tree path from a to b.
    std::vector<std::size_t> path(std::size_t a, std::size_t b) const {
        if (a >= adj_.size() || b >= adj_.size()) throw usage_error("vertex out of range");
        std::vector<std::size_t> parent_edge(adj_.size(), SIZE_MAX);
        std::vector<std::size_t> parent(adj_.size(), SIZE_MAX);
        std::deque<std::size_t> queue{a};
        std::vector<bool> seen(adj_.size(), false);
        seen[a] = true;
        while (!queue.empty()) {
            const std::size_t x = queue.front();
            queue.pop_front();
            if (x == b) break;
            for (auto [y, ei] : adj_[x]) {
                if (seen[y]) continue;
                seen[y] = true;
                parent[y] = x;
                parent_edge[y] = ei;
                queue.push_back(y);
            }
        }
        std::vector<std::size_t> out;
        for (std::size_t x = b; x != a; x = parent[x]) {
            if (parent[x] == SIZE_MAX) throw internal_error("tree is not connected");
            out.push_back(parent_edge[x]);
        }
        std::reverse(out.begin(), out.end());
        return out;
    }

private:
    const Graph* g_;
    Subset edges_;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj_;
};

struct KruskalResult {
    ExtendedValue value;
    std::optional<SpanningTree> tree;
};

/// Minimum spanning tree with forced exclusions and inclusions: include edges
/// seed the union-find (a cycle among them means no tree qualifies), the rest
/// run through Kruskal in (cost, index) order. Returns +inf when the forced
/// sets leave nothing spanning.
inline KruskalResult kruskal(const Graph& g, Subset exclude = {}, Subset include = {}) {
    const Subset all = Subset::full(g.edge_count());
    if (!exclude.is_subset_of(all) || !include.is_subset_of(all))
        throw usage_error("edge subset out of range");
    if (exclude.intersects(include)) throw usage_error("exclude and include sets overlap");

    detail::UnionFind uf(g.vertex_count());
    Subset chosen;
    std::size_t count = 0;
    for (std::size_t i : include.elements()) {
        const auto& e = g.edge(i);
        if (!uf.unite(e.u, e.v)) return {ExtendedValue::infinity(), std::nullopt};
        chosen = chosen.with(i);
        ++count;
    }
    std::vector<std::size_t> order;
    order.reserve(g.edge_count());
    for (std::size_t i = 0; i < g.edge_count(); ++i)
        if (!exclude.contains(i) && !include.contains(i)) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return g.edge(a).cost != g.edge(b).cost ? g.edge(a).cost < g.edge(b).cost : a < b;
    });
    for (std::size_t i : order) {
        if (count + 1 == g.vertex_count()) break;
        const auto& e = g.edge(i);
        if (uf.unite(e.u, e.v)) {
            chosen = chosen.with(i);
            ++count;
        }
    }
    if (count + 1 != g.vertex_count()) return {ExtendedValue::infinity(), std::nullopt};
    SpanningTree tree(g, chosen);
    return {tree.cost(), std::move(tree)};
}

/// Tree path between the endpoints of a non-tree edge.
inline std::vector<std::size_t> tree_path(const SpanningTree& t, std::size_t edge_index) {
    const auto& e = t.graph().edge(edge_index);
    if (t.contains(edge_index)) throw usage_error("edge lies in the tree");
    return t.path(e.u, e.v);
}

/// Minimality test: every non-tree edge must cost at least as much as every
/// edge on its tree path.
inline bool is_minimum_spanning_tree(const Graph& g, const SpanningTree& t) {
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        if (t.contains(i)) continue;
        for (std::size_t j : tree_path(t, i))
            if (g.edge(j).cost > g.edge(i).cost) return false;
    }
    return true;
}

namespace detail {

inline void require_mst(const Graph& g, const SpanningTree& t) {
    if (&t.graph() != &g) throw usage_error("tree belongs to a different graph");
    if (!is_minimum_spanning_tree(g, t)) throw usage_error("tree is not a minimum spanning tree");
}

} // namespace detail

/// Path-based single upper tolerance of an edge, relative to (any) MST.
inline ExtendedValue mst_single_upper(const Graph& g, const SpanningTree& t, std::size_t e) {
    detail::require_mst(g, t);
    const auto& ge = g.edge(e);
    if (t.contains(e)) {
        std::optional<Rational> best;
        for (std::size_t i = 0; i < g.edge_count(); ++i) {
            if (t.contains(i)) continue;
            const auto p = tree_path(t, i);
            if (std::find(p.begin(), p.end(), e) == p.end()) continue;
            if (!best || g.edge(i).cost < *best) best = g.edge(i).cost;
        }
        if (!best) return ExtendedValue::infinity();
        return ExtendedValue(Rational(*best - ge.cost));
    }
    Rational maxcost;
    bool first = true;
    for (std::size_t j : tree_path(t, e)) {
        if (first || g.edge(j).cost > maxcost) maxcost = g.edge(j).cost;
        first = false;
    }
    if (maxcost == ge.cost) return ExtendedValue(0);
    if (maxcost < ge.cost) return ExtendedValue::infinity();
    throw internal_error("non-tree edge cheaper than its tree path in a valid MST");
}

/// Path-based single lower tolerance of an edge: zero for tree edges,
/// otherwise the gap to the costliest path edge.
inline ExtendedValue mst_single_lower(const Graph& g, const SpanningTree& t, std::size_t e) {
    detail::require_mst(g, t);
    const auto& ge = g.edge(e);
    if (t.contains(e)) return ExtendedValue(0);
    Rational maxcost;
    bool first = true;
    for (std::size_t j : tree_path(t, e)) {
        if (first || g.edge(j).cost > maxcost) maxcost = g.edge(j).cost;
        first = false;
    }
    return ExtendedValue(Rational(ge.cost - maxcost));
}

/// Exact set lower tolerance for trees: the sum of single lower tolerances,
/// with the singles themselves as witness.
inline ToleranceReport mst_set_lower(const Graph& g, const SpanningTree& t, Subset e) {
    detail::require_nonempty(e);
    ToleranceReport rep;
    rep.method = Method::MstFormula;
    std::vector<Rational> witness;
    Rational total = 0;
    for (std::size_t i : e.elements()) {
        const ExtendedValue v = mst_single_lower(g, t, i);
        witness.push_back(v.finite()); // connected graphs have finite lower tolerances
        total += v.finite();
    }
    rep.value = ExtendedValue(total);
    rep.witness = std::move(witness);
    return rep;
}

/// Certified lower bound on the set upper tolerance: the sum of single upper
/// tolerances (tight for singletons).
inline ExtendedValue mst_set_upper_lower_bound(const Graph& g, const SpanningTree& t, Subset e) {
    detail::require_nonempty(e);
    ExtendedValue total(0);
    for (std::size_t i : e.elements()) total += mst_single_upper(g, t, i);
    return total;
}

/// Every spanning tree exactly once, by include/exclude branching with a
/// connectivity prune. Desk-scale only.
inline std::vector<SpanningTree> enumerate_spanning_trees(const Graph& g,
                                                          std::size_t vertex_cap = 9) {
    if (g.vertex_count() > vertex_cap)
        throw usage_error("spanning-tree enumeration capped at " + std::to_string(vertex_cap) +
                          " vertices");
    std::vector<SpanningTree> out;
    const std::size_t n = g.vertex_count();
    const std::size_t m = g.edge_count();

    auto connectable = [&](detail::UnionFind uf, std::size_t from) {
        std::vector<std::size_t> roots;
        roots.reserve(n);
        for (std::size_t v = 0; v < n; ++v) roots.push_back(uf.find(v));
        std::sort(roots.begin(), roots.end());
        auto parts = static_cast<std::size_t>(std::unique(roots.begin(), roots.end()) -
                                              roots.begin());
        for (std::size_t i = from; i < m && parts > 1; ++i)
            if (uf.unite(g.edge(i).u, g.edge(i).v)) --parts;
        return parts == 1;
    };

    std::function<void(std::size_t, detail::UnionFind&, Subset, std::size_t)> rec =
        [&](std::size_t idx, detail::UnionFind& uf, Subset chosen, std::size_t count) {
            if (count == n - 1) {
                out.emplace_back(g, chosen);
                return;
            }
            if (idx == m || m - idx < (n - 1) - count) return;
            const auto& e = g.edge(idx);
            if (!uf.connected(e.u, e.v)) {
                detail::UnionFind with = uf;
                with.unite(e.u, e.v);
                rec(idx + 1, with, chosen.with(idx), count + 1);
            }
            if (connectable(uf, idx + 1)) rec(idx + 1, uf, chosen, count);
        };
    detail::UnionFind uf(n);
    rec(0, uf, Subset(), 0);
    return out;
}

/// The tolerance engine's view of a graph: ground set = edges, constrained
/// solves run the seeded Kruskal.
class MstCsp final : public CspInstance {
public:
    explicit MstCsp(Graph g) : CspInstance(edge_labels(g), g.costs()), graph_(std::move(g)) {}

    const Graph& graph() const { return graph_; }

    std::unique_ptr<CspInstance> with_costs(std::vector<Rational> costs) const override {
        return std::make_unique<MstCsp>(graph_.with_costs(std::move(costs)));
    }

private:
    static std::vector<std::string> edge_labels(const Graph& g) {
        std::vector<std::string> out;
        out.reserve(g.edge_count());
        for (const auto& e : g.edges()) out.push_back(e.label);
        return out;
    }

    SolveResult solve_impl(Subset exclude, Subset include) const override {
        KruskalResult r = kruskal(graph_, exclude, include);
        if (!r.tree) return {std::move(r.value), std::nullopt};
        return {std::move(r.value), r.tree->edge_set()};
    }

    Graph graph_;
};

/// Explicit instance whose solutions are all spanning trees of g; the
/// brute-force counterpart of MstCsp.
inline ExplicitCsp explicit_from_graph(const Graph& g, std::size_t vertex_cap = 9) {
    std::vector<Subset> sols;
    for (const auto& t : enumerate_spanning_trees(g, vertex_cap)) sols.push_back(t.edge_set());
    std::vector<std::string> labels;
    for (const auto& e : g.edges()) labels.push_back(e.label);
    return ExplicitCsp(std::move(labels), g.costs(), std::move(sols));
}

} // namespace settol
