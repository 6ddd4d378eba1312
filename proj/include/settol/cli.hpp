#pragma once

#include <algorithm>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "settol/settol.hpp"

namespace settol {
namespace cli_detail {

enum class Format { Table, Csv, Json };

struct CommonArgs {
    std::string csp_path;
    std::string graph_path;
    std::string graph_json_path;
    std::string format = "table";
    bool no_banner = false;
    unsigned decimal = 0; // 0 = exact display
};

inline void add_common(CLI::App* cmd, CommonArgs& a, bool need_instance = true) {
    auto* csp = cmd->add_option("--csp", a.csp_path, "explicit-CSP JSON file");
    auto* gt = cmd->add_option("--graph", a.graph_path, "graph file, 'u v cost' lines");
    auto* gj = cmd->add_option("--graph-json", a.graph_json_path, "graph JSON file");
    csp->excludes(gt)->excludes(gj);
    gt->excludes(gj);
    cmd->add_option("--format", a.format, "table|csv|json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    cmd->add_flag("--no-banner", a.no_banner, "suppress the banner line");
    cmd->add_option("--decimal", a.decimal, "show table values rounded to N digits");
    (void)need_instance;
}

struct Loaded {
    std::unique_ptr<CspInstance> inst;
    const MstCsp* graph = nullptr; // non-null when the instance is a graph
};

inline Loaded load_instance(const CommonArgs& a) {
    Loaded out;
    if (!a.csp_path.empty()) {
        out.inst = std::make_unique<ExplicitCsp>(ExplicitCsp::load(a.csp_path));
    } else if (!a.graph_path.empty()) {
        auto g = std::make_unique<MstCsp>(Graph::load_text(a.graph_path));
        out.graph = g.get();
        out.inst = std::move(g);
    } else if (!a.graph_json_path.empty()) {
        auto g = std::make_unique<MstCsp>(Graph::load_json(a.graph_json_path));
        out.graph = g.get();
        out.inst = std::move(g);
    } else {
        throw usage_error("an instance is required: --csp, --graph, or --graph-json");
    }
    return out;
}

inline Format parse_format(const std::string& f) {
    if (f == "csv") return Format::Csv;
    if (f == "json") return Format::Json;
    return Format::Table;
}

inline void banner(const CommonArgs& a, const std::string& command, std::ostream& err) {
    if (a.no_banner) return;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    err << "# settol " << command << " | " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\n';
}

inline std::string render_value(const ExtendedValue& v, const CommonArgs& a, Format fmt) {
    if (fmt == Format::Table && a.decimal > 0 && v.is_finite())
        return to_decimal_string(v.finite(), a.decimal);
    return v.str();
}

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::size_t resolve_element(const CspInstance& inst, const MstCsp* graph,
                                   const std::string& label) {
    if (auto i = inst.index_of(label)) return *i;
    if (graph)
        if (auto i = graph->graph().edge_index(label)) return *i;
    throw usage_error("unknown element '" + label + "'");
}

inline Subset resolve_set(const CspInstance& inst, const MstCsp* graph, const std::string& list) {
    Subset out;
    for (const std::string& label : split(list, ',')) {
        if (label.empty()) throw usage_error("empty element label");
        const std::size_t i = resolve_element(inst, graph, label);
        if (out.contains(i)) throw usage_error("element '" + label + "' listed twice");
        out = out.with(i);
    }
    return out;
}

inline std::string set_label(const CspInstance& inst, Subset s) {
    std::string out = "{";
    bool first = true;
    for (std::size_t i : s.elements()) {
        if (!first) out += ",";
        out += inst.label(i);
        first = false;
    }
    return out + "}";
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline void print_table(std::ostream& out, const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t j = 0; j < header.size(); ++j) width[j] = header[j].size();
    for (const auto& r : rows)
        for (std::size_t j = 0; j < r.size(); ++j) width[j] = std::max(width[j], r[j].size());
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t j = 0; j < r.size(); ++j) {
            out << r[j];
            if (j + 1 < r.size()) out << std::string(width[j] - r[j].size() + 2, ' ');
        }
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
}

inline void print_rows(std::ostream& out, Format fmt, const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows,
                       const std::string& command, const std::string& footer = {}) {
    if (fmt == Format::Json) {
        nlohmann::json j;
        j["command"] = command;
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows) {
            nlohmann::json row;
            for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = r[i];
            arr.push_back(row);
        }
        j["rows"] = arr;
        if (!footer.empty()) j["solves"] = footer;
        out << j.dump(2) << '\n';
        return;
    }
    if (fmt == Format::Csv) {
        for (std::size_t i = 0; i < header.size(); ++i)
            out << (i ? "," : "") << header[i];
        out << '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_quote(r[i]);
            out << '\n';
        }
        if (!footer.empty()) out << "solves: " << footer << '\n';
        return;
    }
    print_table(out, header, rows);
    if (!footer.empty()) out << "solves: " << footer << '\n';
}

struct SingleRow {
    std::string element;
    ExtendedValue upper;
    ExtendedValue lower;
};

inline int cmd_single(const CommonArgs& common, const std::string& elements, bool verify,
                      std::ostream& out, std::ostream& err) {
    banner(common, "single", err);
    Loaded loaded = load_instance(common);
    const CspInstance& inst = *loaded.inst;
    std::vector<std::size_t> targets;
    if (elements.empty()) {
        for (std::size_t i = 0; i < inst.ground_size(); ++i) targets.push_back(i);
    } else {
        targets = resolve_set(inst, loaded.graph, elements).elements();
    }

    std::vector<SingleRow> rows;
    if (loaded.graph) {
        const Graph& g = loaded.graph->graph();
        KruskalResult base = kruskal(g);
        if (!base.tree) throw internal_error("connected graph has no spanning tree");
        for (std::size_t i : targets)
            rows.push_back({inst.label(i), mst_single_upper(g, *base.tree, i),
                            mst_single_lower(g, *base.tree, i)});
    } else {
        for (std::size_t i : targets)
            rows.push_back({inst.label(i), single_upper(inst, i).value,
                            single_lower(inst, i).value});
    }

    if (verify) {
        for (std::size_t idx = 0; idx < targets.size(); ++idx) {
            const std::size_t i = targets[idx];
            const ExtendedValue up = loaded.graph ? single_upper(inst, i).value
                                                  : set_upper_eul(inst, Subset::single(i)).value;
            const ExtendedValue lo = loaded.graph ? single_lower(inst, i).value
                                                  : set_lower_ell(inst, Subset::single(i)).value;
            if (up != rows[idx].upper || lo != rows[idx].lower)
                throw internal_error("verification mismatch on element '" + inst.label(i) +
                                     "': (" + rows[idx].upper.str() + ";" +
                                     rows[idx].lower.str() + ") vs (" + up.str() + ";" +
                                     lo.str() + ")");
        }
    }

    const Format fmt = parse_format(common.format);
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows)
        cells.push_back({r.element, render_value(r.upper, common, fmt),
                         render_value(r.lower, common, fmt)});
    print_rows(out, fmt, {"element", "upper", "lower"}, cells, "single");
    return 0;
}

inline std::string witness_string(const CspInstance& inst, Subset e,
                                  const std::optional<std::vector<Rational>>& w) {
    if (!w) return "-";
    std::string out;
    const auto elems = e.elements();
    for (std::size_t i = 0; i < elems.size(); ++i) {
        if (i) out += ";";
        out += inst.label(elems[i]) + "=" + to_string((*w)[i]);
    }
    return out;
}

inline ToleranceReport run_set_method(const CspInstance& inst, const MstCsp* graph,
                                      const std::string& kind, const std::string& method,
                                      Subset e) {
    const bool upper = kind == "upper";
    if (method == "eul") {
        if (!upper) throw usage_error("--method eul computes upper tolerances");
        return set_upper_eul(inst, e);
    }
    if (method == "ell" || method == "ill" || method == "tll") {
        if (upper) throw usage_error("--method " + method + " computes lower tolerances");
        if (method == "ell") return set_lower_ell(inst, e);
        if (method == "ill") return set_lower_ill(inst, e);
        return set_lower_tll(inst, e);
    }
    if (method == "closed") {
        switch (e.size()) {
            case 1:
                return upper ? single_upper(inst, e.elements()[0])
                             : single_lower(inst, e.elements()[0]);
            case 2:
                return upper ? closed_upper_2(inst, e) : closed_lower_2(inst, e);
            case 3:
                return upper ? closed_upper_3(inst, e) : closed_lower_3(inst, e);
            default:
                throw usage_error("--method closed supports |E| <= 3");
        }
    }
    if (method == "mst-exact" || method == "mst-bound") {
        if (!graph) throw usage_error("--method " + method + " requires a graph instance");
        KruskalResult base = kruskal(graph->graph());
        if (method == "mst-exact") {
            if (upper) throw usage_error("--method mst-exact computes lower tolerances");
            return mst_set_lower(graph->graph(), *base.tree, e);
        }
        if (!upper) throw usage_error("--method mst-bound bounds upper tolerances");
        ToleranceReport rep;
        rep.method = Method::MstFormula;
        rep.value = mst_set_upper_lower_bound(graph->graph(), *base.tree, e);
        if (rep.value.is_finite()) {
            std::vector<Rational> w;
            for (std::size_t i : e.elements())
                w.push_back(mst_single_upper(graph->graph(), *base.tree, i).finite());
            rep.witness = std::move(w);
        }
        return rep;
    }
    throw usage_error("unknown method '" + method + "'");
}

inline int cmd_set(const CommonArgs& common, const std::string& kind, const std::string& set_list,
                   const std::string& method, bool trace_lp, std::ostream& out,
                   std::ostream& err) {
    banner(common, "set", err);
    Loaded loaded = load_instance(common);
    const Subset e = resolve_set(*loaded.inst, loaded.graph, set_list);
    if (e.empty()) throw usage_error("--set must name at least one element");
    if (trace_lp) lp_trace_sink() = &err;
    ToleranceReport rep;
    try {
        rep = run_set_method(*loaded.inst, loaded.graph, kind, method, e);
    } catch (...) {
        lp_trace_sink() = nullptr;
        throw;
    }
    lp_trace_sink() = nullptr;

    const Format fmt = parse_format(common.format);
    const std::string witness = witness_string(*loaded.inst, e, rep.witness);
    if (fmt == Format::Json) {
        nlohmann::json j;
        j["command"] = "set";
        j["kind"] = kind;
        j["set"] = [&] {
            nlohmann::json arr = nlohmann::json::array();
            for (std::size_t i : e.elements()) arr.push_back(loaded.inst->label(i));
            return arr;
        }();
        j["value"] = rep.value.str();
        j["method"] = std::string(method_name(rep.method));
        if (!rep.case_label.empty()) j["case"] = rep.case_label;
        if (rep.witness) {
            nlohmann::json w;
            const auto elems = e.elements();
            for (std::size_t i = 0; i < elems.size(); ++i)
                w[loaded.inst->label(elems[i])] = to_string((*rep.witness)[i]);
            j["witness"] = w;
        }
        j["solves"] = rep.solves_used;
        out << j.dump(2) << '\n';
        return 0;
    }
    if (fmt == Format::Csv) {
        out << "set,kind,value,method,case,witness,solves\n";
        out << csv_quote(set_label(*loaded.inst, e)) << ',' << kind << ','
            << rep.value.str() << ',' << method_name(rep.method) << ','
            << (rep.case_label.empty() ? "-" : rep.case_label) << ',' << csv_quote(witness)
            << ',' << rep.solves_used << '\n';
        return 0;
    }
    out << "set: " << set_label(*loaded.inst, e) << '\n';
    out << "kind: " << kind << '\n';
    out << "value: " << render_value(rep.value, common, fmt) << '\n';
    out << "method: " << method_name(rep.method);
    if (!rep.case_label.empty()) out << " (case " << rep.case_label << ")";
    out << '\n';
    out << "witness: " << witness << '\n';
    out << "solves: " << rep.solves_used << '\n';
    return 0;
}

inline int cmd_all_lower(const CommonArgs& common, const std::string& method, std::size_t cap,
                         unsigned jobs, std::ostream& out, std::ostream& err) {
    banner(common, "all-lower", err);
    Loaded loaded = load_instance(common);
    const CspInstance& inst = *loaded.inst;
    LowerMethod lm;
    if (method == "tll")
        lm = LowerMethod::Tll;
    else if (method == "ill")
        lm = LowerMethod::Ill;
    else if (method == "ell-naive")
        lm = LowerMethod::EllNaive;
    else
        throw usage_error("unknown method '" + method + "' (tll|ill|ell-naive)");

    AllSubsetsOptions opt;
    opt.cap = cap;
    opt.jobs = jobs;
    const auto reports = all_subsets_lower(inst, lm, opt);
    const std::uint64_t total = inst.solve_count();

    std::vector<Subset> order;
    order.reserve(reports.size());
    for (const auto& [s, rep] : reports) order.push_back(s);
    std::stable_sort(order.begin(), order.end(),
                     [](Subset a, Subset b) { return a.size() < b.size(); });

    const Format fmt = parse_format(common.format);
    std::vector<std::vector<std::string>> cells;
    for (Subset s : order) {
        const auto& rep = reports.at(s);
        cells.push_back({set_label(inst, s), std::to_string(s.size()),
                         render_value(rep.value, common, fmt),
                         std::string(method_name(rep.method)), std::to_string(rep.solves_used)});
    }
    print_rows(out, fmt, {"set", "cardinality", "value", "method", "solves"}, cells, "all-lower",
               std::to_string(total));
    return 0;
}

inline int cmd_bounds(const CommonArgs& common, const std::string& set_list,
                      std::optional<std::size_t> s, const std::string& partition_spec,
                      std::ostream& out, std::ostream& err) {
    banner(common, "bounds", err);
    Loaded loaded = load_instance(common);
    const CspInstance& inst = *loaded.inst;
    const Subset e = resolve_set(inst, loaded.graph, set_list);
    if (e.empty()) throw usage_error("--set must name at least one element");

    BoundsQuery q;
    q.binomial_s = s;
    if (!partition_spec.empty()) {
        std::vector<Subset> blocks;
        for (const std::string& block : split(partition_spec, '|'))
            blocks.push_back(resolve_set(inst, loaded.graph, block));
        q.partition = std::move(blocks);
    }
    const BoundsReport rep = bounds_report(inst, e, q);

    const Format fmt = parse_format(common.format);
    std::vector<std::vector<std::string>> cells;
    auto row = [&](const std::string& name, const ExtendedValue& v) {
        cells.push_back({name, render_value(v, common, fmt)});
    };
    row("max-single-lower", rep.max_single_lower);
    row("sum-single-lower", rep.sum_single_lower);
    row("min-cost", rep.min_cost_bound);
    if (rep.binomial_bound) row("binomial(s=" + std::to_string(*s) + ")", *rep.binomial_bound);
    if (rep.partition_bound) row("partition", *rep.partition_bound);
    row("max-single-upper", rep.max_single_upper);
    if (loaded.graph) {
        KruskalResult base = kruskal(loaded.graph->graph());
        row("mst-sum-single-upper",
            mst_set_upper_lower_bound(loaded.graph->graph(), *base.tree, e));
    }
    print_rows(out, fmt, {"bound", "value"}, cells, "bounds");
    return 0;
}

inline void verify_one(const CspInstance& engine_inst, const ExplicitCsp& oracle_inst, Subset e,
                       const OracleConfig& cfg) {
    const ExtendedValue lower_oracle = oracle_set_lower(oracle_inst, e, cfg);
    const ExtendedValue ell = set_lower_ell(engine_inst, e).value;
    const ExtendedValue ill = set_lower_ill(engine_inst, e).value;
    const ExtendedValue tll = set_lower_tll(engine_inst, e).value;
    if (!(ell == ill && ill == tll && tll == lower_oracle))
        throw internal_error("lower mismatch on E=" + set_label(engine_inst, e) + ": ell=" +
                             ell.str() + " ill=" + ill.str() + " tll=" + tll.str() +
                             " oracle=" + lower_oracle.str());
    const ExtendedValue upper_oracle = oracle_set_upper(oracle_inst, e, cfg);
    const ExtendedValue eul = set_upper_eul(engine_inst, e).value;
    if (eul != upper_oracle)
        throw internal_error("upper mismatch on E=" + set_label(engine_inst, e) + ": eul=" +
                             eul.str() + " oracle=" + upper_oracle.str());
    if (e.size() == 2) {
        if (closed_lower_2(engine_inst, e).value != lower_oracle ||
            closed_upper_2(engine_inst, e).value != upper_oracle)
            throw internal_error("closed-form mismatch on E=" + set_label(engine_inst, e));
    } else if (e.size() == 3) {
        if (closed_lower_3(engine_inst, e).value != lower_oracle ||
            closed_upper_3(engine_inst, e).value != upper_oracle)
            throw internal_error("closed-form mismatch on E=" + set_label(engine_inst, e));
    }
}

inline int cmd_verify(const CommonArgs& common, bool random_mode, std::size_t trials,
                      std::uint64_t seed, std::size_t max_m, std::size_t max_n, std::size_t max_k,
                      std::size_t max_ground, std::ostream& out, std::ostream& err) {
    banner(common, "verify", err);
    OracleConfig cfg;
    cfg.seed = seed;
    cfg.max_ground = max_ground;
    std::size_t checks = 0;

    if (random_mode) {
        Rng rng(seed);
        for (std::size_t trial = 0; trial < trials; ++trial) {
            const bool use_graph = trial % 2 == 1;
            if (use_graph) {
                const Graph g = random_connected_graph(rng, max_n, cfg);
                const MstCsp engine_inst(g);
                const ExplicitCsp oracle_inst = explicit_from_graph(g, cfg.max_vertices);
                const std::size_t k = 1 + rng.below(std::min<std::size_t>(max_k, g.edge_count()));
                Subset e;
                while (e.size() < k) e = e.with(rng.below(g.edge_count()));
                verify_one(engine_inst, oracle_inst, e, cfg);
                out << "trial " << trial << ": graph n=" << g.vertex_count()
                    << " m=" << g.edge_count() << " |E|=" << e.size() << " ok\n";
            } else {
                const ExplicitCsp inst = random_explicit_csp(rng, max_m, cfg);
                const std::size_t k =
                    1 + rng.below(std::min<std::size_t>(max_k, inst.ground_size()));
                Subset e;
                while (e.size() < k) e = e.with(rng.below(inst.ground_size()));
                verify_one(inst, inst, e, cfg);
                out << "trial " << trial << ": csp m=" << inst.ground_size() << " |E|=" << e.size()
                    << " ok\n";
            }
            ++checks;
        }
    } else {
        Loaded loaded = load_instance(common);
        const CspInstance& inst = *loaded.inst;
        std::unique_ptr<ExplicitCsp> oracle_inst;
        if (loaded.graph)
            oracle_inst = std::make_unique<ExplicitCsp>(
                explicit_from_graph(loaded.graph->graph(), cfg.max_vertices));
        else
            oracle_inst = std::make_unique<ExplicitCsp>(
                static_cast<const ExplicitCsp&>(inst));
        const std::size_t limit = std::min(max_k, inst.ground_size());
        std::vector<Subset> sets;
        inst.full_set().for_each_subset([&](Subset e) {
            if (!e.empty() && e.size() <= limit) sets.push_back(e);
        });
        std::stable_sort(sets.begin(), sets.end(),
                         [](Subset a, Subset b) { return a.size() < b.size(); });
        for (Subset e : sets) {
            verify_one(inst, *oracle_inst, e, cfg);
            ++checks;
        }
    }
    out << "verify: OK (" << checks << " checks)\n";
    return 0;
}

} // namespace cli_detail

/// Batch front end. Returns the process exit code: 0 success, 1 unreadable or
/// unparsable input, 2 invalid request, 3 internal invariant violation.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    using namespace cli_detail;
    CLI::App app{"exact set tolerances for combinatorial sum problems"};
    app.name("settol");
    app.require_subcommand(1);

    CommonArgs single_args;
    std::string single_elements;
    bool single_verify = false;
    auto* single = app.add_subcommand("single", "per-element upper and lower tolerances");
    add_common(single, single_args);
    single->add_option("--elements", single_elements, "comma-separated element labels");
    single->add_flag("--verify", single_verify, "cross-check against the generic engine");

    CommonArgs set_args;
    std::string set_kind, set_list, set_method;
    bool set_trace = false;
    auto* set = app.add_subcommand("set", "set tolerance of one element set");
    add_common(set, set_args);
    set->add_option("--kind", set_kind, "upper|lower")
        ->required()
        ->check(CLI::IsMember({"upper", "lower"}));
    set->add_option("--set", set_list, "comma-separated element labels")->required();
    set->add_option("--method", set_method, "eul|ell|ill|tll|closed|mst-exact|mst-bound")
        ->required();
    set->add_flag("--trace-lp", set_trace, "dump simplex tableaus to stderr");

    CommonArgs all_args;
    std::string all_method = "tll";
    std::size_t all_cap = 12;
    unsigned all_jobs = 1;
    auto* all = app.add_subcommand("all-lower", "lower tolerances of every nonempty subset");
    add_common(all, all_args);
    all->add_option("--method", all_method, "tll|ill|ell-naive");
    all->add_option("--cap", all_cap, "largest allowed ground-set size");
    all->add_option("--jobs", all_jobs, "parallel workers per cardinality stratum");

    CommonArgs bounds_args;
    std::string bounds_set, bounds_partition;
    std::optional<std::size_t> bounds_s;
    auto* bounds = app.add_subcommand("bounds", "provable tolerance bounds for a set");
    add_common(bounds, bounds_args);
    bounds->add_option("--set", bounds_set, "comma-separated element labels")->required();
    bounds->add_option("--s", bounds_s, "binomial bound subset cardinality");
    bounds->add_option("--partition", bounds_partition,
                       "partition blocks, e.g. \"a,b|c\" (labels comma-separated, blocks |-separated)");

    CommonArgs verify_args;
    bool verify_random = false;
    std::size_t verify_trials = 20;
    std::uint64_t verify_seed = 1;
    std::size_t verify_max_m = 5, verify_max_n = 5, verify_max_k = 3;
    std::size_t verify_max_ground = 12;
    auto* verify = app.add_subcommand("verify", "oracle-vs-engine agreement checks");
    add_common(verify, verify_args, false);
    verify->add_flag("--random", verify_random, "verify a seeded random batch");
    verify->add_option("--trials", verify_trials, "random batch size");
    verify->add_option("--seed", verify_seed, "random batch seed");
    verify->add_option("--max-m", verify_max_m, "largest random ground set");
    verify->add_option("--max-n", verify_max_n, "largest random graph vertex count");
    verify->add_option("--max-k", verify_max_k, "largest |E| checked");
    verify->add_option("--max-ground", verify_max_ground, "oracle ground-set cap");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (single->parsed())
            return cmd_single(single_args, single_elements, single_verify, out, err);
        if (set->parsed())
            return cmd_set(set_args, set_kind, set_list, set_method, set_trace, out, err);
        if (all->parsed())
            return cmd_all_lower(all_args, all_method, all_cap, all_jobs, out, err);
        if (bounds->parsed())
            return cmd_bounds(bounds_args, bounds_set, bounds_s, bounds_partition, out, err);
        if (verify->parsed())
            return cmd_verify(verify_args, verify_random, verify_trials, verify_seed,
                              verify_max_m, verify_max_n, verify_max_k, verify_max_ground, out,
                              err);
        err << "error: no command\n";
        return 2;
    } catch (const io_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const usage_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const internal_error& e) {
        err << "internal error: " << e.what() << '\n';
        return 3;
    } catch (const infeasible_error& e) {
        err << "internal error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace settol
