#pragma once

#include <string>

#include "settol/csp.hpp"
#include "settol/mst.hpp"

namespace settol::testing {

inline std::string fixture_path(const std::string& name) {
    return std::string(SETTOL_FIXTURE_DIR) + "/" + name;
}

/// Elements {a,b,c} with costs 1,2,4 and solutions {a,b},{a,c},{b,c}.
inline ExplicitCsp triangle_csp() {
    return ExplicitCsp({"a", "b", "c"}, {Rational(1), Rational(2), Rational(4)},
                       {Subset::of({0, 1}), Subset::of({0, 2}), Subset::of({1, 2})});
}

inline Graph fixture_graph() {
    return Graph::load_text(fixture_path("appendixE.txt"));
}

inline Subset edge_set(const MstCsp& inst, std::initializer_list<const char*> labels) {
    Subset out;
    for (const char* l : labels) {
        auto idx = inst.graph().edge_index(l);
        if (!idx) throw usage_error(std::string("fixture edge not found: ") + l);
        out = out.with(*idx);
    }
    return out;
}

/// The three-edge set used throughout the fixture discussions.
inline Subset fixture_e1(const MstCsp& inst) {
    return edge_set(inst, {"v2-v3", "v3-v4", "v5-v7"});
}

/// The eight-edge set used throughout the fixture discussions.
inline Subset fixture_e2(const MstCsp& inst) {
    return edge_set(inst,
                    {"v1-v6", "v1-v7", "v5-v6", "v6-v7", "v1-v4", "v4-v5", "v1-v5", "v2-v3"});
}

} // namespace settol::testing
