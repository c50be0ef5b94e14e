#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "coalview/exact.hpp"
#include "coalview/heuristics.hpp"
#include "coalview/msc.hpp"

namespace coalview {

struct PlanarityDigraph {
    enum class Kind { Gene, Species, Spacer, Sink };
    struct Vertex {
        Kind kind;
        NodeId ref;  // gene vertex, species leaf, or spacer index
        std::string name;
    };
    std::vector<Vertex> vertices;
    std::vector<std::pair<std::size_t, std::size_t>> arcs;
    std::size_t source = 0;
    std::size_t sink = 0;

    std::vector<std::size_t> in_degree() const {
        std::vector<std::size_t> d(vertices.size(), 0);
        for (const auto& [a, b] : arcs) ++d[b];
        return d;
    }
    std::vector<std::size_t> out_degree() const {
        std::vector<std::size_t> d(vertices.size(), 0);
        for (const auto& [a, b] : arcs) ++d[a];
        return d;
    }
    bool acyclic() const {
        auto indeg = in_degree();
        std::vector<std::vector<std::size_t>> out(vertices.size());
        for (const auto& [a, b] : arcs) out[a].push_back(b);
        std::vector<std::size_t> ready;
        for (std::size_t v = 0; v < vertices.size(); ++v)
            if (indeg[v] == 0) ready.push_back(v);
        std::size_t seen = 0;
        while (!ready.empty()) {
            const auto v = ready.back();
            ready.pop_back();
            ++seen;
            for (auto w : out[v])
                if (--indeg[w] == 0) ready.push_back(w);
        }
        return seen == vertices.size();
    }
};

/// Gene tree with the leaves of each species merged into one vertex and a
/// common sink below them; arcs point away from the gene root. With a fixed
/// species order a spacer u_i below each adjacent pair pins their order.
inline PlanarityDigraph build_planarity_digraph(const MSCInstance& inst,
                                                const std::optional<std::vector<NodeId>>& fixed_species_order = {}) {
    const auto& S = inst.species();
    const auto& T = inst.gene();
    if (fixed_species_order && (!leaf_positions(S, *fixed_species_order) || !is_rotation_order(S, *fixed_species_order)))
        throw EmbeddingError("species order is not a realizable permutation of the species");
    const auto order = fixed_species_order ? *fixed_species_order : S.clade(S.root());

    PlanarityDigraph g;
    std::vector<std::size_t> of_gene(T.size(), 0), of_species(S.size(), 0);
    for (NodeId v : T.subtree(T.root())) {
        if (T.is_leaf(v)) continue;
        of_gene[v] = g.vertices.size();
        g.vertices.push_back({PlanarityDigraph::Kind::Gene, v, "g" + std::to_string(v)});
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        of_species[order[i]] = g.vertices.size();
        g.vertices.push_back({PlanarityDigraph::Kind::Species, order[i], "v" + std::to_string(i + 1)});
    }
    g.sink = g.vertices.size();
    g.vertices.push_back({PlanarityDigraph::Kind::Sink, 0, "t"});
    g.source = of_gene[T.root()];

    auto target = [&](NodeId c) { return T.is_leaf(c) ? of_species[inst.phi(c)] : of_gene[c]; };
    for (NodeId v : T.subtree(T.root()))
        if (!T.is_leaf(v))
            for (NodeId c : T.children(v)) g.arcs.emplace_back(of_gene[v], target(c));
    for (NodeId s : order) g.arcs.emplace_back(of_species[s], g.sink);
    if (fixed_species_order) {
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            const std::size_t u = g.vertices.size();
            g.vertices.push_back({PlanarityDigraph::Kind::Spacer, static_cast<NodeId>(i + 1), "u" + std::to_string(i + 1)});
            g.arcs.emplace_back(of_species[order[i]], u);
            g.arcs.emplace_back(of_species[order[i + 1]], u);
            g.arcs.emplace_back(u, g.sink);
        }
    }
    return g;
}

inline std::string planarity_dot(const MSCInstance& inst, const PlanarityDigraph& g) {
    std::ostringstream out;
    out << "digraph planarity {\n  rankdir=TB;\n";
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        const auto& v = g.vertices[i];
        std::string label = v.name;
        if (v.kind == PlanarityDigraph::Kind::Species) label += " " + inst.species().label(v.ref);
        else if (v.kind == PlanarityDigraph::Kind::Gene && !inst.gene().label(v.ref).empty())
            label += " " + inst.gene().label(v.ref);
        out << "  " << v.name << " [label=\"" << label << "\"";
        if (i == g.source) out << ", shape=doublecircle";
        else if (i == g.sink) out << ", shape=box";
        else if (v.kind == PlanarityDigraph::Kind::Spacer) out << ", shape=diamond";
        out << "];\n";
    }
    for (const auto& [a, b] : g.arcs) out << "  " << g.vertices[a].name << " -> " << g.vertices[b].name << ";\n";
    out << "}\n";
    return out.str();
}

struct PlanarityResult {
    bool planar = false;
    /// The heuristics found no zero-crossing drawing and the answer came
    /// from the exact solver.
    bool via_exact = false;
    /// False only when the exact fallback ran out of budget.
    bool certified = true;
    Embedding witness;
};

/// A zero-crossing heuristic drawing proves planarity. Otherwise the exact
/// solver decides, since the heuristics can miss plane drawings.
inline PlanarityResult planarity(const MSCInstance& inst, const std::optional<std::vector<NodeId>>& fixed_species_order = {},
                                 std::uint64_t budget = 50'000'000) {
    const auto& S = inst.species();
    PlanarityResult r;
    std::vector<Embedding> tries;
    if (fixed_species_order) {
        tries.push_back(ftt_heuristic(inst, *fixed_species_order));
    } else {
        tries.push_back(vtt_heuristic(inst, Rotations(S.size(), false)));
        tries.push_back(ftt_heuristic(inst, S.clade(S.root())));
    }
    for (const auto& e : tries)
        if (count_crossings(inst, e).count == 0) {
            r.planar = true;
            r.witness = e;
            return r;
        }
    const auto ex = solve_exact(inst, fixed_species_order, budget);
    r.via_exact = true;
    r.certified = ex.certified;
    r.planar = ex.crossings == 0;
    r.witness = ex.embedding;
    return r;
}

inline bool is_planar(const MSCInstance& inst, const std::optional<std::vector<NodeId>>& fixed_species_order = {}) {
    return planarity(inst, fixed_species_order).planar;
}

}  // namespace coalview
