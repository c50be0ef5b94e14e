#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "coalview/msc.hpp"

namespace coalview {

struct RandomParams {
    std::size_t species = 3;
    std::size_t genes = 6;
    std::uint64_t seed = 1;
    /// Gene heights on a grid of 1/grid; a coarse grid makes equal heights
    /// and coincident segments common.
    std::int64_t grid = 1000;
    /// Attach population sizes drawn from 1..spread (1 = all equal).
    std::int64_t population_spread = 1;
};

namespace detail {

inline std::string species_name(std::size_t i) {
    if (i < 26) return std::string(1, static_cast<char>('A' + i));
    return "S" + std::to_string(i);
}

inline std::string gene_name(std::size_t species, std::size_t k) {
    if (species < 26) return std::string(1, static_cast<char>('a' + species)) + std::to_string(k);
    return "s" + std::to_string(species) + "_" + std::to_string(k);
}

inline std::uint64_t uniform(std::mt19937_64& g, std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(g); }

/// Random species tree with the i-th merge at height i; children are
/// ordered randomly so the default leaf order is random too.
inline PhyloTree random_species_tree(std::size_t n, std::mt19937_64& g, std::int64_t spread) {
    if (n == 0 || n > 26) throw std::invalid_argument("generators support 1 to 26 species");
    TreeBuilder b;
    std::vector<NodeId> live;
    for (std::size_t i = 0; i < n; ++i) live.push_back(b.leaf(species_name(i)));
    std::int64_t h = 0;
    while (live.size() > 1) {
        const std::size_t i = uniform(g, live.size());
        NodeId x = live[i];
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
        const std::size_t j = uniform(g, live.size());
        NodeId y = live[j];
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(j));
        live.push_back(b.join({x, y}, ++h));
    }
    if (n == 1) b.join({live[0]}, 1);
    auto t = std::move(b).build();
    auto nodes = t.nodes();
    for (NodeId v = 0; v < nodes.size(); ++v) {
        if (!owns_branch(t, v)) continue;
        nodes[v].pop.top = nodes[v].pop.bottom = Rational(1 + static_cast<std::int64_t>(uniform(g, spread)));
    }
    return PhyloTree(std::move(nodes), t.root());
}

/// Gene counts per species: at least one each, the rest spread randomly.
inline std::vector<std::size_t> gene_counts(std::size_t species, std::size_t genes, std::mt19937_64& g) {
    if (genes < species) throw std::invalid_argument("need at least one gene leaf per species");
    std::vector<std::size_t> c(species, 1);
    for (std::size_t i = species; i < genes; ++i) ++c[uniform(g, species)];
    return c;
}

}  // namespace detail

/// Random MSC instance from a censored-coalescent style process: lineages
/// coalesce pairwise inside each species branch and the survivors move up
/// into the parent branch; the root branch coalesces everything.
inline MSCInstance random_instance(const RandomParams& params) {
    std::mt19937_64 g(params.seed);
    PhyloTree S = detail::random_species_tree(params.species, g, params.population_spread);
    const auto counts = detail::gene_counts(params.species, params.genes, g);

    TreeBuilder b;
    std::vector<NodeId> phi_of_leaf;
    std::vector<std::vector<NodeId>> lineages(S.size());
    for (NodeId s : S.leaves()) {
        const std::size_t idx = static_cast<std::size_t>(S.label(s)[0] - 'A');
        for (std::size_t k = 1; k <= counts[idx]; ++k) {
            lineages[s].push_back(b.leaf(detail::gene_name(idx, k)));
            phi_of_leaf.push_back(s);
        }
    }
    const std::int64_t grid = params.grid;
    for (NodeId s : S.postorder()) {
        if (!owns_branch(S, s)) continue;
        auto& live = lineages[s];
        for (NodeId c : S.children(s)) live.insert(live.end(), lineages[c].begin(), lineages[c].end());
        const bool is_top = !S.parent(s) || !owns_branch(S, *S.parent(s));
        const Rational lo = S.height(s);
        const Rational span = is_top ? Rational(1) : S.height(*S.parent(s)) - lo;
        const std::size_t merges = is_top ? live.size() - 1 : detail::uniform(g, live.size());
        std::vector<std::int64_t> ticks;
        for (std::size_t i = 0; i < merges; ++i) ticks.push_back(1 + static_cast<std::int64_t>(detail::uniform(g, grid - 1)));
        std::sort(ticks.begin(), ticks.end());
        Rational last = -1;
        for (std::int64_t t : ticks) {
            Rational h = lo + span * Rational(t, grid);
            if (h <= last) h = last + span / Rational(grid * 1000);  // keep a chain of merges increasing
            last = h;
            const std::size_t i = detail::uniform(g, live.size());
            const NodeId x = live[i];
            live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
            const std::size_t j = detail::uniform(g, live.size());
            const NodeId y = live[j];
            live.erase(live.begin() + static_cast<std::ptrdiff_t>(j));
            live.push_back(b.join({x, y}, h));
        }
        if (!is_top) continue;
        if (S.parent(s)) {
            // out-degree-1 species root: give the gene tree one as well
            b.join({live[0]}, max(S.height(*S.parent(s)), b.at(live[0]).height + 1));
        }
    }
    PhyloTree T = std::move(b).build();
    std::vector<NodeId> phi(T.size(), 0);
    for (std::size_t i = 0; i < phi_of_leaf.size(); ++i) phi[i] = phi_of_leaf[i];
    return MSCInstance(std::move(S), std::move(T), std::move(phi));
}

/// Instance built from a crossing-free drawing together with the species
/// order of that drawing: adjacent lineages of the current left-to-right
/// sequence are merged at increasing heights. The gene tree's child order
/// is shuffled afterwards so the drawing is not recoverable from it.
struct PlanarInstance {
    MSCInstance instance;
    Embedding drawing;
};

inline PlanarInstance planar_instance(const RandomParams& params) {
    std::mt19937_64 g(params.seed);
    PhyloTree S = detail::random_species_tree(params.species, g, params.population_spread);
    const auto counts = detail::gene_counts(params.species, params.genes, g);
    const auto species_order = S.clade(S.root());

    struct Lineage {
        NodeId node;
        NodeId mrca;  // species MRCA
    };
    TreeBuilder b;
    std::vector<NodeId> phi_of_leaf;
    std::vector<Lineage> live;
    std::vector<NodeId> gene_order;
    for (NodeId s : species_order) {
        const std::size_t idx = static_cast<std::size_t>(S.label(s)[0] - 'A');
        for (std::size_t k = 1; k <= counts[idx]; ++k) {
            const NodeId l = b.leaf(detail::gene_name(idx, k));
            phi_of_leaf.push_back(s);
            gene_order.push_back(l);
            live.push_back({l, s});
        }
    }
    const std::int64_t grid = params.grid;
    Rational now = 0;
    while (live.size() > 1) {
        const std::size_t i = detail::uniform(g, live.size() - 1);
        const NodeId m = S.lca(live[i].mrca, live[i + 1].mrca);
        const Rational floor = max(now, S.height(m));
        const Rational h = floor + Rational(1 + static_cast<std::int64_t>(detail::uniform(g, grid / 2)), grid);
        now = h;
        const bool swap = detail::uniform(g, 2) == 1;
        const NodeId a = live[i].node, c = live[i + 1].node;
        const NodeId u = swap ? b.join({c, a}, h) : b.join({a, c}, h);
        live[i] = {u, m};
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
    if (!owns_branch(S, S.root())) {
        const Rational top = max(S.height(S.root()), now + Rational(1, grid));
        b.join({live[0].node}, top);
    }
    PhyloTree T = std::move(b).build();
    std::vector<NodeId> phi(T.size(), 0);
    for (std::size_t i = 0; i < phi_of_leaf.size(); ++i) phi[i] = phi_of_leaf[i];
    MSCInstance inst(std::move(S), std::move(T), std::move(phi));
    return {std::move(inst), {species_order, gene_order}};
}

/// One gene leaf per species and a gene tree with the species topology,
/// each gene vertex slightly above its species node.
inline MSCInstance concordant_instance(const RandomParams& params) {
    std::mt19937_64 g(params.seed);
    PhyloTree S = detail::random_species_tree(params.species, g, params.population_spread);
    TreeBuilder b;
    std::vector<NodeId> image(S.size());
    for (NodeId s : S.postorder()) {
        if (S.is_leaf(s)) {
            image[s] = b.leaf(detail::gene_name(static_cast<std::size_t>(S.label(s)[0] - 'A'), 1));
            continue;
        }
        std::vector<NodeId> ch;
        for (NodeId c : S.children(s)) ch.push_back(image[c]);
        if (detail::uniform(g, 2) == 1) std::reverse(ch.begin(), ch.end());
        image[s] = b.join(ch, S.height(s) + Rational(1, 2));
    }
    PhyloTree T = std::move(b).build();
    std::vector<NodeId> phi(T.size(), 0);
    for (NodeId s : S.leaves()) phi[image[s]] = s;
    return MSCInstance(std::move(S), std::move(T), std::move(phi));
}

/// Uniformly random rotations of both trees, gene leaves grouped into
/// species blocks; always passes validate_order.
inline Embedding random_embedding(const MSCInstance& inst, std::mt19937_64& g) {
    const auto& S = inst.species();
    const auto& T = inst.gene();
    Rotations rs(S.size(), false), rt(T.size(), false);
    for (NodeId v = 0; v < S.size(); ++v) rs[v] = detail::uniform(g, 2) == 1;
    for (NodeId v = 0; v < T.size(); ++v) rt[v] = detail::uniform(g, 2) == 1;
    Embedding e;
    e.species_order = leaf_order_from_rotations(S, rs);
    const auto genes = leaf_order_from_rotations(T, rt);
    for (NodeId s : e.species_order)
        for (NodeId l : genes)
            if (inst.phi(l) == s) e.gene_order.push_back(l);
    return e;
}

}  // namespace coalview
