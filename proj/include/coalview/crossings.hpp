#pragma once

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "coalview/msc.hpp"

namespace coalview {

class EmbeddingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Crossing pairs between the horizontal segment through `horizontal` and
/// the vertical segment ending at `vertical`.
struct CrossingReport {
    std::size_t count = 0;
    std::vector<std::pair<NodeId, NodeId>> pairs;  // (horizontal owner, vertical owner)
};

/// Rectangular x-coordinates: the i-th leaf of the gene order at 2i-1,
/// inner vertices midway between their children.
inline std::vector<Rational> gene_x_coordinates(const PhyloTree& T, const std::vector<NodeId>& gene_order) {
    std::vector<Rational> x(T.size());
    for (std::size_t i = 0; i < gene_order.size(); ++i) x[gene_order[i]] = Rational(2 * static_cast<std::int64_t>(i) + 1);
    for (NodeId v : T.postorder()) {
        if (T.is_leaf(v)) continue;
        const auto& ch = T.children(v);
        x[v] = ch.size() == 1 ? x[ch[0]] : (x[ch[0]] + x[ch[1]]) / 2;
    }
    return x;
}

/// Crossings of a gene tree drawn with the given x-coordinates. A pair
/// (u, v) crosses iff y(v) < y(u) < y(parent(v)) and x(v) lies strictly
/// between the x-coordinates of u's children; touching never counts.
/// Pairs come out sorted.
inline CrossingReport count_crossings_at(const PhyloTree& T, const std::vector<Rational>& x) {
    // sweep upward; a vertical is live on the open interval (y(v), y(parent))
    std::vector<NodeId> by_bottom, by_top, horizontals;
    for (NodeId v = 0; v < T.size(); ++v) {
        if (T.parent(v)) {
            by_bottom.push_back(v);
            by_top.push_back(v);
        }
        if (T.is_binary(v)) horizontals.push_back(v);
    }
    auto top = [&](NodeId v) -> const Rational& { return T.height(*T.parent(v)); };
    std::sort(by_bottom.begin(), by_bottom.end(), [&](NodeId a, NodeId b) { return T.height(a) < T.height(b); });
    std::sort(by_top.begin(), by_top.end(), [&](NodeId a, NodeId b) { return top(a) < top(b); });
    std::sort(horizontals.begin(), horizontals.end(), [&](NodeId a, NodeId b) { return T.height(a) < T.height(b); });

    CrossingReport rep;
    std::set<std::pair<Rational, NodeId>> live;
    std::size_t ib = 0, it = 0;
    for (std::size_t ih = 0; ih < horizontals.size();) {
        const Rational y = T.height(horizontals[ih]);
        while (ib < by_bottom.size() && T.height(by_bottom[ib]) < y) {
            live.emplace(x[by_bottom[ib]], by_bottom[ib]);
            ++ib;
        }
        while (it < by_top.size() && top(by_top[it]) <= y) {
            live.erase({x[by_top[it]], by_top[it]});
            ++it;
        }
        for (; ih < horizontals.size() && T.height(horizontals[ih]) == y; ++ih) {
            const NodeId u = horizontals[ih];
            const Rational& a = x[T.children(u)[0]];
            const Rational& b = x[T.children(u)[1]];
            const Rational& lo = a < b ? a : b;
            const Rational& hi = a < b ? b : a;
            for (auto p = live.upper_bound({lo, std::numeric_limits<NodeId>::max()}); p != live.end() && p->first < hi; ++p)
                rep.pairs.emplace_back(u, p->second);
        }
    }
    std::sort(rep.pairs.begin(), rep.pairs.end());
    rep.count = rep.pairs.size();
    return rep;
}

inline CrossingReport count_crossings(const MSCInstance& inst, const Embedding& emb) {
    if (const auto why = order_violation(inst, emb)) throw EmbeddingError("invalid embedding: " + *why);
    return count_crossings_at(inst.gene(), gene_x_coordinates(inst.gene(), emb.gene_order));
}

/// Embedding mirrored left-to-right.
inline Embedding mirrored(const Embedding& e) {
    return {std::vector<NodeId>(e.species_order.rbegin(), e.species_order.rend()),
            std::vector<NodeId>(e.gene_order.rbegin(), e.gene_order.rend())};
}

}  // namespace coalview
