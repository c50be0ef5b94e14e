#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "coalview/crossings.hpp"
#include "coalview/msc.hpp"

namespace coalview {

namespace detail {

/// Left and right stacks per species plus a central bucket. Leaves on a
/// stack have final positions relative to their species block, so a
/// species subtree can be mirrored by swapping the stacks of its leaves.
class StackEngine {
public:
    StackEngine(const MSCInstance& inst, Rotations rot) : inst_(inst), S_(inst.species()), T_(inst.gene()) {
        rot.resize(S_.size(), false);
        rot_ = std::move(rot);
        side_.assign(T_.size(), Side::Central);
        index_.assign(T_.size(), 0);
        fixed_.assign(T_.size(), false);
        lstack_.assign(S_.size(), {});
        rstack_.assign(S_.size(), {});
        refresh_species_order();
    }

    /// Species order supplied directly (fixed mode).
    StackEngine(const MSCInstance& inst, const std::vector<NodeId>& species_order)
        : StackEngine(inst, rotations_from_order(inst.species(), species_order)) {}

    const Rotations& rotations() const { return rot_; }
    const std::vector<NodeId>& species_order() const { return species_order_; }
    std::size_t species_position(NodeId s) const { return species_pos_[s]; }

    /// Processes one binary gene vertex (cases F1 to F4).
    void handle(NodeId v) {
        const NodeId x = T_.children(v)[0];
        const NodeId y = T_.children(v)[1];
        if (!fixed_[x] && !fixed_[y]) {
            if (inst_.single_species(v)) return;  // F1
            NodeId sx = inst_.minimal_species_subtree(x);
            NodeId sy = inst_.minimal_species_subtree(y);
            NodeId a = x, b = y;
            if (species_pos_[sx] > species_pos_[sy]) std::swap(a, b), std::swap(sx, sy);
            push(a, sx, Side::Right, /*minimize=*/false);  // F2
            push(b, sy, Side::Left, /*minimize=*/true);
        } else if (!fixed_[x] || !fixed_[y]) {
            const NodeId loose = fixed_[x] ? y : x;
            const NodeId anchor = fixed_[x] ? x : y;
            place_beside(loose, x_of(anchor));  // F3
        }
        fixed_[v] = fixed_[x] && fixed_[y];  // F4 when both were fixed
    }

    /// Mirrors the species subtree below u together with every gene leaf
    /// already stacked inside it.
    void mirror(NodeId u) {
        for (NodeId s : S_.clade(u)) {
            std::swap(lstack_[s], rstack_[s]);
            for (NodeId l : lstack_[s]) side_[l] = Side::Left;
            for (NodeId l : rstack_[s]) side_[l] = Side::Right;
        }
        std::vector<NodeId> stack{u};
        while (!stack.empty()) {
            const NodeId w = stack.back();
            stack.pop_back();
            if (S_.is_leaf(w)) continue;
            rot_[w] = !rot_[w];
            for (NodeId c : S_.children(w)) stack.push_back(c);
        }
        refresh_species_order();
    }

    Embedding result() const {
        std::vector<std::vector<NodeId>> central(S_.size());
        std::vector<NodeId> stack{T_.root()};
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            if (!fixed_[v] && inst_.single_species(v)) {
                auto& bucket = central[inst_.minimal_species_subtree(v)];
                for (NodeId l : T_.clade(v)) bucket.push_back(l);
                continue;
            }
            const auto& ch = T_.children(v);
            for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
        }
        Embedding e;
        e.species_order = species_order_;
        for (NodeId s : species_order_) {
            e.gene_order.insert(e.gene_order.end(), lstack_[s].begin(), lstack_[s].end());
            e.gene_order.insert(e.gene_order.end(), central[s].begin(), central[s].end());
            e.gene_order.insert(e.gene_order.end(), rstack_[s].rbegin(), rstack_[s].rend());
        }
        return e;
    }

private:
    enum class Side : std::uint8_t { Central, Left, Right };

    void refresh_species_order() {
        species_order_ = leaf_order_from_rotations(S_, rot_);
        species_pos_.assign(S_.size(), 0);
        block_start_.assign(S_.size(), 0);
        std::int64_t cursor = 0;
        for (std::size_t i = 0; i < species_order_.size(); ++i) {
            const NodeId s = species_order_[i];
            species_pos_[s] = i;
            block_start_[s] = cursor;
            cursor += static_cast<std::int64_t>(inst_.preimage(s).size());
        }
        for (NodeId v : S_.postorder()) {
            if (S_.is_leaf(v)) continue;
            species_pos_[v] = SIZE_MAX;
            for (NodeId c : S_.children(v)) species_pos_[v] = std::min(species_pos_[v], species_pos_[c]);
        }
    }

    std::int64_t block_lo(NodeId s) const { return 2 * block_start_[s]; }
    std::int64_t block_hi(NodeId s) const {
        return 2 * (block_start_[s] + static_cast<std::int64_t>(inst_.preimage(s).size()));
    }

    Rational x_of(NodeId v) const {
        if (T_.is_leaf(v)) {
            const NodeId s = inst_.phi(v);
            const auto i = static_cast<std::int64_t>(index_[v]);
            if (side_[v] == Side::Left) return Rational(block_lo(s) + 2 * i + 1);
            return Rational(block_hi(s) - 2 * i - 1);
        }
        const auto& ch = T_.children(v);
        if (ch.size() == 1) return x_of(ch[0]);
        return (x_of(ch[0]) + x_of(ch[1])) / 2;
    }

    /// F3: the stack side follows the fixed sibling at x-coordinate `anchor`.
    void place_beside(NodeId loose, const Rational& anchor) {
        const NodeId s = inst_.minimal_species_subtree(loose);
        const auto n = static_cast<std::int64_t>(T_.leaf_count(loose));
        const Rational left_top(block_lo(s) + 2 * static_cast<std::int64_t>(lstack_[s].size()));
        const Rational right_top(block_hi(s) - 2 * static_cast<std::int64_t>(rstack_[s].size()));
        Side side;
        if (anchor <= left_top) side = Side::Left;
        else if (anchor >= right_top) side = Side::Right;
        else side = (anchor - left_top) <= (right_top - anchor) ? Side::Left : Side::Right;
        const Rational landing_center = side == Side::Left ? left_top + Rational(n) : right_top - Rational(n);
        push(loose, s, side, anchor < landing_center);
    }

    /// Leaves of T(v) left to right in a planar order that puts v as far
    /// left as possible (or as far right, reversed).
    void planar_sequence(NodeId v, std::vector<NodeId>& out) const {
        if (T_.is_leaf(v)) {
            out.push_back(v);
            return;
        }
        auto ch = T_.children(v);
        if (ch.size() == 2 && T_.leaf_count(ch[1]) < T_.leaf_count(ch[0])) std::swap(ch[0], ch[1]);
        for (NodeId c : ch) planar_sequence(c, out);
    }

    void push(NodeId v, NodeId s, Side side, bool minimize) {
        std::vector<NodeId> seq;
        planar_sequence(v, seq);
        if (!minimize) std::reverse(seq.begin(), seq.end());
        auto& stack = side == Side::Left ? lstack_[s] : rstack_[s];
        if (side == Side::Right) std::reverse(seq.begin(), seq.end());
        for (NodeId l : seq) {
            index_[l] = stack.size();
            side_[l] = side;
            stack.push_back(l);
        }
        for (NodeId w : T_.subtree(v)) fixed_[w] = true;
    }

    const MSCInstance& inst_;
    const PhyloTree& S_;
    const PhyloTree& T_;
    Rotations rot_;
    std::vector<NodeId> species_order_;
    std::vector<std::size_t> species_pos_;
    std::vector<std::int64_t> block_start_;
    std::vector<Side> side_;
    std::vector<std::size_t> index_;
    std::vector<bool> fixed_;
    std::vector<std::vector<NodeId>> lstack_;
    std::vector<std::vector<NodeId>> rstack_;
};

/// Binary gene vertices by increasing height, ties by id.
inline std::vector<NodeId> processing_order(const PhyloTree& T) {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < T.size(); ++v)
        if (T.is_binary(v)) out.push_back(v);
    std::stable_sort(out.begin(), out.end(), [&](NodeId a, NodeId b) { return T.height(a) < T.height(b); });
    return out;
}

}  // namespace detail

/// Greedy leaf placement for a fixed species order: inner gene vertices are
/// handled bottom-up and single-species subtrees are pushed onto the left or
/// right stack of their species once they join another species.
inline Embedding ftt_heuristic(const MSCInstance& inst, const std::vector<NodeId>& species_order) {
    if (!leaf_positions(inst.species(), species_order) || !is_rotation_order(inst.species(), species_order))
        throw EmbeddingError("species order is not a realizable permutation of the species");
    detail::StackEngine engine(inst, species_order);
    for (NodeId v : detail::processing_order(inst.gene())) engine.handle(v);
    return engine.result();
}

namespace detail {

/// Sets the unset nodes strictly between m and its ancestor w so that m lies
/// in their right (or left) subtree. Nodes are handled top-down because
/// setting a node mirrors everything below it.
inline void face(StackEngine& engine, std::vector<bool>& set, const PhyloTree& S, NodeId m, NodeId w,
                 bool want_right) {
    std::vector<std::pair<NodeId, NodeId>> path;  // (node, child towards m)
    for (NodeId c = m; *S.parent(c) != w; c = *S.parent(c)) path.emplace_back(*S.parent(c), c);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        const auto [u, c] = *it;
        if (set[u]) continue;
        const auto& ch = S.children(u);
        const NodeId right = engine.rotations()[u] ? ch[0] : ch[1];
        if ((right == c) != want_right) engine.mirror(u);
        set[u] = true;
    }
}

inline bool right_of_parent(const StackEngine& engine, const PhyloTree& S, NodeId child) {
    const NodeId u = *S.parent(child);
    const NodeId other = S.children(u)[0] == child ? S.children(u)[1] : S.children(u)[0];
    return engine.species_position(child) > engine.species_position(other);
}

/// V2 when the species of T(inner) all lie below `low`, a proper
/// descendant of the minimal species subtree of T(outer).
inline bool try_nested(StackEngine& engine, std::vector<bool>& set, const MSCInstance& inst, NodeId outer,
                       NodeId low) {
    const auto& S = inst.species();
    const auto& T = inst.gene();
    std::vector<bool> has(S.size(), false);
    for (NodeId l : T.clade(outer)) has[inst.phi(l)] = true;
    for (NodeId s : S.clade(low))
        if (has[s]) return false;
    auto touches = [&](NodeId u) {
        for (NodeId s : S.clade(u))
            if (has[s]) return true;
        return false;
    };
    NodeId c = low;
    while (!touches(*S.parent(c))) c = *S.parent(c);
    const NodeId w = *S.parent(c);
    face(engine, set, S, low, w, !right_of_parent(engine, S, c));
    return true;
}

inline void resolve_rotations(StackEngine& engine, std::vector<bool>& set, const MSCInstance& inst, NodeId v) {
    const auto& S = inst.species();
    const NodeId x = inst.gene().children(v)[0];
    const NodeId y = inst.gene().children(v)[1];
    const NodeId mx = inst.minimal_species_subtree(x);
    const NodeId my = inst.minimal_species_subtree(y);
    if (!S.is_ancestor(mx, my) && !S.is_ancestor(my, mx)) {  // V1
        const NodeId w = S.lca(mx, my);
        const bool x_left = engine.species_position(mx) < engine.species_position(my);
        face(engine, set, S, mx, w, x_left);
        face(engine, set, S, my, w, !x_left);
        return;
    }
    if (mx != my && S.is_ancestor(mx, my) && try_nested(engine, set, inst, x, my)) return;  // V2
    if (mx != my && S.is_ancestor(my, mx) && try_nested(engine, set, inst, y, mx)) return;
    // V3: nothing to set
}

}  // namespace detail

/// Greedy placement that also chooses species rotations: before each gene
/// vertex is placed, unset species nodes are rotated so that the species of
/// its two child subtrees face each other. Nodes never set keep their
/// initial bit relative to their parent's frame.
inline Embedding vtt_heuristic(const MSCInstance& inst, const Rotations& initial_rotations) {
    detail::StackEngine engine(inst, initial_rotations);
    std::vector<bool> set(inst.species().size(), false);
    for (NodeId v : detail::processing_order(inst.gene())) {
        if (!inst.single_species(v)) detail::resolve_rotations(engine, set, inst, v);
        engine.handle(v);
    }
    return engine.result();
}

// ---------------------------------------------------------------------------
// Restarts

enum class HeuristicMode { Ftt, Vtt, Both };

inline std::string mode_tag(HeuristicMode m) {
    switch (m) {
        case HeuristicMode::Ftt: return "ftt";
        case HeuristicMode::Vtt: return "vtt";
        default: return "both";
    }
}

struct RestartRun {
    std::size_t restart = 0;
    std::string mode;
    std::size_t crossings = 0;
};

struct RestartResult {
    Embedding best;
    std::size_t best_crossings = 0;
    std::string best_mode;
    std::size_t best_restart = 0;
    std::vector<RestartRun> runs;
};

/// Rotation bits for a restart: all false (the input order) for restart 0,
/// independent uniform bits otherwise.
inline Rotations restart_rotations(const PhyloTree& S, std::uint64_t seed, std::size_t restart) {
    Rotations rot(S.size(), false);
    if (restart == 0) return rot;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 gen(seq);
    for (NodeId v = 0; v < S.size(); ++v)
        if (S.is_binary(v)) rot[v] = (gen() >> 63) != 0;
    return rot;
}

/// Runs the chosen heuristics from `restarts` start embeddings and keeps the
/// one with the fewest crossings, ties going to the earliest run. Within a
/// restart FTT runs before VTT.
inline RestartResult multi_restart(const MSCInstance& inst, HeuristicMode mode, std::size_t restarts,
                                   std::uint64_t seed) {
    if (restarts == 0) throw std::invalid_argument("restarts must be positive");
    RestartResult res;
    bool have = false;
    auto consider = [&](std::size_t r, const std::string& tag, Embedding e) {
        const std::size_t n = count_crossings(inst, e).count;
        res.runs.push_back({r, tag, n});
        if (!have || n < res.best_crossings) {
            have = true;
            res.best = std::move(e);
            res.best_crossings = n;
            res.best_mode = tag;
            res.best_restart = r;
        }
    };
    for (std::size_t r = 0; r < restarts; ++r) {
        const Rotations rot = restart_rotations(inst.species(), seed, r);
        if (mode != HeuristicMode::Vtt)
            consider(r, "ftt", ftt_heuristic(inst, leaf_order_from_rotations(inst.species(), rot)));
        if (mode != HeuristicMode::Ftt) consider(r, "vtt", vtt_heuristic(inst, rot));
    }
    return res;
}

}  // namespace coalview
