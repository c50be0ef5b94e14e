#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coalview/crossings.hpp"
#include "coalview/msc.hpp"

namespace coalview {

/// Gadget sizes standing in for n^3, n^4, n^5, n^7, n^8 and n^10.
struct GadgetScale {
    std::int64_t e3 = 27, e4 = 81, e5 = 243, e7 = 2187, e8 = 6561, e10 = 59049;

    static GadgetScale powers(std::int64_t n) {
        auto p = [n](int k) {
            std::int64_t r = 1;
            for (int i = 0; i < k; ++i) r *= n;
            return r;
        };
        return {p(3), p(4), p(5), p(7), p(8), p(10)};
    }
    static GadgetScale reduced() { return {8, 16, 32, 64, 256, 512}; }

    /// "default", "reduced", "powers:N", or six comma-separated values.
    static GadgetScale parse(const std::string& text) {
        if (text == "default") return {};
        if (text == "reduced") return reduced();
        GadgetScale s;
        try {
            if (text.rfind("powers:", 0) == 0) {
                s = powers(std::stoll(text.substr(7)));
            } else {
                std::vector<std::int64_t> v;
                std::istringstream in(text);
                std::string part;
                while (std::getline(in, part, ',')) v.push_back(std::stoll(part));
                if (v.size() != 6) throw std::invalid_argument("need six values");
                s = {v[0], v[1], v[2], v[3], v[4], v[5]};
            }
        } catch (const std::logic_error&) {
            throw std::invalid_argument("bad gadget scale '" + text + "'");
        }
        s.check();
        return s;
    }

    void check() const {
        if (!(0 < e3 && e3 < e4 && e4 < e5 && e5 < e7 && e7 < e8 && e8 < e10))
            throw std::invalid_argument("gadget exponents must be positive and strictly increasing");
    }
    friend bool operator==(const GadgetScale&, const GadgetScale&) = default;
};

struct Graph {
    std::vector<std::string> labels;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // i < j, sorted

    std::size_t n() const { return labels.size(); }
    std::size_t m() const { return edges.size(); }

    static Graph make(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges) {
        Graph g;
        for (std::size_t i = 1; i <= n; ++i) g.labels.push_back(std::to_string(i));
        for (auto& [a, b] : edges) {
            if (a == b || a >= n || b >= n) throw std::invalid_argument("edge endpoints must be distinct vertices");
            if (a > b) std::swap(a, b);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        g.edges = std::move(edges);
        return g;
    }
    static Graph complete(std::size_t n) {
        std::vector<std::pair<std::size_t, std::size_t>> e;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
        return make(n, e);
    }
    static Graph path(std::size_t n) {
        std::vector<std::pair<std::size_t, std::size_t>> e;
        for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
        return make(n, e);
    }

    /// Edge list text, one `u v` pair per line; blank lines and lines
    /// starting with '#' are skipped. Vertices are ordered numerically when
    /// every label is an integer, lexicographically otherwise.
    static Graph parse(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        std::vector<std::pair<std::string, std::string>> raw;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            std::istringstream ls(line);
            std::string a, b, extra;
            if (!(ls >> a >> b) || (ls >> extra))
                throw std::invalid_argument("line " + std::to_string(lineno) + ": expected two vertex labels");
            if (a == b) throw std::invalid_argument("line " + std::to_string(lineno) + ": self-loop on " + a);
            raw.emplace_back(a, b);
        }
        std::set<std::string> names;
        for (const auto& [a, b] : raw) names.insert({a, b});
        std::vector<std::string> labels(names.begin(), names.end());
        const bool numeric = std::all_of(labels.begin(), labels.end(), [](const std::string& s) {
            return !s.empty() && s.size() < 18 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
        });
        if (numeric)
            std::sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) { return std::stoll(a) < std::stoll(b); });
        std::map<std::string, std::size_t> id;
        for (std::size_t i = 0; i < labels.size(); ++i) id[labels[i]] = i;
        std::vector<std::pair<std::size_t, std::size_t>> e;
        for (const auto& [a, b] : raw) e.emplace_back(id[a], id[b]);
        Graph g = make(labels.size(), e);
        g.labels = labels;
        return g;
    }

    /// Number of edges between the two sides; side[i] is true for B.
    std::size_t cut(const std::vector<bool>& side) const {
        std::size_t c = 0;
        for (const auto& [a, b] : edges) c += side.at(a) != side.at(b);
        return c;
    }
};

enum class ExpandMode { Thick, Wide };

namespace detail {

inline std::size_t ceil_log2(std::size_t n) {
    std::size_t d = 0;
    while ((std::size_t{1} << d) < n) ++d;
    return d;
}

/// Balanced full binary tree on `count` leaves named prefix_1, prefix_2, ...
/// from left to right. Thick: inner vertices strictly inside
/// (anchor - eps, anchor), deeper ones lower. Wide: root at eps.
inline NodeId add_full_subtree(TreeBuilder& b, const std::string& prefix, std::size_t count, ExpandMode mode,
                               const Rational& anchor, const Rational& eps) {
    const auto D = static_cast<std::int64_t>(ceil_log2(count));
    std::size_t next = 1;
    auto height = [&](std::int64_t depth) {
        return mode == ExpandMode::Thick ? anchor - eps * Rational(depth + 1, D + 1) : eps * Rational(D - depth, D);
    };
    auto build = [&](auto&& self, std::size_t k, std::int64_t depth) -> NodeId {
        if (k == 1) return b.leaf(prefix + "_" + std::to_string(next++));
        const NodeId l = self(self, (k + 1) / 2, depth + 1);
        const NodeId r = self(self, k / 2, depth + 1);
        return b.join({l, r}, height(depth));
    };
    if (count == 0) throw std::invalid_argument("expanded leaf needs at least one leaf");
    if (count == 1) return b.leaf(prefix);
    return build(build, count, 0);
}

}  // namespace detail

/// Replaces a leaf by a balanced full binary subtree on `count` leaves.
/// Thick mode keeps every new inner vertex within epsilon below the old
/// parent; wide mode puts the new root at height epsilon. New leaves are
/// named <label>_1 .. <label>_count.
inline PhyloTree expand_leaf(const PhyloTree& tree, NodeId leaf, std::size_t count, ExpandMode mode, const Rational& epsilon) {
    if (leaf >= tree.size() || !tree.is_leaf(leaf)) throw std::invalid_argument("expand_leaf needs a leaf");
    if (count == 0) throw std::invalid_argument("expand_leaf needs count >= 1");
    if (count == 1) return tree;
    const auto p = tree.parent(leaf);
    if (!p) throw std::invalid_argument("cannot expand a single-vertex tree");
    const Rational hp = tree.height(*p);
    if (epsilon.sign() <= 0 || !(epsilon < hp))
        throw std::invalid_argument("epsilon must lie strictly between 0 and the parent height " + hp.str());
    if (mode == ExpandMode::Thick)
        for (NodeId c : tree.children(*p))
            if (c != leaf && tree.height(c) > hp - epsilon)
                throw std::invalid_argument("thick subtree would collide with a sibling height");

    TreeBuilder b;
    std::vector<NodeId> id(tree.size());
    for (NodeId v : tree.postorder()) {
        const auto& n = tree.node(v);
        if (v == leaf) {
            id[v] = detail::add_full_subtree(b, n.label, count, mode, hp, epsilon);
        } else if (tree.is_leaf(v)) {
            id[v] = b.leaf(n.label, n.height);
        } else {
            std::vector<NodeId> ch;
            for (NodeId c : n.children) ch.push_back(id[c]);
            id[v] = b.join(ch, n.height, n.label);
        }
        b.at(id[v]).pop = n.pop;
    }
    return std::move(b).build();
}

/// Owner of a gene vertex inside a reduction instance.
struct GadgetTag {
    std::string kind;
    std::size_t index = 0;
    friend bool operator==(const GadgetTag&, const GadgetTag&) = default;
};

struct Reduction {
    MSCInstance instance;
    Graph graph;
    GadgetScale scale;
    bool fixed_order = false;
    std::vector<NodeId> species_order;  // the fixed species order; empty for VTT
    std::size_t cut_target = 0;
    std::int64_t budget = 0;
    /// Crossings of the reference drawing (every vertex in A) beyond its
    /// edge penalties; zero for VTT.
    std::int64_t fixed_cost = 0;
    /// Bound on the lower-order crossings: 2 n^4 for VTT, n^3 (either sign,
    /// relative to the reference drawing) for FTT.
    std::int64_t slack = 0;
    std::vector<GadgetTag> tags;  // per gene vertex
    std::map<std::string, NodeId> unit;  // named gene subtrees used to assemble embeddings

    std::int64_t edge_penalty() const { return fixed_order ? scale.e4 : scale.e5; }
    std::int64_t thick_penalty() const { return fixed_order ? scale.e7 : scale.e8; }

    NodeId species(const std::string& label) const { return *instance.species().find_leaf(label); }
    NodeId gene(const std::string& name) const { return unit.at(name); }
};

namespace detail {

class ReductionBuilder {
public:
    NodeId leaf(const std::string& label, GadgetTag tag, const std::string& species) {
        const NodeId v = b.leaf(label);
        tag_(v, tag);
        phi_.emplace_back(v, species);
        return v;
    }
    NodeId expanded(const std::string& prefix, std::size_t count, ExpandMode mode, const Rational& anchor,
                    const Rational& eps, GadgetTag tag, const std::string& species) {
        const std::size_t before = b.size();
        const NodeId r = add_full_subtree(b, prefix, count, mode, anchor, eps);
        for (std::size_t v = before; v < b.size(); ++v) {
            tag_(static_cast<NodeId>(v), tag);
            if (b.at(static_cast<NodeId>(v)).children.empty()) phi_.emplace_back(static_cast<NodeId>(v), species);
        }
        return r;
    }
    NodeId join(std::vector<NodeId> ch, const Rational& h, GadgetTag tag) {
        const NodeId v = b.join(std::move(ch), h);
        tag_(v, tag);
        return v;
    }

    MSCInstance finish(PhyloTree S, std::vector<GadgetTag>& tags) && {
        PhyloTree T = std::move(b).build();
        std::vector<NodeId> phi(T.size(), 0);
        for (const auto& [v, s] : phi_) phi[v] = *S.find_leaf(s);
        tags = std::move(tags_);
        return MSCInstance(std::move(S), std::move(T), std::move(phi));
    }

    TreeBuilder b;

private:
    void tag_(NodeId v, GadgetTag t) {
        if (tags_.size() <= v) tags_.resize(v + 1);
        tags_[v] = std::move(t);
    }
    std::vector<GadgetTag> tags_;
    std::vector<std::pair<NodeId, std::string>> phi_;
};

/// Caterpillar species tree on the given labels, first two joined lowest.
inline PhyloTree caterpillar(const std::vector<std::string>& labels, const Rational& step) {
    TreeBuilder b;
    NodeId acc = b.leaf(labels.at(0));
    for (std::size_t i = 1; i < labels.size(); ++i)
        acc = b.join({acc, b.leaf(labels[i])}, step * Rational(static_cast<std::int64_t>(i)));
    return std::move(b).build();
}

/// Gene order built species by species from named subtrees; a flipped
/// subtree lists its root's children right to left.
inline std::vector<NodeId> assemble(const PhyloTree& T, const std::vector<std::pair<NodeId, bool>>& units) {
    std::vector<NodeId> out;
    for (const auto& [r, flip] : units) {
        if (!flip || T.is_leaf(r)) {
            const auto c = T.clade(r);
            out.insert(out.end(), c.begin(), c.end());
            continue;
        }
        const auto& ch = T.children(r);
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) {
            const auto c = T.clade(*it);
            out.insert(out.end(), c.begin(), c.end());
        }
    }
    return out;
}

inline std::string vtt_species(std::size_t i, bool prime) { return std::to_string(i + 1) + (prime ? "p" : ""); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Variable species order

/// Max-Cut to VTT. Species form a caterpillar 0, 1, 1p, ..., n, np from
/// the deepest cherry up. Vertex i owns the cherry (0, ip) at height a_i
/// and the cherry (0, thick leaf of e8 leaves in i) at a_i + 1; edge
/// {i, j} (i < j) is a cherry from i to jp above all vertex gadgets; a
/// thick leaf of e5 leaves in species 0 hangs from the bottom of a spine
/// that collects the vertex cherries (1, 1p, 2, ...) and then the edge
/// cherries. Budget k = (m - c) e5 + 2 n^4.
inline Reduction reduce_maxcut_vtt(const Graph& g, std::size_t cut_target, const GadgetScale& scale) {
    scale.check();
    const std::size_t n = g.n(), m = g.m();
    if (n < 3) throw std::invalid_argument("the variable-order reduction needs at least 3 vertices");

    std::vector<std::string> sl{"0"};
    for (std::size_t i = 0; i < n; ++i) {
        sl.push_back(detail::vtt_species(i, false));
        sl.push_back(detail::vtt_species(i, true));
    }
    PhyloTree S = detail::caterpillar(sl, 1);

    Reduction r;
    detail::ReductionBuilder rb;
    const Rational H(static_cast<std::int64_t>(2 * n + 1));
    const Rational eps(1, 2);
    std::vector<NodeId> spine_children;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string si = detail::vtt_species(i, false), sp = detail::vtt_species(i, true), k = std::to_string(i + 1);
        const Rational a = H + Rational(static_cast<std::int64_t>(2 * i));
        const NodeId zp = rb.leaf("z" + k + "p", {"vertex", i}, "0");
        const NodeId w = rb.leaf("w" + k, {"vertex", i}, sp);
        const NodeId p = rb.join({zp, w}, a, {"vertex", i});
        const NodeId z = rb.leaf("z" + k, {"vertex", i}, "0");
        const NodeId th = rb.expanded("h" + k, static_cast<std::size_t>(scale.e8), ExpandMode::Thick, a + 1, eps,
                                      {"vertex_thick", i}, si);
        const NodeId q = rb.join({z, th}, a + 1, {"vertex", i});
        r.unit["z" + k] = z;
        r.unit["z" + k + "p"] = zp;
        r.unit["w" + k] = w;
        r.unit["thick" + k] = th;
        r.unit["p" + k] = p;
        r.unit["q" + k] = q;
        spine_children.push_back(q);
        spine_children.push_back(p);
    }
    for (std::size_t e = 0; e < m; ++e) {
        const auto [i, j] = g.edges[e];
        const Rational h = H + Rational(static_cast<std::int64_t>(2 * n + e));
        const std::string tag = std::to_string(e + 1);
        const NodeId x = rb.leaf("e" + tag + "a", {"edge", e}, detail::vtt_species(i, false));
        const NodeId y = rb.leaf("e" + tag + "b", {"edge", e}, detail::vtt_species(j, true));
        r.unit["e" + tag + "a"] = x;
        r.unit["e" + tag + "b"] = y;
        spine_children.push_back(rb.join({x, y}, h, {"edge", e}));
    }
    const Rational Q = H + Rational(static_cast<std::int64_t>(2 * n + m + 1));
    const NodeId t0 = rb.expanded("c", static_cast<std::size_t>(scale.e5), ExpandMode::Thick, Q, eps, {"central", 0}, "0");
    r.unit["central"] = t0;
    NodeId spine = t0;
    for (std::size_t k = 0; k < spine_children.size(); ++k)
        spine = rb.join({spine, spine_children[k]}, Q + Rational(static_cast<std::int64_t>(k)), {"spine", k});

    r.instance = std::move(rb).finish(std::move(S), r.tags);
    r.graph = g;
    r.scale = scale;
    r.cut_target = cut_target;
    r.fixed_cost = 0;
    const auto nn = static_cast<std::int64_t>(n);
    r.slack = 2 * nn * nn * nn * nn;
    r.budget = static_cast<std::int64_t>(m - std::min(m, cut_target)) * scale.e5 + r.slack;
    return r;
}

/// Canonical VTT drawing for chosen sides: right[i] and right_prime[i] say
/// whether species i and ip sit right of species 0.
inline Embedding vtt_embedding(const Reduction& r, const std::vector<bool>& right, const std::vector<bool>& right_prime) {
    const auto& T = r.instance.gene();
    const std::size_t n = r.graph.n();
    // caterpillar order from the inside out: 1, 1p, 2, 2p, ...
    std::vector<std::pair<std::size_t, bool>> inner_out;
    for (std::size_t i = 0; i < n; ++i) {
        inner_out.emplace_back(i, false);
        inner_out.emplace_back(i, true);
    }
    auto is_right = [&](std::size_t i, bool prime) { return prime ? right_prime.at(i) : right.at(i); };
    std::vector<std::pair<std::size_t, bool>> left_side, right_side;
    for (const auto& s : inner_out) (is_right(s.first, s.second) ? right_side : left_side).push_back(s);

    auto units_of = [&](std::size_t i, bool prime, bool on_right) {
        const std::string k = std::to_string(i + 1);
        std::vector<std::pair<NodeId, bool>> edge_leaves;
        for (std::size_t e = 0; e < r.graph.m(); ++e) {
            const auto [a, b] = r.graph.edges[e];
            if (!prime && a == i) edge_leaves.emplace_back(r.gene("e" + std::to_string(e + 1) + "a"), false);
            if (prime && b == i) edge_leaves.emplace_back(r.gene("e" + std::to_string(e + 1) + "b"), false);
        }
        std::vector<std::pair<NodeId, bool>> u{{r.gene(prime ? "w" + k : "thick" + k), false}};
        // edge leaves on the outer side
        if (on_right) u.insert(u.end(), edge_leaves.begin(), edge_leaves.end());
        else u.insert(u.begin(), edge_leaves.rbegin(), edge_leaves.rend());
        return u;
    };

    Embedding emb;
    std::vector<std::pair<NodeId, bool>> units;
    for (auto it = left_side.rbegin(); it != left_side.rend(); ++it) {
        emb.species_order.push_back(r.species(detail::vtt_species(it->first, it->second)));
        const auto u = units_of(it->first, it->second, false);
        units.insert(units.end(), u.begin(), u.end());
    }
    // species 0: partners of the innermost species sit farthest out
    emb.species_order.push_back(r.species("0"));
    auto z_of = [&](const std::pair<std::size_t, bool>& s) {
        return std::pair<NodeId, bool>{r.gene("z" + std::to_string(s.first + 1) + (s.second ? "p" : "")), false};
    };
    for (const auto& s : left_side) units.push_back(z_of(s));
    units.emplace_back(r.gene("central"), false);
    for (auto it = right_side.rbegin(); it != right_side.rend(); ++it) units.push_back(z_of(*it));
    for (const auto& s : right_side) {
        emb.species_order.push_back(r.species(detail::vtt_species(s.first, s.second)));
        const auto u = units_of(s.first, s.second, true);
        units.insert(units.end(), u.begin(), u.end());
    }
    emb.gene_order = detail::assemble(T, units);
    return emb;
}


// ---------------------------------------------------------------------------
// Fixed species order

enum class PartitionerPlacement { Left, Center, Right };

namespace detail {

/// x-offset of the root of add_full_subtree(count) from its first leaf,
/// in leaf steps.
inline Rational full_subtree_root_offset(std::size_t count) {
    if (count <= 1) return 0;
    const std::size_t a = (count + 1) / 2;
    return (full_subtree_root_offset(a) + Rational(static_cast<std::int64_t>(a)) + full_subtree_root_offset(count / 2)) / 2;
}

inline std::string vg(std::size_t i, const char* part) { return "v" + std::to_string(i + 1) + part; }

}  // namespace detail

inline void calibrate(Reduction& r);

/// Max-Cut to FTT. Species, left to right: per vertex i the seven species
/// v<i>m3 .. v<i>p3, a pad spacer, the left tower tL0..tL<2e4>, a gap
/// spacer, the right tower tR0..tR<2e4>, then the edge species f<e>
/// separated by spacers r<q>. Layout (leaf counts, heights):
///   v<i>m2, v<i>p2  spacer of width e10 + (deg(i) - 1) e7 - 1
///   v<i>c           partitioner (thick e7 under P_i at 4, wide e10),
///                   one wide e7 leaf per incident edge
///   cherries (m3, p1) and (m1, p3) at 2, joined by p_i at 3
///   edge e = {i, j}: cherry of the wide leaves at 5 + e/(m+1), root p_e
///                   with the leaf in f<e> at 6 + e/(m+1)
///   towers          e4 cherries (tX<k>, tX<k+e4+1>) in (7, 15/2), central
///                   spacer of width e10, gap spacer of width 2m + 2
///   wide leaves have their root at 1/2; spacers are tied together above
///                   everything else.
/// The f<e> are placed so that p_e sits over the gap exactly when the
/// partitioners of i and j are on different sides.
inline Reduction reduce_maxcut_ftt(const Graph& g, std::size_t cut_target, const GadgetScale& scale) {
    scale.check();
    const std::size_t n = g.n(), m = g.m();
    if (n < 2) throw std::invalid_argument("the fixed-order reduction needs at least 2 vertices");
    const auto e4 = static_cast<std::size_t>(scale.e4), e7 = static_cast<std::size_t>(scale.e7),
               e10 = static_cast<std::size_t>(scale.e10);
    std::vector<std::vector<std::size_t>> incident(n);
    for (std::size_t e = 0; e < m; ++e) {
        incident[g.edges[e].first].push_back(e);
        incident[g.edges[e].second].push_back(e);
    }

    // species layout: label and width, left to right
    std::vector<std::pair<std::string, std::size_t>> species;
    std::vector<std::size_t> w2(n), s0_start(n);
    std::size_t cursor = 0;
    auto place = [&](const std::string& label, std::size_t width) {
        species.emplace_back(label, width);
        cursor += width;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t deg = incident[i].size();
        w2[i] = e10 + deg * e7 - e7 - 1;
        place(detail::vg(i, "m3"), 1);
        place(detail::vg(i, "m2"), w2[i]);
        place(detail::vg(i, "m1"), 1);
        s0_start[i] = cursor;
        place(detail::vg(i, "c"), e7 + e10 + deg * e7);
        place(detail::vg(i, "p1"), 1);
        place(detail::vg(i, "p2"), w2[i]);
        place(detail::vg(i, "p3"), 1);
    }
    place("pad", 1);
    const std::size_t tL = cursor;
    for (std::size_t j = 0; j <= 2 * e4; ++j) place("tL" + std::to_string(j), j == e4 ? e10 : 1);
    const std::size_t gap = 2 * m + 2;
    const std::size_t L_end = cursor - 1;
    place("gap", gap);
    const std::size_t tR = cursor;
    for (std::size_t j = 0; j <= 2 * e4; ++j) place("tR" + std::to_string(j), j == e4 ? e10 : 1);
    const std::size_t R_end = cursor - 1;
    const Rational G = Rational(static_cast<std::int64_t>(2 * L_end + gap + 1), 2);

    // wide-leaf roots when every partitioner sits right (v in B)
    const Rational off7 = detail::full_subtree_root_offset(e7);
    const Rational D(static_cast<std::int64_t>(e7 + e10));
    auto w_right = [&](std::size_t i, std::size_t e) {
        const auto t = static_cast<std::size_t>(std::find(incident[i].begin(), incident[i].end(), e) - incident[i].begin());
        return Rational(static_cast<std::int64_t>(s0_start[i] + t * e7)) + off7;
    };
    std::vector<Rational> c_mixed(m);
    for (std::size_t e = 0; e < m; ++e)
        c_mixed[e] = (w_right(g.edges[e].first, e) + w_right(g.edges[e].second, e) + D) / 2;
    std::vector<std::size_t> by_target(m);
    for (std::size_t e = 0; e < m; ++e) by_target[e] = e;
    std::sort(by_target.begin(), by_target.end(), [&](std::size_t a, std::size_t b) {
        return std::make_pair(c_mixed[b], a) < std::make_pair(c_mixed[a], b);
    });
    std::vector<std::size_t> f_pos(m);
    std::size_t prev = R_end;
    for (std::size_t e : by_target) {
        const Rational want = G * 2 - c_mixed[e] + Rational(1, 2);
        const auto rounded = static_cast<std::size_t>(want.num() / want.den());
        f_pos[e] = std::max(rounded, prev + 1);
        prev = f_pos[e];
    }
    // the penalized positions must land where every tower cherry spans
    for (std::size_t e = 0; e < m; ++e) {
        const Rational fx(static_cast<std::int64_t>(f_pos[e]));
        const Rational mid = (c_mixed[e] + fx) / 2;
        const Rational lo = mid - D / 4, hi = mid + D / 4;
        const bool mid_ok = Rational(static_cast<std::int64_t>(L_end)) < mid && mid < Rational(static_cast<std::int64_t>(tR));
        const bool lo_ok = Rational(static_cast<std::int64_t>(tL + e4 - 1)) < lo && lo < Rational(static_cast<std::int64_t>(tL + e4 + e10));
        const bool hi_ok = Rational(static_cast<std::int64_t>(tR + e4 - 1)) < hi && hi < Rational(static_cast<std::int64_t>(tR + e4 + e10));
        if (!mid_ok || !lo_ok || !hi_ok) throw std::invalid_argument("gadget scale too small for the fixed-order reduction");
    }
    {
        std::size_t at = R_end + 1, q = 0;
        for (std::size_t e : by_target) {
            if (f_pos[e] > at) place("r" + std::to_string(++q), f_pos[e] - at);
            place("f" + std::to_string(e + 1), 1);
            at = f_pos[e] + 1;
        }
    }

    std::vector<std::string> labels;
    for (const auto& s : species) labels.push_back(s.first);
    PhyloTree S = detail::caterpillar(labels, Rational(1, static_cast<std::int64_t>(labels.size())));

    Reduction r;
    detail::ReductionBuilder rb;
    const Rational half(1, 2);
    std::vector<NodeId> spacers;
    auto spacer = [&](const std::string& label, std::size_t width) {
        const NodeId v = rb.expanded(label + "s", width, ExpandMode::Wide, 0, half, {"spacer", spacers.size()}, label);
        r.unit[label] = v;
        spacers.push_back(v);
    };
    std::vector<NodeId> vertex_parts;
    std::vector<std::vector<NodeId>> wide(n);
    for (std::size_t i = 0; i < n; ++i) {
        const NodeId a = rb.leaf(detail::vg(i, "m3") + "g", {"vertex_cherry", i}, detail::vg(i, "m3"));
        spacer(detail::vg(i, "m2"), w2[i]);
        const NodeId b = rb.leaf(detail::vg(i, "m1") + "g", {"vertex_cherry", i}, detail::vg(i, "m1"));
        const NodeId c = rb.leaf(detail::vg(i, "p1") + "g", {"vertex_cherry", i}, detail::vg(i, "p1"));
        spacer(detail::vg(i, "p2"), w2[i]);
        const NodeId d = rb.leaf(detail::vg(i, "p3") + "g", {"vertex_cherry", i}, detail::vg(i, "p3"));
        const NodeId L = rb.join({a, c}, 2, {"vertex_cherry", i});
        const NodeId R = rb.join({b, d}, 2, {"vertex_cherry", i});
        const NodeId p = rb.join({L, R}, 3, {"vertex_root", i});
        const std::string s0 = detail::vg(i, "c");
        const NodeId tk = rb.expanded(s0 + "t", e7, ExpandMode::Thick, 4, half, {"partition_thick", i}, s0);
        const NodeId wd = rb.expanded(s0 + "w", e10, ExpandMode::Wide, 0, half, {"partition_wide", i}, s0);
        const NodeId P = rb.join({tk, wd}, 4, {"partitioner", i});
        r.unit[s0 + "P"] = P;
        for (std::size_t e : incident[i]) {
            const NodeId w = rb.expanded(s0 + "e" + std::to_string(e + 1), e7, ExpandMode::Wide, 0, half, {"edge_wide", e}, s0);
            r.unit[s0 + "e" + std::to_string(e + 1)] = w;
            wide[i].push_back(w);
        }
        vertex_parts.push_back(rb.join({p, P}, Rational(21, 2), {"vertex_root", i}));
    }
    spacer("pad", 1);
    std::vector<NodeId> tower_roots;
    for (const char* side : {"tL", "tR"}) {
        std::vector<NodeId> single(2 * e4 + 1);
        for (std::size_t j = 0; j <= 2 * e4; ++j) {
            const std::string label = side + std::to_string(j);
            if (j == e4) spacer(label, e10);
            else single[j] = rb.leaf(label + "g", {"tower", tower_roots.size()}, label);
        }
        NodeId acc = 0;
        for (std::size_t k = 0; k < e4; ++k) {
            const NodeId ch = rb.join({single[k], single[k + e4 + 1]},
                                      7 + Rational(static_cast<std::int64_t>(k + 1), static_cast<std::int64_t>(2 * (e4 + 1))),
                                      {"tower", tower_roots.size()});
            acc = k == 0 ? ch
                         : rb.join({acc, ch}, Rational(15, 2) + Rational(static_cast<std::int64_t>(k), static_cast<std::int64_t>(2 * e4)),
                                   {"tower", tower_roots.size()});
        }
        tower_roots.push_back(acc);
        if (tower_roots.size() == 1) spacer("gap", gap);
    }
    std::vector<NodeId> edge_roots(m);
    for (std::size_t e = 0; e < m; ++e) {
        const auto [i, j] = g.edges[e];
        const Rational frac(static_cast<std::int64_t>(e), static_cast<std::int64_t>(m + 1));
        auto w_of = [&](std::size_t v) {
            return wide[v][static_cast<std::size_t>(std::find(incident[v].begin(), incident[v].end(), e) - incident[v].begin())];
        };
        const NodeId c = rb.join({w_of(i), w_of(j)}, 5 + frac, {"edge_cherry", e});
        const std::string fl = "f" + std::to_string(e + 1);
        const NodeId leaf = rb.leaf(fl + "g", {"edge_leaf", e}, fl);
        r.unit[fl] = leaf;
        edge_roots[e] = rb.join({c, leaf}, 6 + frac, {"edge_root", e});
    }
    for (std::size_t q = 1;; ++q) {
        const std::string label = "r" + std::to_string(q);
        const auto it = std::find_if(species.begin(), species.end(), [&](const auto& s) { return s.first == label; });
        if (it == species.end()) break;
        spacer(label, it->second);
    }

    auto caterpillar_join = [&](const std::vector<NodeId>& parts, const Rational& lo, const Rational& span, const char* kind) {
        NodeId acc = parts.at(0);
        for (std::size_t k = 1; k < parts.size(); ++k)
            acc = rb.join({acc, parts[k]}, lo + span * Rational(static_cast<std::int64_t>(k), static_cast<std::int64_t>(parts.size())),
                          {kind, k});
        return acc;
    };
    std::vector<NodeId> top;
    top.push_back(caterpillar_join(vertex_parts, Rational(21, 2), half, "vertex_tree"));
    if (m > 0) top.push_back(caterpillar_join(edge_roots, 8, 1, "edge_tree"));
    top.push_back(rb.join({tower_roots[0], tower_roots[1]}, 10, {"tower_join", 0}));
    top.push_back(caterpillar_join(spacers, 12, 1, "spacer_tree"));
    NodeId root = top[0];
    for (std::size_t k = 1; k < top.size(); ++k) root = rb.join({root, top[k]}, Rational(static_cast<std::int64_t>(13 + k)), {"assembly", k});

    r.instance = std::move(rb).finish(std::move(S), r.tags);
    r.graph = g;
    r.scale = scale;
    r.fixed_order = true;
    r.species_order = r.instance.species().clade(r.instance.species().root());
    r.cut_target = cut_target;
    calibrate(r);
    return r;
}

/// Canonical FTT drawing: partitioners placed as given, wide leaves of the
/// edges in lexicographic order, everything else in its fixed order. A
/// centered partitioner sits after the first incident edge's wide leaf.
inline Embedding ftt_embedding(const Reduction& r, const std::vector<PartitionerPlacement>& place) {
    const auto& T = r.instance.gene();
    const auto& S = r.instance.species();
    std::vector<std::pair<NodeId, bool>> units;
    for (NodeId s : r.species_order) {
        const std::string& label = S.label(s);
        const auto it = r.unit.find(label);
        if (it != r.unit.end()) {
            units.emplace_back(it->second, false);
            continue;
        }
        if (label.size() > 1 && label[0] == 'v' && label.back() == 'c') {
            const std::size_t i = std::stoul(label.substr(1, label.size() - 2)) - 1;
            std::vector<std::pair<NodeId, bool>> w;
            for (std::size_t e = 0; e < r.graph.m(); ++e) {
                const auto key = label + "e" + std::to_string(e + 1);
                if (r.unit.count(key)) w.emplace_back(r.unit.at(key), false);
            }
            const NodeId P = r.unit.at(label + "P");
            switch (place.at(i)) {
            case PartitionerPlacement::Left:
                units.emplace_back(P, false);
                units.insert(units.end(), w.begin(), w.end());
                break;
            case PartitionerPlacement::Right:
                units.insert(units.end(), w.begin(), w.end());
                units.emplace_back(P, true);
                break;
            case PartitionerPlacement::Center:
                if (w.empty()) throw std::invalid_argument("a vertex without edges has no central placement");
                units.push_back(w.front());
                units.emplace_back(P, false);
                units.insert(units.end(), w.begin() + 1, w.end());
                break;
            }
            continue;
        }
        for (NodeId l : r.instance.preimage(s)) units.emplace_back(l, false);
    }
    return {r.species_order, detail::assemble(T, units)};
}

/// The drawing a cut describes; side[i] is true when v_i is in B. In A,
/// species i sits left of species 0 (VTT) or the partitioner of v_i sits
/// at the left end of its species (FTT).
inline Embedding embedding_from_cut(const Reduction& r, const std::vector<bool>& side) {
    if (side.size() != r.graph.n()) throw std::invalid_argument("partition size does not match the graph");
    if (!r.fixed_order) {
        std::vector<bool> prime(side.size());
        for (std::size_t i = 0; i < side.size(); ++i) prime[i] = !side[i];
        return vtt_embedding(r, side, prime);
    }
    std::vector<PartitionerPlacement> place;
    for (bool b : side) place.push_back(b ? PartitionerPlacement::Right : PartitionerPlacement::Left);
    return ftt_embedding(r, place);
}

struct ReductionAudit {
    std::size_t total = 0;
    std::size_t cut = 0;
    std::size_t edge_penalty = 0;   // edge gadget x central thick leaf (VTT), tower x edge root (FTT)
    std::size_t thick_penalty = 0;  // vertex gadget horizontal x its own thick leaf
    std::int64_t residual = 0;      // total - (m - cut) penalty - fixed cost
};

inline ReductionAudit audit_reduction(const Reduction& r, const Embedding& e, const std::vector<bool>& side) {
    const auto rep = count_crossings(r.instance, e);
    ReductionAudit a;
    a.total = rep.count;
    a.cut = r.graph.cut(side);
    const std::string pen_h = r.fixed_order ? "tower" : "edge", pen_v = r.fixed_order ? "edge_root" : "central";
    const std::string th_h = r.fixed_order ? "vertex_root" : "vertex", th_v = r.fixed_order ? "partition_thick" : "vertex_thick";
    for (const auto& [u, v] : rep.pairs) {
        const auto& hu = r.tags[u];
        const auto& tv = r.tags[v];
        if (hu.kind == pen_h && tv.kind == pen_v) ++a.edge_penalty;
        if (hu.kind == th_h && tv.kind == th_v && hu.index == tv.index) ++a.thick_penalty;
    }
    a.residual = static_cast<std::int64_t>(a.total) -
                 static_cast<std::int64_t>(r.graph.m() - a.cut) * r.edge_penalty() - r.fixed_cost;
    return a;
}

/// Fills in the fixed cost and budget of an FTT reduction from its
/// reference drawing.
inline void calibrate(Reduction& r) {
    if (!r.fixed_order) return;
    const std::vector<bool> all_a(r.graph.n(), false);
    r.fixed_cost = 0;
    r.fixed_cost = audit_reduction(r, embedding_from_cut(r, all_a), all_a).residual;
    const auto n = static_cast<std::int64_t>(r.graph.n());
    r.slack = n * n * n;
    const std::size_t m = r.graph.m();
    r.budget = r.fixed_cost + static_cast<std::int64_t>(m - std::min(m, r.cut_target)) * r.scale.e4 + r.slack;
}

}  // namespace coalview
