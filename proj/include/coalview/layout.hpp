#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "coalview/crossings.hpp"
#include "coalview/msc.hpp"

namespace coalview {

enum class Style { Rectangular, Proportional };

struct Point {
    Rational x;
    Rational y;
    friend bool operator==(const Point&, const Point&) = default;
};

/// One species branch. Delimiters run bottom to top; in the rectangular
/// style each is a single vertical segment, in the proportional style one
/// segment per trapezoid row (plus horizontal jogs where the total width
/// jumps under piecewise-constant sizes).
struct SpeciesShape {
    NodeId node = 0;
    Rational bottom;
    Rational top;
    std::vector<Point> left;
    std::vector<Point> right;
    std::optional<BranchPopulation> population;
    std::string label;  // species leaves only
};

/// The non-horizontal part of the gene edge from `child` up to its parent.
/// `branch[i]` is the species branch containing segment i, or nullopt for a
/// horizontal jog at a row boundary.
struct GeneEdge {
    NodeId child = 0;
    std::vector<Point> path;
    std::vector<std::optional<NodeId>> branch;
};

/// Horizontal connector through an inner vertex, left end first.
struct GeneHorizontal {
    NodeId owner = 0;
    Point left;
    Point right;
};

struct ShiftEntry {
    std::optional<NodeId> vertex;
    Rational offset;
    std::string note;
};

struct Layout {
    Style style = Style::Rectangular;
    Rational width;
    Rational height;
    std::vector<SpeciesShape> species;
    std::vector<Point> vertex;  // indexed by gene node id
    std::vector<GeneEdge> edges;
    std::vector<GeneHorizontal> horizontals;
    std::vector<ShiftEntry> shift_log;
    std::vector<std::string> gene_label;  // leaf labels by gene node id, empty for inner vertices

    std::size_t segment_count() const {
        std::size_t n = horizontals.size();
        for (const auto& e : edges) n += e.path.size() - 1;
        return n;
    }
};

namespace detail {

/// Top of the drawing: the species root branch is extended by 5% when the
/// root has two children; the gene root may reach higher still.
inline Rational canvas_height(const MSCInstance& inst) {
    const auto& S = inst.species();
    const NodeId r = S.root();
    Rational top = S.is_binary(r) ? S.height(r) * Rational(21, 20) : S.height(r);
    if (top.sign() == 0) top = 1;  // single-species tree
    return max(top, inst.gene().height(inst.gene().root()));
}

/// Top of the branch above species node s.
inline Rational branch_top(const PhyloTree& S, NodeId s, const Rational& canvas_top) {
    const auto p = S.parent(s);
    if (!p || !owns_branch(S, *p)) return canvas_top;
    return S.height(*p);
}

inline std::vector<std::size_t> species_positions(const MSCInstance& inst, const Embedding& emb) {
    std::vector<std::size_t> pos(inst.species().size(), 0);
    for (std::size_t i = 0; i < emb.species_order.size(); ++i) pos[emb.species_order[i]] = i;
    // inner nodes take the position of their leftmost leaf
    for (NodeId v : inst.species().postorder()) {
        if (inst.species().is_leaf(v)) continue;
        pos[v] = SIZE_MAX;
        for (NodeId c : inst.species().children(v)) pos[v] = std::min(pos[v], pos[c]);
    }
    return pos;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rectangular style

/// Rectangular tree-in-tree layout. Vertical gene segments that share an
/// x-coordinate and overlap vertically are pushed apart by distinct
/// multiples of a unit no larger than `epsilon`, ordered so that the
/// geometric crossings equal count_crossings().
namespace detail {

inline void attach_labels(Layout& out, const MSCInstance& inst) {
    for (auto& sh : out.species)
        if (inst.species().is_leaf(sh.node)) sh.label = inst.species().label(sh.node);
    out.gene_label.resize(inst.gene().size());
    for (NodeId v : inst.gene().leaves()) out.gene_label[v] = inst.gene().label(v);
}

}  // namespace detail

inline Layout layout_rectangular(const MSCInstance& inst, const Embedding& emb, Rational epsilon = Rational(1, 8)) {
    if (const auto why = order_violation(inst, emb)) throw EmbeddingError("invalid embedding: " + *why);
    if (epsilon.sign() <= 0 || !(epsilon < Rational(1, 4))) throw EmbeddingError("epsilon must lie in (0, 1/4)");
    const auto& S = inst.species();
    const auto& T = inst.gene();

    Layout out;
    out.style = Style::Rectangular;
    out.width = Rational(2 * static_cast<std::int64_t>(T.leaves().size()));
    out.height = detail::canvas_height(inst);

    // species rectangles
    std::vector<Rational> left(S.size()), width(S.size());
    {
        Rational cursor = 0;
        for (NodeId s : emb.species_order) {
            left[s] = cursor;
            width[s] = Rational(2 * static_cast<std::int64_t>(inst.preimage(s).size()));
            cursor += width[s];
        }
        for (NodeId v : S.postorder()) {
            if (S.is_leaf(v)) continue;
            const auto& ch = S.children(v);
            left[v] = left[ch[0]];
            width[v] = 0;
            for (NodeId c : ch) {
                left[v] = min(left[v], left[c]);
                width[v] += width[c];
            }
        }
    }
    for (NodeId s = 0; s < S.size(); ++s) {
        if (!owns_branch(S, s)) continue;
        SpeciesShape sh;
        sh.node = s;
        sh.bottom = S.height(s);
        sh.top = detail::branch_top(S, s, out.height);
        sh.left = {{left[s], sh.bottom}, {left[s], sh.top}};
        sh.right = {{left[s] + width[s], sh.bottom}, {left[s] + width[s], sh.top}};
        if (!S.node(s).pop.empty()) sh.population = branch_population(S, s);
        out.species.push_back(std::move(sh));
    }

    // gene coordinates before perturbation
    const std::vector<Rational> x = gene_x_coordinates(T, emb.gene_order);
    std::vector<Rational> offset(T.size(), 0);

    // columns of coincident, vertically overlapping verticals
    std::vector<NodeId> verticals;
    for (NodeId v = 0; v < T.size(); ++v)
        if (T.parent(v)) verticals.push_back(v);
    std::sort(verticals.begin(), verticals.end(), [&](NodeId a, NodeId b) {
        if (x[a] != x[b]) return x[a] < x[b];
        if (T.height(a) != T.height(b)) return T.height(a) < T.height(b);
        return a < b;
    });
    std::vector<std::vector<NodeId>> groups;
    for (std::size_t i = 0; i < verticals.size();) {
        std::size_t j = i;
        while (j < verticals.size() && x[verticals[j]] == x[verticals[i]]) ++j;
        // verticals[i, j) share x, sorted by bottom height
        std::vector<NodeId> cur{verticals[i]};
        Rational reach = T.height(*T.parent(verticals[i]));
        for (std::size_t k = i + 1; k < j; ++k) {
            const NodeId v = verticals[k];
            if (T.height(v) < reach) {
                cur.push_back(v);
            } else {
                if (cur.size() > 1) groups.push_back(cur);
                cur = {v};
            }
            reach = max(reach, T.height(*T.parent(v)));
        }
        if (cur.size() > 1) groups.push_back(cur);
        i = j;
    }

    if (!groups.empty()) {
        std::vector<Rational> xs(x.begin(), x.end());
        std::sort(xs.begin(), xs.end());
        std::optional<Rational> gap;
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (xs[i] != xs[i - 1] && (!gap || xs[i] - xs[i - 1] < *gap)) gap = xs[i] - xs[i - 1];
        std::size_t largest = 0;
        for (const auto& g : groups) largest = std::max(largest, g.size());
        Rational unit = epsilon;
        if (gap) unit = min(unit, *gap / Rational(2 * static_cast<std::int64_t>(largest)));

        std::vector<int> group_of(T.size(), -1);
        for (std::size_t g = 0; g < groups.size(); ++g)
            for (NodeId v : groups[g]) group_of[v] = static_cast<int>(g);

        for (std::size_t g = 0; g < groups.size(); ++g) {
            const auto& members = groups[g];
            std::map<NodeId, std::size_t> index;
            for (std::size_t i = 0; i < members.size(); ++i) index[members[i]] = i;
            // before[i] holds members that must end up left of member i
            std::vector<std::vector<std::size_t>> succ(members.size());
            std::vector<std::size_t> indeg(members.size(), 0);
            for (std::size_t ci = 0; ci < members.size(); ++ci) {
                const NodeId c = members[ci];
                const NodeId u = *T.parent(c);
                if (!T.is_binary(u)) continue;
                const NodeId d = T.children(u)[0] == c ? T.children(u)[1] : T.children(u)[0];
                const bool c_is_left_end = x[c] < x[d];
                for (std::size_t vi = 0; vi < members.size(); ++vi) {
                    const NodeId v = members[vi];
                    if (v == c) continue;
                    if (!(T.height(v) < T.height(u) && T.height(u) < T.height(*T.parent(v)))) continue;
                    // v must stay outside u's horizontal
                    if (c_is_left_end) succ[vi].push_back(ci), ++indeg[ci];
                    else succ[ci].push_back(vi), ++indeg[vi];
                }
            }
            // Kahn's algorithm; among free members, those whose parent lies to
            // the left go first
            auto pref = [&](std::size_t i) {
                const NodeId v = members[i];
                const int dir = x[*T.parent(v)] < x[v] ? 0 : 1;
                return std::pair<int, NodeId>(dir, v);
            };
            auto cmp = [&](std::size_t a, std::size_t b) { return pref(a) > pref(b); };
            std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> ready(cmp);
            for (std::size_t i = 0; i < members.size(); ++i)
                if (indeg[i] == 0) ready.push(i);
            std::vector<std::size_t> order;
            while (!ready.empty()) {
                const std::size_t i = ready.top();
                ready.pop();
                order.push_back(i);
                for (std::size_t j : succ[i])
                    if (--indeg[j] == 0) ready.push(j);
            }
            if (order.size() != members.size()) throw std::logic_error("cyclic shift constraints");
            const auto gsize = static_cast<std::int64_t>(members.size());
            for (std::size_t k = 0; k < order.size(); ++k) {
                const NodeId v = members[order[k]];
                offset[v] = unit * Rational(2 * static_cast<std::int64_t>(k) - (gsize - 1));
                if (offset[v].sign() != 0)
                    out.shift_log.push_back({v, offset[v], "vertical at x=" + x[v].str() + " shifted"});
            }
        }
    }

    out.vertex.resize(T.size());
    for (NodeId v = 0; v < T.size(); ++v) out.vertex[v] = {x[v] + offset[v], T.height(v)};
    const NodeId root = T.root();
    if (T.children(root).size() == 1) out.vertex[root].x = out.vertex[T.children(root)[0]].x;

    for (NodeId v = 0; v < T.size(); ++v) {
        const auto p = T.parent(v);
        if (!p) continue;
        GeneEdge e;
        e.child = v;
        e.path = {out.vertex[v], {out.vertex[v].x, T.height(*p)}};
        e.branch = {phi_hat(inst, v)};
        out.edges.push_back(std::move(e));
    }
    for (NodeId u = 0; u < T.size(); ++u) {
        if (!T.is_binary(u)) continue;
        Point a{out.vertex[T.children(u)[0]].x, T.height(u)};
        Point b{out.vertex[T.children(u)[1]].x, T.height(u)};
        if (b.x < a.x) std::swap(a, b);
        out.horizontals.push_back({u, a, b});
    }
    // horizontal overlaps are drawn as-is and only logged
    for (std::size_t i = 0; i < out.horizontals.size(); ++i)
        for (std::size_t j = i + 1; j < out.horizontals.size(); ++j) {
            const auto& h1 = out.horizontals[i];
            const auto& h2 = out.horizontals[j];
            if (h1.left.y == h2.left.y && h1.left.x < h2.right.x && h2.left.x < h1.right.x)
                out.shift_log.push_back({std::nullopt, 0,
                                         "horizontal segments of vertices " + std::to_string(h1.owner) + " and " +
                                             std::to_string(h2.owner) + " overlap at y=" + h1.left.y.str()});
        }
    detail::attach_labels(out, inst);
    return out;
}

// ---------------------------------------------------------------------------
// Proportional style

namespace detail {

/// Species drawing of the proportional style: rows of trapezoids between
/// consecutive node heights, branch widths equal to population sizes,
/// centered on the vertical axis.
class ProportionalFrame {
public:
    ProportionalFrame(const MSCInstance& inst, const Embedding& emb) : S_(inst.species()) {
        if (!has_population_sizes(S_)) throw InstanceError("proportional style needs population sizes");
        top_ = canvas_height(inst);
        std::vector<Rational> ys{0, top_, S_.height(S_.root())};
        for (NodeId v = 0; v < S_.size(); ++v)
            if (S_.is_binary(v)) ys.push_back(S_.height(v));
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        rows_ = ys;
        order_pos_ = species_positions(inst, emb);

        branch_top_.assign(S_.size(), 0);
        ref_top_.assign(S_.size(), 0);
        for (NodeId s = 0; s < S_.size(); ++s) {
            if (!owns_branch(S_, s)) continue;
            branch_top_[s] = branch_top(S_, s, top_);
            const auto p = S_.parent(s);
            ref_top_[s] = (p && owns_branch(S_, *p)) ? S_.height(*p)
                          : (p ? S_.height(*p) : branch_top_[s]);
            if (ref_top_[s] <= S_.height(s)) ref_top_[s] = branch_top_[s];
        }
        Rational widest = 0;
        for (std::size_t j = 0; j + 1 < rows_.size(); ++j) {
            widest = max(widest, total(j, rows_[j]));
            widest = max(widest, total(j, rows_[j + 1]));
        }
        center_ = widest / 2;
        width_ = widest;
    }

    const std::vector<Rational>& rows() const { return rows_; }
    const Rational& width() const { return width_; }
    const Rational& height() const { return top_; }
    const Rational& top_of(NodeId s) const { return branch_top_[s]; }

    /// Index of the row whose bottom edge is at or below y (the upper row at a boundary).
    std::size_t row_at(const Rational& y) const {
        std::size_t j = 0;
        while (j + 2 < rows_.size() && rows_[j + 1] <= y) ++j;
        return j;
    }

    bool active(NodeId s, std::size_t row) const {
        return owns_branch(S_, s) && S_.height(s) <= rows_[row] && rows_[row + 1] <= branch_top_[s];
    }

    Rational branch_width(NodeId s, const Rational& y) const {
        const auto pop = branch_population(S_, s);
        const Rational& lo = S_.height(s);
        const Rational& hi = ref_top_[s];
        if (y >= hi) return pop.top;
        return pop.bottom + (pop.top - pop.bottom) * (y - lo) / (hi - lo);
    }

    /// Left delimiter of branch s at height y, evaluated within `row`.
    Rational left(NodeId s, std::size_t row, const Rational& y) const {
        Rational x = center_ - total(row, y) / 2;
        for (NodeId t : active_in(row)) {
            if (t == s) return x;
            x += branch_width(t, y);
        }
        throw std::logic_error("branch not active in row");
    }

    std::vector<NodeId> active_in(std::size_t row) const {
        std::vector<NodeId> out;
        for (NodeId s = 0; s < S_.size(); ++s)
            if (active(s, row)) out.push_back(s);
        std::sort(out.begin(), out.end(), [&](NodeId a, NodeId b) { return order_pos_[a] < order_pos_[b]; });
        return out;
    }

private:
    Rational total(std::size_t row, const Rational& y) const {
        Rational w = 0;
        for (NodeId s : active_in(row)) w += branch_width(s, y);
        return w;
    }

    const PhyloTree& S_;
    Rational top_;
    std::vector<Rational> rows_;
    std::vector<std::size_t> order_pos_;
    std::vector<Rational> branch_top_;
    std::vector<Rational> ref_top_;
    Rational center_;
    Rational width_;
};

}  // namespace detail

/// Proportional tree-in-tree layout. Every gene lineage keeps its relative
/// position inside its species branch while it stays in one trapezoid, so
/// each non-horizontal segment splits the top and bottom edges of its
/// trapezoid in the same ratio.
inline Layout layout_proportional(const MSCInstance& inst, const Embedding& emb) {
    if (const auto why = order_violation(inst, emb)) throw EmbeddingError("invalid embedding: " + *why);
    const auto& S = inst.species();
    const auto& T = inst.gene();
    const detail::ProportionalFrame frame(inst, emb);
    const auto& rows = frame.rows();

    Layout out;
    out.style = Style::Proportional;
    out.width = frame.width();
    out.height = frame.height();

    for (NodeId s = 0; s < S.size(); ++s) {
        if (!owns_branch(S, s)) continue;
        SpeciesShape sh;
        sh.node = s;
        sh.bottom = S.height(s);
        sh.top = frame.top_of(s);
        sh.population = branch_population(S, s);
        auto push = [](std::vector<Point>& poly, Point p) {
            if (poly.empty() || !(poly.back() == p)) poly.push_back(p);
        };
        for (std::size_t j = 0; j + 1 < rows.size(); ++j) {
            if (!frame.active(s, j)) continue;
            for (const Rational& y : {rows[j], rows[j + 1]}) {
                const Rational l = frame.left(s, j, y);
                push(sh.left, {l, y});
                push(sh.right, {l + frame.branch_width(s, y), y});
            }
        }
        out.species.push_back(std::move(sh));
    }

    // lineage state: branch and relative position within it
    std::vector<NodeId> branch(T.size());
    std::vector<Rational> ratio(T.size());
    out.vertex.resize(T.size());
    auto x_at = [&](NodeId s, const Rational& r, std::size_t row, const Rational& y) {
        return frame.left(s, row, y) + r * frame.branch_width(s, y);
    };

    for (NodeId s : emb.species_order) {
        std::size_t i = 0;
        const auto n = static_cast<std::int64_t>(inst.preimage(s).size());
        for (NodeId l : emb.gene_order) {
            if (inst.phi(l) != s) continue;
            branch[l] = s;
            ratio[l] = Rational(2 * static_cast<std::int64_t>(i) + 1, 2 * n);
            out.vertex[l] = {x_at(s, ratio[l], frame.row_at(0), 0), 0};
            ++i;
        }
    }

    // follows the lineage above vertex c up to height y_end, returning the
    // final branch and ratio and recording the polyline
    auto trace = [&](NodeId c, const Rational& y_end, GeneEdge* edge) {
        NodeId b = branch[c];
        Rational r = ratio[c];
        Point cur = out.vertex[c];
        if (edge) edge->path.push_back(cur);
        for (std::size_t j = 1; j < rows.size(); ++j) {
            const Rational& y = rows[j];
            if (!(T.height(c) < y) || y_end < y) continue;
            const std::size_t below = j - 1;
            const Rational x_minus = x_at(b, r, below, y);
            Point p{x_minus, y};
            if (edge && !(p == edge->path.back())) {
                edge->path.push_back(p);
                edge->branch.push_back(b);
            }
            if (j + 1 >= rows.size()) break;
            if (frame.top_of(b) == y) {
                const NodeId parent = *S.parent(b);
                // ratio within the union of the merging children
                const auto kids = S.children(parent);
                Rational lo, hi;
                bool first = true;
                for (NodeId k : kids) {
                    const Rational l = frame.left(k, below, y);
                    const Rational rr = l + frame.branch_width(k, y);
                    if (first) { lo = l; hi = rr; first = false; }
                    else { lo = min(lo, l); hi = max(hi, rr); }
                }
                r = (x_minus - lo) / (hi - lo);
                b = parent;
            }
            const Rational x_plus = x_at(b, r, j, y);
            if (edge && x_plus != x_minus) {
                edge->path.push_back({x_plus, y});
                edge->branch.push_back(std::nullopt);
            }
            cur = {x_plus, y};
        }
        const std::size_t row = frame.row_at(y_end);
        const Point end{x_at(b, r, row, y_end), y_end};
        if (edge && !(end == edge->path.back())) {
            edge->path.push_back(end);
            edge->branch.push_back(b);
        }
        return std::pair<NodeId, Rational>(b, r);
    };

    for (NodeId v : T.postorder()) {
        if (T.is_leaf(v)) continue;
        const Rational& y = T.height(v);
        const auto& ch = T.children(v);
        std::vector<Rational> ends;
        NodeId b = 0;
        Rational rsum = 0;
        for (NodeId c : ch) {
            GeneEdge e;
            e.child = c;
            auto [bb, rr] = trace(c, y, &e);
            b = bb;
            rsum += rr;
            ends.push_back(e.path.back().x);
            out.edges.push_back(std::move(e));
        }
        branch[v] = b;
        ratio[v] = rsum / Rational(static_cast<std::int64_t>(ch.size()));
        out.vertex[v] = {x_at(b, ratio[v], frame.row_at(y), y), y};
        if (ch.size() == 2) {
            Point a{ends[0], y}, c{ends[1], y};
            if (c.x < a.x) std::swap(a, c);
            out.horizontals.push_back({v, a, c});
        }
    }
    detail::attach_labels(out, inst);
    return out;
}

// ---------------------------------------------------------------------------
// Geometric crossing count

namespace detail {

inline int orient(const Point& a, const Point& b, const Point& c) {
    return ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).sign();
}

/// Intersection in a single point interior to both segments.
inline bool proper_cross(const Point& a, const Point& b, const Point& c, const Point& d) {
    const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

/// x of a y-monotone polyline at height y, taken from the first
/// non-horizontal segment reaching y.
inline std::optional<Rational> path_x_at(const std::vector<Point>& path, const Rational& y) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const Point& a = path[i];
        const Point& b = path[i + 1];
        if (a.y == b.y) continue;
        if (a.y <= y && y <= b.y) return a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y);
    }
    return std::nullopt;
}

}  // namespace detail

/// Exact crossing count of a drawn layout: gene horizontals against gene
/// edges passing strictly through their interior, plus proper crossings
/// between non-horizontal pieces of different edges.
inline CrossingReport count_crossings_geometric(const Layout& layout) {
    CrossingReport rep;
    for (const auto& h : layout.horizontals) {
        const Rational& y = h.left.y;
        for (const auto& e : layout.edges) {
            if (!(e.path.front().y < y && y < e.path.back().y)) continue;
            const auto x = detail::path_x_at(e.path, y);
            if (x && h.left.x < *x && *x < h.right.x) rep.pairs.emplace_back(h.owner, e.child);
        }
    }
    for (std::size_t i = 0; i < layout.edges.size(); ++i) {
        const auto& e1 = layout.edges[i];
        for (std::size_t j = i + 1; j < layout.edges.size(); ++j) {
            const auto& e2 = layout.edges[j];
            if (!(e1.path.front().y < e2.path.back().y && e2.path.front().y < e1.path.back().y)) continue;
            bool hit = false;
            for (std::size_t a = 0; a + 1 < e1.path.size() && !hit; ++a) {
                if (e1.path[a].y == e1.path[a + 1].y) continue;
                for (std::size_t b = 0; b + 1 < e2.path.size() && !hit; ++b) {
                    if (e2.path[b].y == e2.path[b + 1].y) continue;
                    if (e1.path[a].x == e1.path[a + 1].x && e2.path[b].x == e2.path[b + 1].x) continue;
                    hit = detail::proper_cross(e1.path[a], e1.path[a + 1], e2.path[b], e2.path[b + 1]);
                }
            }
            if (hit) rep.pairs.emplace_back(e1.child, e2.child);
        }
    }
    rep.count = rep.pairs.size();
    return rep;
}

}  // namespace coalview
