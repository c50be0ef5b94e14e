#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "coalview/crossings.hpp"
#include "coalview/heuristics.hpp"
#include "coalview/msc.hpp"

namespace coalview {

// ---------------------------------------------------------------------------
// ILP model

enum class VarKind { Binary, Integer, Continuous };
enum class RowSense { Le, Ge, Eq };

struct IlpVariable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    Rational lower;
    Rational upper;
};

struct IlpTerm {
    std::size_t var = 0;
    Rational coef;
};

struct IlpRow {
    std::string name;
    std::string family;
    std::vector<IlpTerm> terms;
    RowSense sense = RowSense::Eq;
    Rational rhs;
};

/// Variable naming: x_v<id> for gene vertices, lb_u<u>_v<v>, rb_u<u>_v<v>
/// and z_u<u>_v<v> for (horizontal at u, vertical below v) pairs,
/// Il_v<id>/Ir_v<id> for gene clade intervals, Jl_s<id>/Jr_s<id> for species
/// intervals and o_v<a>_v<b> (a < b, 1 iff x_a > x_b) for leaf ordering.
struct IlpModel {
    MSCInstance instance;
    std::optional<std::vector<NodeId>> fixed_species_order;
    std::int64_t n_T = 0;
    std::int64_t n_S = 0;

    std::vector<IlpVariable> vars;
    std::vector<IlpRow> rows;
    std::vector<IlpTerm> objective;

    std::vector<std::size_t> x;  // by gene vertex
    std::map<std::pair<NodeId, NodeId>, std::size_t> lb, rb, z;
    std::vector<std::size_t> Il, Ir;  // by gene vertex
    std::vector<std::optional<std::size_t>> Jl, Jr;  // by species node; empty when constant
    std::vector<std::pair<Rational, Rational>> J_const;  // fixed species leaves
    std::map<std::pair<NodeId, NodeId>, std::size_t> order_bits;
    std::vector<std::pair<NodeId, NodeId>> vertical_overlaps;  // (u, v) with a(u, v) = 1

    std::size_t count(const std::string& prefix) const {
        return static_cast<std::size_t>(std::count_if(vars.begin(), vars.end(), [&](const IlpVariable& v) {
            return v.name.compare(0, prefix.size(), prefix) == 0;
        }));
    }
};

/// Whether the horizontal through u and the vertical above v overlap in
/// height: y(v) < y(u) < y(parent(v)).
inline bool vertical_overlap(const PhyloTree& T, NodeId u, NodeId v) {
    const auto p = T.parent(v);
    return p && T.height(v) < T.height(u) && T.height(u) < T.height(*p);
}

namespace detail {

inline std::pair<NodeId, NodeId> alpha_beta(const PhyloTree& t, NodeId v) {
    const auto& ch = t.children(v);
    return {ch.front(), ch.back()};
}

/// Gene leaves mapped into the species subtree below s.
inline std::int64_t species_load(const MSCInstance& inst, NodeId s) {
    std::int64_t n = 0;
    for (NodeId l : inst.species().clade(s)) n += static_cast<std::int64_t>(inst.preimage(l).size());
    return n;
}

}  // namespace detail

inline IlpModel build_ilp(const MSCInstance& inst, std::optional<std::vector<NodeId>> fixed_species_order = {}) {
    const auto& S = inst.species();
    const auto& T = inst.gene();
    if (fixed_species_order && (!leaf_positions(S, *fixed_species_order) || !is_rotation_order(S, *fixed_species_order)))
        throw EmbeddingError("species order is not a realizable permutation of the species");

    IlpModel m;
    m.instance = inst;
    m.fixed_species_order = fixed_species_order;
    m.n_T = static_cast<std::int64_t>(T.leaves().size());
    m.n_S = static_cast<std::int64_t>(S.leaves().size());
    const Rational one(1), nT(m.n_T);

    auto add_var = [&](std::string name, VarKind kind, Rational lo, Rational hi) {
        m.vars.push_back({std::move(name), kind, lo, hi});
        return m.vars.size() - 1;
    };
    auto add_row = [&](std::string name, std::string family, std::vector<IlpTerm> terms, RowSense sense, Rational rhs) {
        std::vector<IlpTerm> merged;
        for (const auto& t : terms) {
            auto it = std::find_if(merged.begin(), merged.end(), [&](const IlpTerm& u) { return u.var == t.var; });
            if (it == merged.end()) merged.push_back(t);
            else it->coef += t.coef;
        }
        std::erase_if(merged, [](const IlpTerm& t) { return t.coef.sign() == 0; });
        if (merged.empty()) {
            const int s = rhs.sign();
            const bool holds = sense == RowSense::Eq ? s == 0 : sense == RowSense::Ge ? s <= 0 : s >= 0;
            if (holds) return;
            throw std::logic_error("infeasible constant row " + name);
        }
        m.rows.push_back({std::move(name), std::move(family), std::move(merged), sense, rhs});
    };
    auto pair_name = [](const char* head, NodeId u, NodeId v) {
        return std::string(head) + "_u" + std::to_string(u) + "_v" + std::to_string(v);
    };

    // variables
    m.x.resize(T.size());
    for (NodeId v = 0; v < T.size(); ++v)
        m.x[v] = add_var("x_v" + std::to_string(v), T.is_leaf(v) ? VarKind::Integer : VarKind::Continuous, one, nT);
    std::vector<NodeId> inner, non_root;
    for (NodeId v = 0; v < T.size(); ++v) {
        if (!T.is_leaf(v)) inner.push_back(v);
        if (T.parent(v)) non_root.push_back(v);
    }
    for (NodeId u : inner)
        for (NodeId v : non_root) {
            m.lb[{u, v}] = add_var(pair_name("lb", u, v), VarKind::Binary, 0, one);
            m.rb[{u, v}] = add_var(pair_name("rb", u, v), VarKind::Binary, 0, one);
            m.z[{u, v}] = add_var(pair_name("z", u, v), VarKind::Binary, 0, one);
        }
    m.Il.resize(T.size());
    m.Ir.resize(T.size());
    for (NodeId v = 0; v < T.size(); ++v) {
        m.Il[v] = add_var("Il_v" + std::to_string(v), VarKind::Integer, one, nT);
        m.Ir[v] = add_var("Ir_v" + std::to_string(v), VarKind::Integer, one, nT);
    }
    m.Jl.assign(S.size(), std::nullopt);
    m.Jr.assign(S.size(), std::nullopt);
    m.J_const.assign(S.size(), {0, 0});
    if (fixed_species_order) {
        std::int64_t cursor = 1;
        for (NodeId s : *fixed_species_order) {
            const auto n = static_cast<std::int64_t>(inst.preimage(s).size());
            m.J_const[s] = {Rational(cursor), Rational(cursor + n - 1)};
            cursor += n;
        }
    }
    for (NodeId s = 0; s < S.size(); ++s) {
        if (fixed_species_order && S.is_leaf(s)) continue;
        m.Jl[s] = add_var("Jl_s" + std::to_string(s), VarKind::Integer, one, nT);
        m.Jr[s] = add_var("Jr_s" + std::to_string(s), VarKind::Integer, one, nT);
    }
    const auto leaves = T.leaves();
    for (std::size_t i = 0; i < leaves.size(); ++i)
        for (std::size_t j = i + 1; j < leaves.size(); ++j) {
            const NodeId a = std::min(leaves[i], leaves[j]), b = std::max(leaves[i], leaves[j]);
            m.order_bits[{a, b}] = add_var("o_v" + std::to_string(a) + "_v" + std::to_string(b), VarKind::Binary, 0, one);
        }

    // J-term helper: a variable term or, for fixed species leaves, a constant
    auto J_term = [&](NodeId s, bool right, Rational coef, std::vector<IlpTerm>& terms, Rational& rhs) {
        const auto& var = right ? m.Jr[s] : m.Jl[s];
        if (var) terms.push_back({*var, coef});
        else rhs -= coef * (right ? m.J_const[s].second : m.J_const[s].first);
    };

    // leaf interval containment
    for (NodeId v : leaves) {
        const NodeId s = inst.phi(v);
        for (bool right : {false, true}) {
            std::vector<IlpTerm> terms{{m.x[v], one}};
            Rational rhs = 0;
            J_term(s, right, -one, terms, rhs);
            add_row(std::string(right ? "leafr" : "leafl") + "_v" + std::to_string(v), "leaf interval", terms,
                    right ? RowSense::Le : RowSense::Ge, rhs);
        }
    }
    // distinct leaves via ordering bits
    for (const auto& [ab, o] : m.order_bits) {
        const auto [a, b] = ab;
        const std::string tag = "_v" + std::to_string(a) + "_v" + std::to_string(b);
        add_row("dist1" + tag, "distinct", {{m.x[a], one}, {m.x[b], -one}, {o, -nT}}, RowSense::Ge, one - nT);
        add_row("dist2" + tag, "distinct", {{m.x[b], one}, {m.x[a], -one}, {o, nT}}, RowSense::Ge, one);
    }
    // midpoints
    for (NodeId v : inner) {
        const auto [a, b] = detail::alpha_beta(T, v);
        std::vector<IlpTerm> terms{{m.x[v], Rational(2)}};
        if (a == b) terms.push_back({m.x[a], Rational(-2)});
        else terms.insert(terms.end(), {{m.x[a], -one}, {m.x[b], -one}});
        add_row("mid_v" + std::to_string(v), "midpoint", terms, RowSense::Eq, 0);
    }
    // precedence (scaled by n_T) and overlap
    for (NodeId u : inner) {
        const auto [a, b] = detail::alpha_beta(T, u);
        for (NodeId v : non_root) {
            const auto l = m.lb[{u, v}], r = m.rb[{u, v}];
            const std::string tag = "_u" + std::to_string(u) + "_v" + std::to_string(v);
            add_row("preclA" + tag, "precedence", {{l, nT}, {m.x[v], -one}, {m.x[a], one}}, RowSense::Ge, 0);
            add_row("preclB" + tag, "precedence", {{l, nT}, {m.x[v], -one}, {m.x[b], one}}, RowSense::Ge, 0);
            add_row("precrA" + tag, "precedence", {{r, nT}, {m.x[a], -one}, {m.x[v], one}}, RowSense::Ge, 0);
            add_row("precrB" + tag, "precedence", {{r, nT}, {m.x[b], -one}, {m.x[v], one}}, RowSense::Ge, 0);
        }
    }
    for (NodeId u : inner)
        for (NodeId v : non_root)
            add_row(pair_name("ovl", u, v), "overlap", {{m.z[{u, v}], one}, {m.lb[{u, v}], -one}, {m.rb[{u, v}], -one}},
                    RowSense::Ge, -one);
    // interval propagation through T
    for (NodeId v : inner) {
        const auto [a, b] = detail::alpha_beta(T, v);
        for (NodeId c : a == b ? std::vector<NodeId>{a} : std::vector<NodeId>{a, b}) {
            const std::string tag = "_v" + std::to_string(v) + "_c" + std::to_string(c);
            add_row("Iprop_l" + tag, "I propagation", {{m.Il[v], one}, {m.Il[c], -one}}, RowSense::Le, 0);
            add_row("Iprop_r" + tag, "I propagation", {{m.Ir[v], one}, {m.Ir[c], -one}}, RowSense::Ge, 0);
        }
    }
    // interval propagation through S
    for (NodeId s = 0; s < S.size(); ++s) {
        if (S.is_leaf(s)) continue;
        const auto [a, b] = detail::alpha_beta(S, s);
        for (NodeId c : a == b ? std::vector<NodeId>{a} : std::vector<NodeId>{a, b}) {
            const std::string tag = "_s" + std::to_string(s) + "_c" + std::to_string(c);
            std::vector<IlpTerm> tl{{*m.Jl[s], one}}, tr{{*m.Jr[s], one}};
            Rational rl = 0, rr = 0;
            J_term(c, false, -one, tl, rl);
            J_term(c, true, -one, tr, rr);
            add_row("Jprop_l" + tag, "J propagation", tl, RowSense::Le, rl);
            add_row("Jprop_r" + tag, "J propagation", tr, RowSense::Ge, rr);
        }
    }
    // interval checks
    for (NodeId v : leaves) {
        add_row("Ileaf_l_v" + std::to_string(v), "I leaf", {{m.Il[v], one}, {m.x[v], -one}}, RowSense::Eq, 0);
        add_row("Ileaf_r_v" + std::to_string(v), "I leaf", {{m.Ir[v], one}, {m.x[v], -one}}, RowSense::Eq, 0);
    }
    for (NodeId v : inner) {
        if (!inst.single_species(v)) continue;
        add_row("Iwidth_v" + std::to_string(v), "I width", {{m.Ir[v], one}, {m.Il[v], -one}}, RowSense::Eq,
                Rational(static_cast<std::int64_t>(T.leaf_count(v)) - 1));
    }
    for (NodeId s = 0; s < S.size(); ++s) {
        if (!m.Jl[s]) continue;
        add_row("Jwidth_s" + std::to_string(s), "J width", {{*m.Jr[s], one}, {*m.Jl[s], -one}}, RowSense::Eq,
                Rational(detail::species_load(inst, s) - 1));
    }
    // objective over vertically overlapping pairs
    for (NodeId u : inner)
        for (NodeId v : non_root)
            if (T.height(u) > T.height(v) && vertical_overlap(T, u, v)) {
                m.vertical_overlaps.emplace_back(u, v);
                m.objective.push_back({m.z[{u, v}], one});
            }
    return m;
}

struct ModelEvaluation {
    bool feasible = false;
    Rational objective;
    std::vector<std::string> violated;
};

/// Objective and feasibility of the assignment induced by an embedding:
/// leaves at positions 1..n_T, inner vertices at midpoints, every auxiliary
/// at its smallest feasible value.
inline ModelEvaluation evaluate_model(const IlpModel& m, const Embedding& emb) {
    const auto& inst = m.instance;
    const auto& S = inst.species();
    const auto& T = inst.gene();
    if (!leaf_positions(T, emb.gene_order)) throw EmbeddingError("gene order is not a permutation of the gene leaves");
    if (!leaf_positions(S, emb.species_order))
        throw EmbeddingError("species order is not a permutation of the species");

    std::vector<Rational> val(m.vars.size(), 0);
    std::vector<Rational> x(T.size());
    for (std::size_t i = 0; i < emb.gene_order.size(); ++i) x[emb.gene_order[i]] = Rational(static_cast<std::int64_t>(i) + 1);
    std::vector<Rational> il(T.size()), ir(T.size());
    for (NodeId v : T.postorder()) {
        if (T.is_leaf(v)) {
            il[v] = ir[v] = x[v];
            continue;
        }
        const auto [a, b] = detail::alpha_beta(T, v);
        x[v] = (x[a] + x[b]) / 2;
        il[v] = min(il[a], il[b]);
        ir[v] = max(ir[a], ir[b]);
    }
    for (NodeId v = 0; v < T.size(); ++v) {
        val[m.x[v]] = x[v];
        val[m.Il[v]] = il[v];
        val[m.Ir[v]] = ir[v];
    }
    for (const auto& [ab, o] : m.order_bits) val[o] = x[ab.first] > x[ab.second] ? 1 : 0;
    for (const auto& [uv, l] : m.lb) {
        const auto [u, v] = uv;
        const auto [a, b] = detail::alpha_beta(T, u);
        val[l] = (x[v] > x[a] || x[v] > x[b]) ? 1 : 0;
        val[m.rb.at(uv)] = (x[v] < x[a] || x[v] < x[b]) ? 1 : 0;
        val[m.z.at(uv)] = max(Rational(0), val[l] + val[m.rb.at(uv)] - 1);
    }
    // species intervals from where their gene leaves ended up
    std::vector<Rational> jl(S.size(), Rational(m.n_T)), jr(S.size(), Rational(1));
    for (NodeId s : S.postorder()) {
        if (S.is_leaf(s)) {
            for (NodeId l : inst.preimage(s)) {
                jl[s] = min(jl[s], x[l]);
                jr[s] = max(jr[s], x[l]);
            }
        } else {
            for (NodeId c : S.children(s)) {
                jl[s] = min(jl[s], jl[c]);
                jr[s] = max(jr[s], jr[c]);
            }
        }
        if (m.Jl[s]) {
            val[*m.Jl[s]] = jl[s];
            val[*m.Jr[s]] = jr[s];
        }
    }

    ModelEvaluation ev;
    for (const auto& row : m.rows) {
        Rational lhs = 0;
        for (const auto& t : row.terms) lhs += t.coef * val[t.var];
        const bool ok = row.sense == RowSense::Eq ? lhs == row.rhs
                        : row.sense == RowSense::Le ? lhs <= row.rhs
                                                    : lhs >= row.rhs;
        if (!ok) ev.violated.push_back(row.name);
    }
    for (std::size_t i = 0; i < m.vars.size(); ++i)
        if (val[i] < m.vars[i].lower || val[i] > m.vars[i].upper) ev.violated.push_back("bound " + m.vars[i].name);
    ev.feasible = ev.violated.empty();
    for (const auto& t : m.objective) ev.objective += t.coef * val[t.var];
    return ev;
}

namespace detail {

inline std::string lp_number(const Rational& r) {
    if (!r.is_integer()) throw std::logic_error("LP export expects integer coefficients");
    return r.str();
}

inline void lp_terms(std::ostringstream& out, const IlpModel& m, const std::vector<IlpTerm>& terms) {
    bool first = true;
    for (const auto& t : terms) {
        const Rational a = abs(t.coef);
        if (first) out << (t.coef.sign() < 0 ? "- " : "");
        else out << (t.coef.sign() < 0 ? " - " : " + ");
        if (a != Rational(1)) out << lp_number(a) << " ";
        out << m.vars[t.var].name;
        first = false;
    }
}

inline void lp_name_list(std::ostringstream& out, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) out << (i % 8 == 0 ? (i ? "\n " : " ") : " ") << names[i];
    out << "\n";
}

}  // namespace detail

/// CPLEX LP text of the model.
inline std::string emit_lp(const IlpModel& m) {
    std::ostringstream out;
    out << "\\ crossing minimization, n_T = " << m.n_T << ", n_S = " << m.n_S << ", "
        << (m.fixed_species_order ? "fixed" : "variable") << " species order\n";
    out << "Minimize\n obj: ";
    if (m.objective.empty()) out << "0 " << m.vars.front().name;
    else detail::lp_terms(out, m, m.objective);
    out << "\nSubject To\n";
    for (const auto& row : m.rows) {
        out << " " << row.name << ": ";
        detail::lp_terms(out, m, row.terms);
        out << (row.sense == RowSense::Eq ? " = " : row.sense == RowSense::Le ? " <= " : " >= ")
            << detail::lp_number(row.rhs) << "\n";
    }
    out << "Bounds\n";
    std::vector<std::string> binaries, generals;
    for (const auto& v : m.vars) {
        if (v.kind == VarKind::Binary) {
            binaries.push_back(v.name);
            continue;
        }
        out << " " << detail::lp_number(v.lower) << " <= " << v.name << " <= " << detail::lp_number(v.upper) << "\n";
        if (v.kind == VarKind::Integer) generals.push_back(v.name);
    }
    out << "Binaries\n";
    detail::lp_name_list(out, binaries);
    out << "Generals\n";
    detail::lp_name_list(out, generals);
    out << "End\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Branch and bound

struct ExactResult {
    Embedding embedding;
    std::size_t crossings = 0;
    bool certified = false;
    std::uint64_t nodes = 0;
};

namespace detail {

/// Maximal single-species subtrees; within a species block these are the
/// pieces that can be permuted and flipped.
struct Unit {
    NodeId root = 0;
    std::vector<NodeId> flips;  // binary vertices, bit i of a mask flips flips[i]
};

class BranchAndBound {
public:
    BranchAndBound(const MSCInstance& inst, std::uint64_t budget) : inst_(inst), T_(inst.gene()), budget_(budget) {
        const auto& S = inst.species();
        units_.assign(S.size(), {});
        for (NodeId v : T_.subtree(T_.root())) {
            if (!inst.single_species(v)) continue;
            const auto p = T_.parent(v);
            if (p && inst.single_species(*p)) continue;
            Unit u{v, {}};
            for (NodeId w : T_.subtree(v))
                if (T_.is_binary(w)) u.flips.push_back(w);
            units_[inst.minimal_species_subtree(v)].push_back(std::move(u));
        }
        for (NodeId u = 0; u < T_.size(); ++u) {
            if (!T_.is_binary(u)) continue;
            for (NodeId v = 0; v < T_.size(); ++v)
                if (vertical_overlap(T_, u, v)) pairs_.emplace_back(u, v);
        }
        n_ = T_.leaves().size();
    }

    void set_incumbent(const Embedding& e, std::size_t crossings) {
        best_ = e;
        best_count_ = crossings;
        have_ = true;
    }
    bool have_incumbent() const { return have_; }
    const Embedding& best() const { return best_; }
    std::size_t best_count() const { return best_count_; }
    bool exhausted() const { return exhausted_; }
    std::uint64_t nodes() const { return nodes_; }

    void search(const std::vector<NodeId>& species_order) {
        if (exhausted_) return;
        order_ = species_order;
        placed_.clear();
        used_.assign(inst_.species().size(), {});
        for (NodeId s = 0; s < units_.size(); ++s) used_[s].assign(units_[s].size(), false);
        dfs(0);
    }

private:
    /// Crossings already forced by the placed prefix. A vertex with no
    /// placed leaf lies right of every placed vertex.
    std::size_t lower_bound() {
        const std::size_t k = placed_.size();
        known_.assign(T_.size(), false);
        beyond_.assign(T_.size(), false);
        x_.resize(T_.size());
        placed_count_.assign(T_.size(), 0);
        for (std::size_t i = 0; i < k; ++i) {
            x_[placed_[i]] = Rational(2 * static_cast<std::int64_t>(i) + 1);
            placed_count_[placed_[i]] = 1;
        }
        for (NodeId v : T_.postorder()) {
            if (T_.is_leaf(v)) {
                known_[v] = placed_count_[v] == 1;
                beyond_[v] = !known_[v];
                continue;
            }
            bool all = true, none = true;
            for (NodeId c : T_.children(v)) {
                all = all && known_[c];
                none = none && beyond_[c];
            }
            known_[v] = all;
            beyond_[v] = none;
            if (all) {
                const auto& ch = T_.children(v);
                x_[v] = ch.size() == 1 ? x_[ch[0]] : (x_[ch[0]] + x_[ch[1]]) / 2;
            }
        }
        std::size_t forced = 0;
        for (const auto& [u, v] : pairs_) {
            if (!known_[v]) continue;
            const NodeId a = T_.children(u)[0], b = T_.children(u)[1];
            const bool a_left = known_[a] && x_[a] < x_[v];
            const bool b_left = known_[b] && x_[b] < x_[v];
            const bool a_right = (known_[a] && x_[v] < x_[a]) || beyond_[a];
            const bool b_right = (known_[b] && x_[v] < x_[b]) || beyond_[b];
            if ((a_left && b_right) || (b_left && a_right)) ++forced;
        }
        return forced;
    }

    void append_unit(const Unit& u, std::uint64_t mask) {
        std::vector<NodeId> stack{u.root};
        while (!stack.empty()) {
            const NodeId w = stack.back();
            stack.pop_back();
            if (T_.is_leaf(w)) {
                placed_.push_back(w);
                continue;
            }
            auto ch = T_.children(w);
            const auto it = std::find(u.flips.begin(), u.flips.end(), w);
            if (it != u.flips.end() && ((mask >> (it - u.flips.begin())) & 1)) std::reverse(ch.begin(), ch.end());
            for (auto c = ch.rbegin(); c != ch.rend(); ++c) stack.push_back(*c);
        }
    }

    void dfs(std::size_t block) {
        if (exhausted_) return;
        if (++nodes_ > budget_) {
            exhausted_ = true;
            return;
        }
        const std::size_t lb = lower_bound();
        if (have_ && lb >= best_count_) return;
        if (placed_.size() == n_) {
            best_ = {order_, placed_};
            best_count_ = lb;
            have_ = true;
            return;
        }
        while (block < order_.size() &&
               std::all_of(used_[order_[block]].begin(), used_[order_[block]].end(), [](bool b) { return b; }))
            ++block;
        const NodeId s = order_[block];
        for (std::size_t i = 0; i < units_[s].size(); ++i) {
            if (used_[s][i]) continue;
            const Unit& u = units_[s][i];
            const std::uint64_t masks = u.flips.size() >= 63 ? UINT64_MAX : (std::uint64_t{1} << u.flips.size());
            for (std::uint64_t mask = 0; mask < masks; ++mask) {
                const std::size_t mark = placed_.size();
                append_unit(u, mask);
                used_[s][i] = true;
                dfs(block);
                used_[s][i] = false;
                placed_.resize(mark);
                if (exhausted_) return;
            }
        }
    }

    const MSCInstance& inst_;
    const PhyloTree& T_;
    std::uint64_t budget_;
    std::vector<std::vector<Unit>> units_;
    std::vector<std::pair<NodeId, NodeId>> pairs_;
    std::size_t n_ = 0;

    std::vector<NodeId> order_;
    std::vector<NodeId> placed_;
    std::vector<std::vector<bool>> used_;
    std::vector<bool> known_, beyond_;
    std::vector<Rational> x_;
    std::vector<int> placed_count_;

    Embedding best_;
    std::size_t best_count_ = 0;
    bool have_ = false;
    bool exhausted_ = false;
    std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// Species orders reachable by rotations, one per mirror pair: the topmost
/// binary node keeps its input orientation.
inline std::vector<std::vector<NodeId>> species_orders_modulo_mirror(const PhyloTree& S) {
    std::vector<NodeId> binary;
    for (NodeId v : S.subtree(S.root()))
        if (S.is_binary(v)) binary.push_back(v);
    std::vector<std::vector<NodeId>> out;
    if (binary.empty()) return {S.clade(S.root())};
    const std::size_t free_bits = binary.size() - 1;
    if (free_bits >= 20) throw std::invalid_argument("species tree too large for rotation enumeration");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free_bits); ++mask) {
        Rotations rot(S.size(), false);
        for (std::size_t i = 0; i < free_bits; ++i) rot[binary[i + 1]] = (mask >> i) & 1;
        out.push_back(leaf_order_from_rotations(S, rot));
    }
    return out;
}

/// Exact minimum by branch and bound: species blocks are filled left to
/// right with the maximal single-species subtrees of each species in every
/// order and orientation. Without a fixed species order every rotation of
/// the species tree up to the global mirror is tried. The heuristics seed
/// the incumbent. `certified` is false when the node budget ran out.
inline ExactResult solve_exact(const MSCInstance& inst, std::optional<std::vector<NodeId>> fixed_species_order = {},
                               std::uint64_t budget = 50'000'000) {
    const auto& S = inst.species();
    detail::BranchAndBound bb(inst, budget);
    std::vector<std::vector<NodeId>> orders;
    if (fixed_species_order) {
        if (!leaf_positions(S, *fixed_species_order) || !is_rotation_order(S, *fixed_species_order))
            throw EmbeddingError("species order is not a realizable permutation of the species");
        orders.push_back(*fixed_species_order);
        const auto e = ftt_heuristic(inst, *fixed_species_order);
        bb.set_incumbent(e, count_crossings(inst, e).count);
    } else {
        orders = species_orders_modulo_mirror(S);
        const auto r = multi_restart(inst, HeuristicMode::Both, 4, 1);
        bb.set_incumbent(r.best, r.best_crossings);
    }
    for (const auto& o : orders) bb.search(o);
    return {bb.best(), bb.best_count(), !bb.exhausted(), bb.nodes()};
}

// ---------------------------------------------------------------------------
// Brute-force oracle

/// Minimum crossing count by plain enumeration: every species permutation
/// that rotations can realize (or only the given one), times every
/// permutation of the gene leaves within each species, filtered by
/// validate_order and scored by count_crossings.
inline std::size_t brute_force_oracle(const MSCInstance& inst, std::optional<std::vector<NodeId>> fixed_species_order = {},
                                      std::size_t cap = 9) {
    const auto& S = inst.species();
    const auto& T = inst.gene();
    if (T.leaves().size() > cap) throw std::invalid_argument("oracle is capped at " + std::to_string(cap) + " gene leaves");
    std::vector<std::vector<NodeId>> species_orders;
    if (fixed_species_order) {
        species_orders.push_back(*fixed_species_order);
    } else {
        std::vector<NodeId> perm = S.leaves();
        std::sort(perm.begin(), perm.end());
        do {
            if (is_rotation_order(S, perm)) species_orders.push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    std::size_t best = SIZE_MAX;
    for (const auto& so : species_orders) {
        std::vector<std::vector<NodeId>> blocks;
        for (NodeId s : so) {
            auto b = inst.preimage(s);
            std::sort(b.begin(), b.end());
            blocks.push_back(b);
        }
        // odometer over per-block permutations
        while (true) {
            Embedding e{so, {}};
            for (const auto& b : blocks) e.gene_order.insert(e.gene_order.end(), b.begin(), b.end());
            if (validate_order(inst, e)) best = std::min(best, count_crossings(inst, e).count);
            std::size_t i = 0;
            while (i < blocks.size() && !std::next_permutation(blocks[i].begin(), blocks[i].end())) ++i;
            if (i == blocks.size()) break;
        }
    }
    if (best == SIZE_MAX) throw EmbeddingError("no valid embedding for the given species order");
    return best;
}

}  // namespace coalview
