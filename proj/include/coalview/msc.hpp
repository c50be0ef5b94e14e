#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "coalview/tree.hpp"

namespace coalview {

enum class PopulationModel { PiecewiseConstant, ContinuousLinear };

class InstanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A species tree, a gene tree and the leaf mapping phi between them.
///
/// Construction only checks that phi is a total map from gene leaves into
/// species leaves; the multispecies-coalescent conditions are reported by
/// validate_msc() so callers can inspect every violation at once.
class MSCInstance {
public:
    MSCInstance() = default;

    /// `phi` is indexed by gene node id; entries for inner vertices are ignored.
    MSCInstance(PhyloTree species, PhyloTree gene, std::vector<NodeId> phi,
                PopulationModel model = PopulationModel::PiecewiseConstant, std::size_t source_trees = 1)
        : species_(std::move(species)), gene_(std::move(gene)), phi_(std::move(phi)), model_(model),
          source_trees_(source_trees) {
        if (phi_.size() != gene_.size()) throw InstanceError("mapping size does not match gene tree");
        preimage_.assign(species_.size(), {});
        for (NodeId l : gene_.leaves()) {
            const NodeId s = phi_[l];
            if (s >= species_.size() || !species_.is_leaf(s))
                throw InstanceError("gene leaf " + gene_.label(l) + " is not mapped to a species leaf");
            preimage_[s].push_back(l);
        }
        species_mrca_.assign(gene_.size(), 0);
        species_count_.assign(gene_.size(), 0);
        for (NodeId v : gene_.postorder()) {
            if (gene_.is_leaf(v)) {
                species_mrca_[v] = phi_[v];
                species_count_[v] = 1;
                continue;
            }
            const auto& ch = gene_.children(v);
            NodeId m = species_mrca_[ch[0]];
            for (std::size_t i = 1; i < ch.size(); ++i) m = species_.lca(m, species_mrca_[ch[i]]);
            species_mrca_[v] = m;
            species_count_[v] = species_.is_leaf(m) ? 1 : 2;
        }
    }

    const PhyloTree& species() const { return species_; }
    const PhyloTree& gene() const { return gene_; }
    PopulationModel model() const { return model_; }
    /// Number of gene trees merged under a synthetic super root (1 = none).
    std::size_t source_trees() const { return source_trees_; }

    /// phi for a gene leaf.
    NodeId phi(NodeId gene_leaf) const { return phi_.at(gene_leaf); }
    const std::vector<NodeId>& phi_table() const { return phi_; }
    /// Gene leaves mapped to species leaf s, in gene id order.
    const std::vector<NodeId>& preimage(NodeId species_leaf) const { return preimage_.at(species_leaf); }

    /// Root of the minimal species subtree spanning every species holding a
    /// leaf below gene vertex v.
    NodeId minimal_species_subtree(NodeId v) const { return species_mrca_.at(v); }
    /// True when all leaves below v map to one species.
    bool single_species(NodeId v) const { return species_count_.at(v) == 1; }

private:
    PhyloTree species_;
    PhyloTree gene_;
    std::vector<NodeId> phi_;
    PopulationModel model_ = PopulationModel::PiecewiseConstant;
    std::size_t source_trees_ = 1;
    std::vector<std::vector<NodeId>> preimage_;
    std::vector<NodeId> species_mrca_;
    std::vector<int> species_count_;
};

// ---------------------------------------------------------------------------
// Population sizes

struct BranchPopulation {
    Rational top;
    Rational bottom;
};

/// Species nodes that own a drawn branch: every node except an out-degree-1 root.
inline bool owns_branch(const PhyloTree& s, NodeId v) {
    return !(v == s.root() && s.children(v).size() == 1);
}

inline bool has_population_sizes(const PhyloTree& s) {
    for (NodeId v = 0; v < s.size(); ++v) {
        if (!owns_branch(s, v)) continue;
        const auto& p = s.node(v).pop;
        if (!p.top && !p.bottom) return false;
    }
    return true;
}

/// Resolved sizes for the branch above v. A single given value fills both ends.
inline BranchPopulation branch_population(const PhyloTree& s, NodeId v) {
    const auto& p = s.node(v).pop;
    if (!p.top && !p.bottom) throw InstanceError("missing population size for species node " + std::to_string(v));
    const Rational top = p.top ? *p.top : *p.bottom;
    const Rational bottom = p.bottom ? *p.bottom : *p.top;
    return {top, bottom};
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    std::string kind;  // "tree", "requirement (i)", "MSC height condition", "population"
    std::optional<NodeId> node;
    std::string message;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;

    void add(std::string kind, std::optional<NodeId> node, std::string message) {
        ok = false;
        violations.push_back({std::move(kind), node, std::move(message)});
    }
};

inline ValidationReport validate_msc(const MSCInstance& inst) {
    ValidationReport rep;
    const auto& S = inst.species();
    const auto& T = inst.gene();
    for (auto& m : S.violations()) rep.add("tree", std::nullopt, "species tree: " + m);
    for (auto& m : T.violations()) rep.add("tree", std::nullopt, "gene tree: " + m);

    for (NodeId s : S.leaves())
        if (inst.preimage(s).empty())
            rep.add("requirement (i)", s, "requirement (i): no gene leaf mapped to species " + S.label(s));

    for (NodeId v : T.postorder()) {
        if (T.is_leaf(v) || inst.single_species(v)) continue;
        const NodeId split = inst.minimal_species_subtree(v);
        if (!(T.height(v) > S.height(split)))
            rep.add("MSC height condition", v,
                    "MSC height condition at vertex " + std::to_string(v) + ": height " + T.height(v).str() +
                        " not above species divergence " + S.height(split).str());
    }

    bool any_pop = false;
    for (NodeId v = 0; v < S.size(); ++v) any_pop = any_pop || !S.node(v).pop.empty();
    if (any_pop) {
        for (NodeId v = 0; v < S.size(); ++v) {
            if (!owns_branch(S, v)) continue;
            const auto& p = S.node(v).pop;
            if (p.empty()) {
                rep.add("population", v, "missing population size at species node " + std::to_string(v));
                continue;
            }
            const auto bp = branch_population(S, v);
            if (bp.top.sign() <= 0 || bp.bottom.sign() <= 0)
                rep.add("population", v, "non-positive population size at species node " + std::to_string(v));
            if (inst.model() == PopulationModel::ContinuousLinear && !S.is_leaf(v)) {
                Rational sum = 0;
                bool complete = true;
                for (NodeId c : S.children(v)) {
                    if (S.node(c).pop.empty()) { complete = false; break; }
                    sum += branch_population(S, c).top;
                }
                if (!complete) continue;
                const double want = sum.to_double(), got = bp.bottom.to_double();
                if (std::abs(want - got) > 1e-9 * std::max(std::abs(want), std::abs(got)))
                    rep.add("population", v,
                            "bottom size at species node " + std::to_string(v) + " is " + bp.bottom.str() +
                                ", children's tops sum to " + sum.str());
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Extending phi to inner vertices

/// Species node whose upward branch contains gene vertex v. A vertex lying
/// exactly at a species node height belongs to the older branch above it.
inline NodeId phi_hat(const MSCInstance& inst, NodeId v) {
    const auto& S = inst.species();
    const Rational& h = inst.gene().height(v);
    NodeId s = inst.minimal_species_subtree(v);
    while (const auto p = S.parent(s)) {
        if (S.height(*p) <= h && owns_branch(S, *p)) s = *p;
        else break;
    }
    return s;
}

inline std::vector<NodeId> extend_phi(const MSCInstance& inst) {
    std::vector<NodeId> out(inst.gene().size());
    for (NodeId v = 0; v < out.size(); ++v) out[v] = phi_hat(inst, v);
    return out;
}

// ---------------------------------------------------------------------------
// Leaf orders

/// Leaf orders of both trees: the decision variable of both problems.
struct Embedding {
    std::vector<NodeId> species_order;
    std::vector<NodeId> gene_order;

    friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Per-node rotation bits for the species tree (true = children reversed);
/// indexed by node id, entries for leaves are ignored.
using Rotations = std::vector<bool>;

inline std::vector<NodeId> leaf_order_from_rotations(const PhyloTree& t, const Rotations& rot) {
    std::vector<NodeId> out;
    std::vector<NodeId> stack{t.root()};
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        if (t.is_leaf(v)) {
            out.push_back(v);
            continue;
        }
        auto ch = t.children(v);
        if (v < rot.size() && rot[v]) std::reverse(ch.begin(), ch.end());
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

/// Positions of each listed leaf, or nullopt if the list is not a
/// permutation of the tree's leaves.
inline std::optional<std::vector<std::size_t>> leaf_positions(const PhyloTree& t, const std::vector<NodeId>& order) {
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> pos(t.size(), unset);
    if (order.size() != t.leaves().size()) return std::nullopt;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const NodeId v = order[i];
        if (v >= t.size() || !t.is_leaf(v) || pos[v] != unset) return std::nullopt;
        pos[v] = i;
    }
    return pos;
}

/// True when every clade of t is contiguous in `order`, i.e. the order is
/// produced by some choice of rotations.
inline bool is_rotation_order(const PhyloTree& t, const std::vector<NodeId>& order) {
    const auto pos = leaf_positions(t, order);
    if (!pos) return false;
    std::vector<std::size_t> lo(t.size()), hi(t.size());
    for (NodeId v : t.postorder()) {
        if (t.is_leaf(v)) {
            lo[v] = hi[v] = (*pos)[v];
            continue;
        }
        lo[v] = SIZE_MAX;
        hi[v] = 0;
        for (NodeId c : t.children(v)) {
            lo[v] = std::min(lo[v], lo[c]);
            hi[v] = std::max(hi[v], hi[c]);
        }
        if (hi[v] - lo[v] + 1 != t.leaf_count(v)) return false;
    }
    return true;
}

/// Rotation bits realizing a leaf order; throws if the order is not realizable.
inline Rotations rotations_from_order(const PhyloTree& t, const std::vector<NodeId>& order) {
    if (!is_rotation_order(t, order)) throw InstanceError("leaf order is not realizable by rotations");
    const auto pos = *leaf_positions(t, order);
    std::vector<std::size_t> lo(t.size());
    for (NodeId v : t.postorder()) {
        if (t.is_leaf(v)) { lo[v] = pos[v]; continue; }
        lo[v] = SIZE_MAX;
        for (NodeId c : t.children(v)) lo[v] = std::min(lo[v], lo[c]);
    }
    Rotations rot(t.size(), false);
    for (NodeId v = 0; v < t.size(); ++v)
        if (t.is_binary(v)) rot[v] = lo[t.children(v)[0]] > lo[t.children(v)[1]];
    return rot;
}

/// Reason the embedding is not drawable, or nullopt when it satisfies
/// requirements (ii) and (iii) and the species order is realizable.
inline std::optional<std::string> order_violation(const MSCInstance& inst, const Embedding& emb) {
    const auto& S = inst.species();
    const auto& T = inst.gene();
    if (!leaf_positions(S, emb.species_order)) return "species order is not a permutation of the species";
    const auto gpos = leaf_positions(T, emb.gene_order);
    if (!gpos) return "gene order is not a permutation of the gene leaves";
    if (!is_rotation_order(S, emb.species_order)) return "species order is not realizable by rotations";

    // (ii): blocks per species, in species order
    std::size_t k = 0;
    for (NodeId s : emb.species_order) {
        const std::size_t n = inst.preimage(s).size();
        for (std::size_t i = 0; i < n; ++i, ++k)
            if (inst.phi(emb.gene_order[k]) != s)
                return "requirement (ii): gene leaves of species " + S.label(s) + " are not one block in place";
    }

    // (iii): every single-species clade is contiguous
    std::vector<std::size_t> lo(T.size()), hi(T.size());
    for (NodeId v : T.postorder()) {
        if (T.is_leaf(v)) {
            lo[v] = hi[v] = (*gpos)[v];
            continue;
        }
        lo[v] = SIZE_MAX;
        hi[v] = 0;
        for (NodeId c : T.children(v)) {
            lo[v] = std::min(lo[v], lo[c]);
            hi[v] = std::max(hi[v], hi[c]);
        }
        if (inst.single_species(v) && hi[v] - lo[v] + 1 != T.leaf_count(v))
            return "requirement (iii): single-species subtree at vertex " + std::to_string(v) +
                   " is not drawable without crossings";
    }
    return std::nullopt;
}

inline bool validate_order(const MSCInstance& inst, const Embedding& emb) { return !order_violation(inst, emb); }

/// The drawing the input files describe: species in tree order, gene leaves
/// in tree order within each species block.
inline Embedding input_embedding(const MSCInstance& inst) {
    const auto& S = inst.species();
    const auto& T = inst.gene();
    Embedding e;
    e.species_order = S.clade(S.root());
    const auto genes = T.clade(T.root());
    for (NodeId s : e.species_order)
        for (NodeId l : genes)
            if (inst.phi(l) == s) e.gene_order.push_back(l);
    return e;
}

// ---------------------------------------------------------------------------
// Merging gene trees

/// Joins several gene trees under a left-combed binary spine whose top is
/// the super root at `root_height`; a single tree gets an out-degree-1 root.
/// Out-degree-1 roots of the inputs are dropped before joining.
inline PhyloTree merge_gene_trees(const std::vector<PhyloTree>& trees, const Rational& root_height) {
    if (trees.empty()) throw InstanceError("no gene trees to merge");
    std::set<std::string> labels;
    Rational top = 0;
    for (const auto& t : trees) {
        for (NodeId l : t.leaves())
            if (!labels.insert(t.label(l)).second) throw InstanceError("duplicate leaf label " + t.label(l));
        top = max(top, t.height(t.root()));
    }
    if (!(root_height > top)) throw InstanceError("root height must lie above every input root");

    std::vector<TreeNode> nodes;
    std::vector<NodeId> roots;
    for (const auto& t : trees) {
        NodeId r = t.root();
        while (t.children(r).size() == 1) r = t.children(r)[0];
        const auto offset = static_cast<NodeId>(nodes.size());
        // copy the subtree below r, remapping ids densely
        std::vector<NodeId> remap(t.size(), 0);
        std::vector<NodeId> order;
        std::vector<NodeId> stack{r};
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            remap[v] = offset + static_cast<NodeId>(order.size());
            order.push_back(v);
            for (NodeId c : t.children(v)) stack.push_back(c);
        }
        for (NodeId v : order) {
            TreeNode n = t.node(v);
            if (v == r) n.parent.reset();
            else n.parent = remap[*n.parent];
            for (auto& c : n.children) c = remap[c];
            nodes.push_back(std::move(n));
        }
        roots.push_back(remap[r]);
    }

    auto add = [&](std::vector<NodeId> children, Rational h) {
        const auto id = static_cast<NodeId>(nodes.size());
        for (NodeId c : children) nodes[c].parent = id;
        nodes.push_back(TreeNode{std::nullopt, std::move(children), {}, h, {}});
        return id;
    };

    if (roots.size() == 1) {
        const NodeId root = add({roots[0]}, root_height);
        return PhyloTree(std::move(nodes), root);
    }
    const auto k = static_cast<std::int64_t>(roots.size());
    NodeId spine = roots[0];
    for (std::int64_t i = 1; i < k; ++i) {
        const Rational h = i == k - 1 ? root_height : top + (root_height - top) * Rational(i, k - 1);
        spine = add({spine, roots[static_cast<std::size_t>(i)]}, h);
    }
    return PhyloTree(std::move(nodes), spine);
}

}  // namespace coalview
