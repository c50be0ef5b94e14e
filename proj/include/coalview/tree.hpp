#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "coalview/rational.hpp"

namespace coalview {

using NodeId = std::uint32_t;

/// Population-size annotation carried by a species node for the branch
/// directly above it.
struct PopAnnotation {
    std::optional<Rational> top;
    std::optional<Rational> bottom;

    bool empty() const { return !top && !bottom; }
    friend bool operator==(const PopAnnotation&, const PopAnnotation&) = default;
};

struct TreeNode {
    std::optional<NodeId> parent;
    std::vector<NodeId> children;
    std::string label;
    Rational height;
    PopAnnotation pop;
};

class StructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rooted tree with per-node heights, shared by species and gene trees.
/// The node table is immutable once constructed; node ids are indices into it.
class PhyloTree {
public:
    PhyloTree() = default;

    /// Checks the parent/child links form a single rooted tree. Degree,
    /// height and label rules are reported by violations() instead.
    PhyloTree(std::vector<TreeNode> nodes, NodeId root) : nodes_(std::move(nodes)), root_(root) {
        if (nodes_.empty()) throw StructureError("tree has no nodes");
        if (root_ >= nodes_.size()) throw StructureError("root id out of range");
        if (nodes_[root_].parent) throw StructureError("root has a parent");
        for (NodeId v = 0; v < nodes_.size(); ++v) {
            for (NodeId c : nodes_[v].children) {
                if (c >= nodes_.size()) throw StructureError("child id out of range at node " + std::to_string(v));
                if (nodes_[c].parent != v) throw StructureError("inconsistent parent link at node " + std::to_string(c));
            }
            if (v != root_ && !nodes_[v].parent) throw StructureError("second root at node " + std::to_string(v));
            if (const auto p = nodes_[v].parent) {
                if (*p >= nodes_.size()) throw StructureError("parent id out of range at node " + std::to_string(v));
                const auto& sib = nodes_[*p].children;
                if (std::find(sib.begin(), sib.end(), v) == sib.end())
                    throw StructureError("inconsistent child link at node " + std::to_string(v));
            }
        }
        // reachability also rules out cycles
        std::vector<char> seen(nodes_.size(), 0);
        std::vector<NodeId> stack{root_};
        std::size_t count = 0;
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            if (seen[v]) throw StructureError("cycle through node " + std::to_string(v));
            seen[v] = 1;
            ++count;
            for (NodeId c : nodes_[v].children) stack.push_back(c);
        }
        if (count != nodes_.size()) throw StructureError("tree is not connected");
        build_index();
    }

    std::size_t size() const { return nodes_.size(); }
    NodeId root() const { return root_; }
    const TreeNode& node(NodeId v) const { return nodes_.at(v); }
    const std::vector<TreeNode>& nodes() const { return nodes_; }

    bool is_leaf(NodeId v) const { return nodes_[v].children.empty(); }
    /// Vertex with two children, i.e. one that carries a horizontal segment.
    bool is_binary(NodeId v) const { return nodes_[v].children.size() == 2; }
    const std::vector<NodeId>& children(NodeId v) const { return nodes_[v].children; }
    std::optional<NodeId> parent(NodeId v) const { return nodes_[v].parent; }
    const Rational& height(NodeId v) const { return nodes_[v].height; }
    const std::string& label(NodeId v) const { return nodes_[v].label; }
    std::size_t depth(NodeId v) const { return depth_[v]; }

    /// Leaves in id order.
    const std::vector<NodeId>& leaves() const { return leaves_; }
    /// Children before parents.
    const std::vector<NodeId>& postorder() const { return postorder_; }
    /// Number of leaves below v (v itself when it is a leaf).
    std::size_t leaf_count(NodeId v) const { return leaf_count_[v]; }

    std::optional<NodeId> find_leaf(const std::string& label) const {
        const auto it = leaf_by_label_.find(label);
        if (it == leaf_by_label_.end()) return std::nullopt;
        return it->second;
    }

    bool is_ancestor(NodeId anc, NodeId v) const {
        while (true) {
            if (v == anc) return true;
            const auto p = nodes_[v].parent;
            if (!p) return false;
            v = *p;
        }
    }

    NodeId lca(NodeId a, NodeId b) const {
        while (depth_[a] > depth_[b]) a = *nodes_[a].parent;
        while (depth_[b] > depth_[a]) b = *nodes_[b].parent;
        while (a != b) {
            a = *nodes_[a].parent;
            b = *nodes_[b].parent;
        }
        return a;
    }

    /// Leaves of the subtree rooted at v, left to right by child order.
    std::vector<NodeId> clade(NodeId v) const {
        std::vector<NodeId> out;
        std::vector<NodeId> stack{v};
        while (!stack.empty()) {
            const NodeId w = stack.back();
            stack.pop_back();
            if (is_leaf(w)) out.push_back(w);
            const auto& ch = nodes_[w].children;
            for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
        }
        return out;
    }

    /// Every vertex of the subtree rooted at v, in preorder.
    std::vector<NodeId> subtree(NodeId v) const {
        std::vector<NodeId> out;
        std::vector<NodeId> stack{v};
        while (!stack.empty()) {
            const NodeId w = stack.back();
            stack.pop_back();
            out.push_back(w);
            const auto& ch = nodes_[w].children;
            for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
        }
        return out;
    }

    /// Violations of the binary/height/label rules; empty when the tree is
    /// a valid rooted binary tree with leaves at height 0.
    std::vector<std::string> violations() const {
        std::vector<std::string> out;
        for (NodeId v = 0; v < nodes_.size(); ++v) {
            const auto& n = nodes_[v];
            const std::size_t deg = n.children.size();
            if (deg != 0 && deg != 2 && !(v == root_ && deg == 1))
                out.push_back("node " + std::to_string(v) + " has " + std::to_string(deg) + " children");
            if (deg == 0) {
                if (n.height != 0) out.push_back("leaf " + n.label + " has nonzero height " + n.height.str());
                if (n.label.empty()) out.push_back("leaf " + std::to_string(v) + " has an empty label");
            }
            if (n.height.sign() < 0) out.push_back("node " + std::to_string(v) + " has negative height");
            if (n.parent && !(nodes_[*n.parent].height > n.height))
                out.push_back("height does not decrease from node " + std::to_string(*n.parent) + " to node " +
                              std::to_string(v));
        }
        std::unordered_map<std::string, int> seen;
        for (NodeId l : leaves_)
            if (!nodes_[l].label.empty() && ++seen[nodes_[l].label] == 2)
                out.push_back("duplicate leaf label " + nodes_[l].label);
        return out;
    }

private:
    void build_index() {
        depth_.assign(nodes_.size(), 0);
        leaf_count_.assign(nodes_.size(), 0);
        postorder_.clear();
        leaves_.clear();
        leaf_by_label_.clear();
        std::vector<std::pair<NodeId, bool>> stack{{root_, false}};
        while (!stack.empty()) {
            auto [v, expanded] = stack.back();
            stack.pop_back();
            if (expanded) {
                postorder_.push_back(v);
                continue;
            }
            stack.push_back({v, true});
            for (NodeId c : nodes_[v].children) {
                depth_[c] = depth_[v] + 1;
                stack.push_back({c, false});
            }
        }
        for (NodeId v : postorder_) {
            if (is_leaf(v)) {
                leaf_count_[v] = 1;
            } else {
                for (NodeId c : nodes_[v].children) leaf_count_[v] += leaf_count_[c];
            }
        }
        for (NodeId v = 0; v < nodes_.size(); ++v) {
            if (is_leaf(v)) {
                leaves_.push_back(v);
                leaf_by_label_.emplace(nodes_[v].label, v);
            }
        }
    }

    std::vector<TreeNode> nodes_;
    NodeId root_ = 0;
    std::vector<std::size_t> depth_;
    std::vector<std::size_t> leaf_count_;
    std::vector<NodeId> postorder_;
    std::vector<NodeId> leaves_;
    std::unordered_map<std::string, NodeId> leaf_by_label_;
};

/// Incremental construction helper; ids are assigned in insertion order.
class TreeBuilder {
public:
    NodeId leaf(std::string label, Rational height = 0) {
        nodes_.push_back(TreeNode{std::nullopt, {}, std::move(label), height, {}});
        return static_cast<NodeId>(nodes_.size() - 1);
    }

    NodeId join(std::vector<NodeId> children, Rational height, std::string label = {}) {
        const auto id = static_cast<NodeId>(nodes_.size());
        for (NodeId c : children) nodes_.at(c).parent = id;
        nodes_.push_back(TreeNode{std::nullopt, std::move(children), std::move(label), height, {}});
        return id;
    }

    TreeNode& at(NodeId v) { return nodes_.at(v); }
    std::size_t size() const { return nodes_.size(); }

    /// The root is the single parentless node.
    PhyloTree build() && {
        std::optional<NodeId> root;
        for (NodeId v = 0; v < nodes_.size(); ++v) {
            if (!nodes_[v].parent) {
                if (root) throw StructureError("more than one parentless node");
                root = v;
            }
        }
        if (!root) throw StructureError("no root");
        return PhyloTree(std::move(nodes_), *root);
    }

private:
    std::vector<TreeNode> nodes_;
};

}  // namespace coalview
