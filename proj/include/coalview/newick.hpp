#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coalview/tree.hpp"

namespace coalview {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

namespace detail {

class NewickReader {
public:
    explicit NewickReader(std::string_view text) : text_(text) {}

    PhyloTree read() {
        skip_ws();
        const NodeId root = subtree(/*is_root=*/true);
        skip_ws();
        if (!eat(';')) fail("expected ';'");
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters after ';'");
        return finish(root);
    }

private:
    struct Raw {
        std::vector<NodeId> children;
        std::string label;
        std::optional<Rational> length;
        std::size_t offset = 0;
        PopAnnotation pop;
    };

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    static bool is_label_char(char c) {
        return !(std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '[' || c == ']' ||
                 c == ':' || c == ';' || c == ',' || c == '\'' || c == '\0');
    }

    std::string label() {
        if (eat('\'')) {
            std::string out;
            while (true) {
                if (pos_ >= text_.size()) fail("unterminated quoted label");
                const char c = text_[pos_++];
                if (c == '\'') {
                    if (eat('\'')) out.push_back('\'');
                    else break;
                } else {
                    out.push_back(c);
                }
            }
            return out;
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_label_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    Rational number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                       text_[pos_] == '-' || text_[pos_] == '+' || text_[pos_] == '/'))
            ++pos_;
        if (start == pos_) fail("expected a number");
        try {
            return Rational::parse(text_.substr(start, pos_ - start));
        } catch (const std::exception& e) {
            pos_ = start;
            fail(std::string("bad number: ") + e.what());
        }
    }

    void annotations(PopAnnotation& pop) {
        skip_ws();
        while (peek() == '[') {
            const std::size_t open = pos_;
            const auto close = text_.find(']', pos_);
            if (close == std::string_view::npos) fail("unterminated comment");
            std::string_view body = text_.substr(pos_ + 1, close - pos_ - 1);
            if (!body.empty() && body.front() == '&') {
                body.remove_prefix(1);
                std::size_t field_start = 0;
                while (field_start <= body.size()) {
                    auto comma = body.find(',', field_start);
                    if (comma == std::string_view::npos) comma = body.size();
                    const std::string_view field = body.substr(field_start, comma - field_start);
                    if (!field.empty()) {
                        const auto eq = field.find('=');
                        if (eq == std::string_view::npos) {
                            pos_ = open + 2 + field_start;
                            fail("annotation without '='");
                        }
                        const std::string_view key = field.substr(0, eq);
                        const std::string_view value = field.substr(eq + 1);
                        if (key == "pop_top" || key == "pop_bottom" || key == "pop") {
                            Rational r;
                            try {
                                r = Rational::parse(value);
                            } catch (const std::exception&) {
                                pos_ = open + 2 + field_start + eq + 1;
                                fail("bad population value");
                            }
                            if (key != "pop_bottom") pop.top = r;
                            if (key != "pop_top") pop.bottom = r;
                        }
                    }
                    field_start = comma + 1;
                }
            }
            pos_ = close + 1;
            skip_ws();
        }
    }

    NodeId subtree(bool is_root) {
        Raw raw;
        raw.offset = pos_;
        if (eat('(')) {
            while (true) {
                skip_ws();
                raw.children.push_back(subtree(false));
                skip_ws();
                if (eat(',')) continue;
                if (eat(')')) break;
                fail("expected ',' or ')'");
            }
            skip_ws();
            raw.label = label();
        } else {
            raw.label = label();
            if (raw.label.empty()) fail("expected a label or '('");
        }
        annotations(raw.pop);
        if (eat(':')) {
            skip_ws();
            raw.length = number();
            if (raw.length->sign() < 0) fail("negative branch length");
            annotations(raw.pop);
        } else if (!is_root) {
            fail("missing branch length");
        }
        const auto id = static_cast<NodeId>(raw_.size());
        for (NodeId c : raw.children) parent_of_.at(c) = id;
        raw_.push_back(std::move(raw));
        parent_of_.push_back(kNone);
        return id;
    }

    PhyloTree finish(NodeId root) {
        std::vector<Rational> dist(raw_.size(), 0);
        // children are created before parents, so walk ids downward
        for (std::size_t i = raw_.size(); i-- > 0;) {
            if (parent_of_[i] != kNone) dist[i] = dist[parent_of_[i]] + *raw_[i].length;
        }
        Rational depth = 0;
        for (std::size_t i = 0; i < raw_.size(); ++i)
            if (raw_[i].children.empty()) depth = max(depth, dist[i]);

        std::set<std::string> seen;
        std::vector<TreeNode> nodes(raw_.size());
        for (std::size_t i = 0; i < raw_.size(); ++i) {
            auto& r = raw_[i];
            Rational h = depth - dist[i];
            if (r.children.empty()) {
                if (h.to_double() > 1e-6 * depth.to_double()) {
                    pos_ = r.offset;
                    fail("tree is not ultrametric: leaf " + r.label + " sits at height " + h.decimal_str());
                }
                h = 0;
                if (!seen.insert(r.label).second) {
                    pos_ = r.offset;
                    fail("duplicate leaf label " + r.label);
                }
            }
            nodes[i].height = h;
            nodes[i].label = r.label;
            nodes[i].children = r.children;
            nodes[i].pop = r.pop;
            if (parent_of_[i] != kNone) nodes[i].parent = parent_of_[i];
        }
        return PhyloTree(std::move(nodes), root);
    }

    static constexpr NodeId kNone = static_cast<NodeId>(-1);
    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<Raw> raw_;
    std::vector<NodeId> parent_of_;
};

inline std::string quote_label(const std::string& s) {
    const bool plain = !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return !(std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '[' || c == ']' ||
                 c == ':' || c == ';' || c == ',' || c == '\'');
    });
    if (plain || s.empty()) return s;
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "''";
        else out.push_back(c);
    }
    return out + "'";
}

}  // namespace detail

/// Parses one rooted Newick tree. Heights are measured from the deepest
/// leaf; leaves within 1e-6 (relative) of height zero are snapped to zero.
/// Supports `[&pop_top=..,pop_bottom=..]` and `[&pop=..]` node annotations,
/// and accepts `p/q` rationals as branch lengths.
inline PhyloTree parse_newick(std::string_view text) { return detail::NewickReader(text).read(); }

/// Newick text with exact branch lengths (decimal when possible, `p/q`
/// otherwise) and population annotations when present.
inline std::string to_newick(const PhyloTree& t, NodeId from) {
    std::string out;
    auto emit = [&](auto&& self, NodeId v) -> void {
        const auto& n = t.node(v);
        if (!n.children.empty()) {
            out.push_back('(');
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i) out.push_back(',');
                self(self, n.children[i]);
            }
            out.push_back(')');
        }
        out += detail::quote_label(n.label);
        if (!n.pop.empty()) {
            out += "[&";
            if (n.pop.top && n.pop.bottom && *n.pop.top == *n.pop.bottom) {
                out += "pop=" + n.pop.top->decimal_str();
            } else {
                bool first = true;
                if (n.pop.top) { out += "pop_top=" + n.pop.top->decimal_str(); first = false; }
                if (n.pop.bottom) out += std::string(first ? "" : ",") + "pop_bottom=" + n.pop.bottom->decimal_str();
            }
            out += "]";
        }
        if (v != from) out += ":" + (t.height(*n.parent) - n.height).decimal_str();
    };
    emit(emit, from);
    return out + ";";
}

inline std::string to_newick(const PhyloTree& t) { return to_newick(t, t.root()); }

/// Order-independent signature of a tree: children sorted, heights exact.
/// Two trees are isomorphic (up to node ids and rotations) iff their
/// signatures are equal.
inline std::string tree_signature(const PhyloTree& t, NodeId from) {
    auto sig = [&](auto&& self, NodeId v) -> std::string {
        const auto& n = t.node(v);
        std::string head = detail::quote_label(n.label) + "@" + n.height.str();
        if (!n.pop.empty())
            head += "{" + (n.pop.top ? n.pop.top->str() : "") + "," + (n.pop.bottom ? n.pop.bottom->str() : "") + "}";
        if (n.children.empty()) return head;
        std::vector<std::string> parts;
        for (NodeId c : n.children) parts.push_back(self(self, c));
        std::sort(parts.begin(), parts.end());
        std::string out = "(";
        for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
        return out + ")" + head;
    };
    return sig(sig, from);
}

inline std::string tree_signature(const PhyloTree& t) { return tree_signature(t, t.root()); }

}  // namespace coalview
