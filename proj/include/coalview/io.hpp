#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "coalview/msc.hpp"
#include "coalview/newick.hpp"

namespace coalview {

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(ValidationReport report)
        : std::runtime_error(summarize(report)), report_(std::move(report)) {}
    const ValidationReport& report() const { return report_; }

private:
    static std::string summarize(const ValidationReport& r) {
        std::string out = "instance failed validation";
        for (const auto& v : r.violations) out += "\n  " + v.message;
        return out;
    }
    ValidationReport report_;
};

/// Textual form of an instance before parsing.
struct InstanceBundle {
    std::string species_newick;
    std::vector<std::string> gene_newicks;
    std::vector<std::pair<std::string, std::string>> mapping;  // (gene label, species label)
    PopulationModel model = PopulationModel::PiecewiseConstant;
};

inline std::string model_tag(PopulationModel m) {
    return m == PopulationModel::ContinuousLinear ? "linear" : "constant";
}

inline PopulationModel parse_model_tag(const std::string& tag) {
    if (tag == "linear") return PopulationModel::ContinuousLinear;
    if (tag == "constant") return PopulationModel::PiecewiseConstant;
    throw InstanceError("unknown population model '" + tag + "'");
}

/// Two whitespace-separated columns per line: gene label, species label.
/// Blank lines and lines starting with '#' are skipped.
inline std::vector<std::pair<std::string, std::string>> parse_mapping_tsv(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream fields(line);
        std::string gene, species, extra;
        if (!(fields >> gene) || gene[0] == '#') continue;
        if (!(fields >> species) || (fields >> extra))
            throw InstanceError("mapping line " + std::to_string(lineno) + ": expected two columns");
        out.emplace_back(gene, species);
    }
    return out;
}

inline InstanceBundle bundle_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte);
    }
    InstanceBundle b;
    try {
        b.species_newick = j.at("species_tree").get<std::string>();
        b.gene_newicks = j.at("gene_trees").get<std::vector<std::string>>();
        if (j.contains("mapping"))
            for (const auto& pair : j.at("mapping")) {
                if (!pair.is_array() || pair.size() != 2) throw InstanceError("mapping entries must be [gene, species]");
                b.mapping.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
            }
        b.model = parse_model_tag(j.value("model", std::string("constant")));
    } catch (const nlohmann::json::exception& e) {
        throw InstanceError(std::string("malformed instance bundle: ") + e.what());
    }
    if (b.gene_newicks.empty()) throw InstanceError("bundle has no gene trees");
    return b;
}

inline std::string bundle_to_json(const InstanceBundle& b) {
    nlohmann::ordered_json j;
    j["species_tree"] = b.species_newick;
    j["gene_trees"] = b.gene_newicks;
    nlohmann::ordered_json map = nlohmann::ordered_json::array();
    for (const auto& [g, s] : b.mapping) map.push_back({g, s});
    j["mapping"] = map;
    j["model"] = model_tag(b.model);
    return j.dump(2) + "\n";
}

namespace detail {

/// Under the linear model an internal branch's bottom size defaults to the
/// sum of its children's top sizes.
inline PhyloTree fill_linear_bottoms(const PhyloTree& s) {
    auto nodes = s.nodes();
    for (NodeId v : s.postorder()) {
        if (s.is_leaf(v) || !owns_branch(s, v)) continue;
        auto& pop = nodes[v].pop;
        if (pop.bottom) continue;
        Rational sum = 0;
        bool complete = true;
        for (NodeId c : s.children(v)) {
            const auto& cp = nodes[c].pop;
            if (!cp.top) { complete = false; break; }
            sum += *cp.top;
        }
        if (complete && pop.top) pop.bottom = sum;
    }
    return PhyloTree(std::move(nodes), s.root());
}

}  // namespace detail

/// Builds and validates an instance. Several gene trees are merged under a
/// super root at 1.05 times the highest root of either tree. An empty mapping
/// falls back to the `label@species` naming convention.
inline MSCInstance parse_instance(const InstanceBundle& b) {
    if (b.gene_newicks.empty()) throw InstanceError("bundle has no gene trees");
    PhyloTree species = parse_newick(b.species_newick);
    if (b.model == PopulationModel::ContinuousLinear) species = detail::fill_linear_bottoms(species);

    std::vector<PhyloTree> genes;
    for (const auto& nw : b.gene_newicks) genes.push_back(parse_newick(nw));
    PhyloTree gene;
    if (genes.size() == 1) {
        gene = std::move(genes.front());
    } else {
        Rational top = species.height(species.root());
        for (const auto& g : genes) top = max(top, g.height(g.root()));
        gene = merge_gene_trees(genes, top * Rational(21, 20));
    }

    std::map<std::string, std::string> map;
    if (b.mapping.empty()) {
        for (NodeId l : gene.leaves()) {
            const auto& lab = gene.label(l);
            const auto at = lab.rfind('@');
            if (at == std::string::npos) throw InstanceError("unmapped gene leaf " + lab);
            map[lab] = lab.substr(at + 1);
        }
    } else {
        for (const auto& [g, s] : b.mapping) {
            if (!gene.find_leaf(g)) throw InstanceError("mapping refers to unknown gene leaf " + g);
            if (!map.emplace(g, s).second) throw InstanceError("gene leaf " + g + " is mapped twice");
        }
    }
    std::vector<NodeId> phi(gene.size(), 0);
    for (NodeId l : gene.leaves()) {
        const auto it = map.find(gene.label(l));
        if (it == map.end()) throw InstanceError("unmapped gene leaf " + gene.label(l));
        const auto s = species.find_leaf(it->second);
        if (!s) throw InstanceError("mapping refers to unknown species " + it->second);
        phi[l] = *s;
    }
    MSCInstance inst(std::move(species), std::move(gene), std::move(phi), b.model, genes.size());
    auto report = validate_msc(inst);
    if (!report.ok) throw ValidationError(std::move(report));
    return inst;
}

/// Inverse of parse_instance: the merged gene tree is split back into its
/// source trees so that parsing the result reproduces the instance.
inline InstanceBundle instance_to_bundle(const MSCInstance& inst) {
    InstanceBundle b;
    b.model = inst.model();
    b.species_newick = to_newick(inst.species());
    const auto& T = inst.gene();
    const std::size_t k = inst.source_trees();
    if (k <= 1) {
        b.gene_newicks.push_back(to_newick(T));
    } else {
        std::vector<NodeId> roots(k);
        NodeId cur = T.root();
        for (std::size_t i = k; i-- > 1;) {
            roots[i] = T.children(cur).at(1);
            cur = T.children(cur).at(0);
        }
        roots[0] = cur;
        for (NodeId r : roots) b.gene_newicks.push_back(to_newick(T, r));
    }
    for (NodeId l : T.leaves()) b.mapping.emplace_back(T.label(l), inst.species().label(inst.phi(l)));
    return b;
}

inline std::string emit_instance(const MSCInstance& inst) { return bundle_to_json(instance_to_bundle(inst)); }

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InstanceError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline MSCInstance load_instance(const std::string& path) { return parse_instance(bundle_from_json(read_text_file(path))); }

/// Instance equality up to node ids and rotations.
inline bool isomorphic(const MSCInstance& a, const MSCInstance& b) {
    auto gene_sig = [](const MSCInstance& x) {
        // fold species labels into gene leaf labels so phi is compared too
        auto nodes = x.gene().nodes();
        for (NodeId l : x.gene().leaves()) nodes[l].label += "->" + x.species().label(x.phi(l));
        return tree_signature(PhyloTree(std::move(nodes), x.gene().root()));
    };
    return a.model() == b.model() && a.source_trees() == b.source_trees() &&
           tree_signature(a.species()) == tree_signature(b.species()) && gene_sig(a) == gene_sig(b);
}

}  // namespace coalview
