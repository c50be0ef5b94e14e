#pragma once

#include <string>
#include <vector>

#include "coalview/io.hpp"

namespace fixtures {

using namespace coalview;

inline MSCInstance make(const std::string& species, const std::vector<std::string>& genes,
                        std::vector<std::pair<std::string, std::string>> mapping,
                        PopulationModel model = PopulationModel::PiecewiseConstant) {
    InstanceBundle b;
    b.species_newick = species;
    b.gene_newicks = genes;
    b.mapping = std::move(mapping);
    b.model = model;
    return parse_instance(b);
}

/// Two species, three gene leaves; the cherry (a1, b1) is the only inner
/// vertex below the root.
inline MSCInstance i1() {
    return make("(A[&pop=2]:2,B[&pop=1]:2)[&pop=3];", {"((a1:3,b1:3)u:1,a2:4)r;"},
                {{"a1", "A"}, {"a2", "A"}, {"b1", "B"}});
}

/// Two interleaved cross-species cherries; every drawing has a crossing.
inline MSCInstance double_cherry() {
    return make("(A[&pop=1]:1,B[&pop=1]:1)[&pop=1];", {"((x:2,y:2):2,(w:3,z:3):1);"},
                {{"x", "A"}, {"w", "A"}, {"y", "B"}, {"z", "B"}});
}

inline std::vector<NodeId> ids(const PhyloTree& t, const std::vector<std::string>& labels) {
    std::vector<NodeId> out;
    for (const auto& l : labels) out.push_back(*t.find_leaf(l));
    return out;
}

inline Embedding order(const MSCInstance& inst, const std::vector<std::string>& species,
                       const std::vector<std::string>& genes) {
    return {ids(inst.species(), species), ids(inst.gene(), genes)};
}

}  // namespace fixtures
