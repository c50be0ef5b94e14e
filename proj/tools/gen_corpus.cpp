#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "coalview/generate.hpp"
#include "coalview/io.hpp"

using namespace coalview;

namespace {

void put(const std::filesystem::path& dir, const std::string& name, const std::string& json) {
    std::ofstream(dir / (name + ".json"), std::ios::binary) << json;
}

std::string numbered(const char* stem, int k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%02d", stem, k);
    return buf;
}

}  // namespace

// Writes the bundled synthetic corpus; the output is deterministic.
int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: gen_corpus <outdir>\n";
        return 1;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);

    InstanceBundle i1;
    i1.species_newick = "(A[&pop=2]:2,B[&pop=1]:2)[&pop=3];";
    i1.gene_newicks = {"((a1:3,b1:3)u:1,a2:4)r;"};
    i1.mapping = {{"a1", "A"}, {"a2", "A"}, {"b1", "B"}};
    put(dir, "i1", bundle_to_json(i1));

    InstanceBundle dc;
    dc.species_newick = "(A[&pop=1]:1,B[&pop=1]:1)[&pop=1];";
    dc.gene_newicks = {"((x:2,y:2):2,(w:3,z:3):1);"};
    dc.mapping = {{"x", "A"}, {"w", "A"}, {"y", "B"}, {"z", "B"}};
    put(dir, "double_cherry", bundle_to_json(dc));

    InstanceBundle lin;
    lin.species_newick = "((A[&pop_bottom=2,pop_top=3]:1,B[&pop=1]:1)[&pop_top=2]:1,C[&pop=3]:2)[&pop_top=1];";
    lin.gene_newicks = {"(((a1:1.5,b1:1.5):1.25,(a2:2.5,c1:2.5):0.25):0.5,c2:3.25);"};
    lin.mapping = {{"a1", "A"}, {"a2", "A"}, {"b1", "B"}, {"c1", "C"}, {"c2", "C"}};
    lin.model = PopulationModel::ContinuousLinear;
    put(dir, "linear", bundle_to_json(lin));

    for (int k = 1; k <= 24; ++k) {
        RandomParams s;
        s.species = 2 + static_cast<std::size_t>(k % 4);
        s.genes = s.species + 2 + static_cast<std::size_t>(k % 5);
        s.seed = 1000 + static_cast<std::uint64_t>(k);
        s.grid = k % 2 ? 1000 : 3;
        s.population_spread = 1 + k % 3;
        put(dir, numbered("random", k), emit_instance(random_instance(s)));
    }
    for (int k = 1; k <= 8; ++k) {
        RandomParams s;
        s.species = 3 + static_cast<std::size_t>(k % 2);
        s.genes = 6 + static_cast<std::size_t>(k % 3);
        s.seed = 2000 + static_cast<std::uint64_t>(k);
        put(dir, numbered("planar", k), emit_instance(planar_instance(s).instance));
    }
    for (int k = 1; k <= 12; ++k) {
        RandomParams s;
        s.species = 4 + static_cast<std::size_t>(k % 3);
        s.genes = 12 + static_cast<std::size_t>(k % 5);
        s.seed = 4000 + static_cast<std::uint64_t>(k);
        s.grid = 1000;
        s.population_spread = 3;
        put(dir, numbered("larger", k), emit_instance(random_instance(s)));
    }
    for (int k : {1, 2, 4}) {
        RandomParams s;
        s.species = 5 + static_cast<std::size_t>(k % 3);
        s.genes = 20 + 2 * static_cast<std::size_t>(k);
        s.seed = 5000 + static_cast<std::uint64_t>(k);
        put(dir, numbered("medium", k), emit_instance(random_instance(s)));
    }
    for (int k = 1; k <= 4; ++k) {
        RandomParams s;
        s.species = 3;
        s.genes = 8;
        s.seed = 3000 + static_cast<std::uint64_t>(k);
        s.grid = 2;
        put(dir, numbered("coincident", k), emit_instance(random_instance(s)));
    }
    return 0;
}
