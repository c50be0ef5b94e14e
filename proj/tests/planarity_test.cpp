#include <gtest/gtest.h>

#include "coalview/generate.hpp"
#include "coalview/planarity.hpp"
#include "fixtures.hpp"

using namespace coalview;

TEST(PlanarityDigraph, VariableModeMergesSpeciesLeaves) {
    const auto inst = fixtures::i1();
    const auto g = build_planarity_digraph(inst);
    EXPECT_EQ(g.vertices.size(), 2u + 3u);
    EXPECT_EQ(g.arcs.size(), 4u + 2u);
    EXPECT_TRUE(g.acyclic());
}

TEST(PlanarityDigraph, FixedModeAddsSpacers) {
    const auto inst = fixtures::i1();
    const auto g = build_planarity_digraph(inst, fixtures::ids(inst.species(), {"A", "B"}));
    ASSERT_EQ(g.vertices.size(), 6u);
    const auto& u = g.vertices.back();
    EXPECT_EQ(u.name, "u1");
    std::vector<std::pair<std::string, std::string>> into_u, out_u;
    for (const auto& [a, b] : g.arcs) {
        if (g.vertices[b].name == "u1") into_u.emplace_back(g.vertices[a].name, "u1");
        if (g.vertices[a].name == "u1") out_u.emplace_back("u1", g.vertices[b].name);
    }
    EXPECT_EQ(into_u, (std::vector<std::pair<std::string, std::string>>{{"v1", "u1"}, {"v2", "u1"}}));
    EXPECT_EQ(out_u, (std::vector<std::pair<std::string, std::string>>{{"u1", "t"}}));
}

TEST(PlanarityDigraph, SingleSourceSingleSinkAcyclic) {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const auto inst = random_instance({1 + seed % 5, 5 + seed % 9, seed});
        for (bool fixed : {false, true}) {
            const auto g = fixed ? build_planarity_digraph(inst, inst.species().clade(inst.species().root()))
                                 : build_planarity_digraph(inst);
            const auto in = g.in_degree(), out = g.out_degree();
            std::size_t sources = 0, sinks = 0;
            for (std::size_t v = 0; v < g.vertices.size(); ++v) {
                sources += in[v] == 0;
                sinks += out[v] == 0;
            }
            EXPECT_EQ(sources, 1u);
            EXPECT_EQ(sinks, 1u);
            EXPECT_EQ(in[g.source], 0u);
            EXPECT_EQ(out[g.sink], 0u);
            EXPECT_TRUE(g.acyclic());
        }
    }
}

TEST(PlanarityDigraph, DotExportIsStable) {
    const auto inst = fixtures::i1();
    const auto dot = planarity_dot(inst, build_planarity_digraph(inst));
    EXPECT_EQ(dot, planarity_dot(inst, build_planarity_digraph(inst)));
    EXPECT_NE(dot.find("v1 -> t;"), std::string::npos);
    EXPECT_NE(dot.find("doublecircle"), std::string::npos);
}

TEST(IsPlanar, SmallCases) {
    EXPECT_TRUE(is_planar(fixtures::i1()));
    const auto dc = fixtures::double_cherry();
    EXPECT_FALSE(is_planar(dc));
    EXPECT_FALSE(is_planar(dc, dc.species().clade(dc.species().root())));
    for (std::uint64_t seed = 1; seed <= 20; ++seed) EXPECT_TRUE(is_planar(concordant_instance({1 + seed % 6, 0, seed})));
}

TEST(IsPlanar, RotatedSpeciesOrderLosesFixedPlanarity) {
    bool found = false;
    for (std::uint64_t seed = 1; seed <= 100 && !found; ++seed) {
        const auto p = planar_instance({3, 7, seed});
        const auto& S = p.instance.species();
        Rotations rot(S.size(), false);
        for (NodeId c : S.children(S.root()))
            if (S.is_binary(c)) rot[c] = true;
        const auto rotated = leaf_order_from_rotations(S, rot);
        if (is_planar(p.instance, rotated)) continue;
        found = true;
        EXPECT_TRUE(is_planar(p.instance, p.drawing.species_order));
        EXPECT_TRUE(is_planar(p.instance));
        EXPECT_GT(brute_force_oracle(p.instance, rotated), 0u);
    }
    EXPECT_TRUE(found);
}

TEST(IsPlanar, AgreesWithOracleInBothModes) {
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
        const auto inst = seed % 2 ? random_instance({1 + seed % 4, 4 + seed % 5, seed})
                                   : planar_instance({1 + seed % 4, 4 + seed % 5, seed}).instance;
        const auto fixed = inst.species().clade(inst.species().root());
        const bool v = is_planar(inst), f = is_planar(inst, fixed);
        EXPECT_EQ(v, brute_force_oracle(inst) == 0) << seed;
        EXPECT_EQ(f, brute_force_oracle(inst, fixed) == 0) << seed;
        if (f) {
            EXPECT_TRUE(v);
        }
    }
}

TEST(IsPlanar, ExactFallbackCoversHeuristicMiss) {
    const auto inst = fixtures::make("((A:2,C:2):1,(B:1,D:1):2);",
                                     {"(a1:4,(((b1:1,b2:1):1,d1:2):1.5,((a3:2.3,c1:2.3):0.1,a2:2.4):1.1):0.5);"},
                                     {{"a1", "A"}, {"a2", "A"}, {"a3", "A"}, {"b1", "B"}, {"b2", "B"}, {"c1", "C"},
                                      {"d1", "D"}});
    const auto rotated = fixtures::ids(inst.species(), {"C", "A", "B", "D"});
    const auto r = planarity(inst, rotated);
    EXPECT_TRUE(r.certified);
    EXPECT_EQ(r.planar, brute_force_oracle(inst, rotated) == 0);
    EXPECT_TRUE(is_planar(inst));
}
