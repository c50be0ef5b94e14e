#include <gtest/gtest.h>

#include "coalview/generate.hpp"
#include "coalview/heuristics.hpp"
#include "fixtures.hpp"

using namespace coalview;
using fixtures::order;

TEST(Ftt, ReferenceInstanceIsPlanar) {
    const auto inst = fixtures::i1();
    const auto e = ftt_heuristic(inst, fixtures::ids(inst.species(), {"A", "B"}));
    EXPECT_TRUE(validate_order(inst, e));
    EXPECT_EQ(count_crossings(inst, e).count, 0u);
    EXPECT_EQ(e.gene_order, fixtures::ids(inst.gene(), {"a2", "a1", "b1"}));
}

TEST(Ftt, RejectsUnrealizableSpeciesOrder) {
    const auto inst = fixtures::make("((A:1,B:1):1,C:2);", {"((a:1.5,b:1.5):1,c:2.5);"},
                                     {{"a", "A"}, {"b", "B"}, {"c", "C"}});
    EXPECT_THROW(ftt_heuristic(inst, fixtures::ids(inst.species(), {"A", "C", "B"})), EmbeddingError);
}

TEST(Ftt, SingleSpeciesInstance) {
    const auto inst = fixtures::make("(A:1);", {"((a1:1,a2:1):1,a3:2);"}, {{"a1", "A"}, {"a2", "A"}, {"a3", "A"}});
    const auto e = ftt_heuristic(inst, fixtures::ids(inst.species(), {"A"}));
    EXPECT_TRUE(validate_order(inst, e));
    EXPECT_EQ(count_crossings(inst, e).count, 0u);
}

TEST(Vtt, CaterpillarExtremesBecomeAdjacent) {
    // species (((A,B),C),D) with a gene cherry joining A and D
    const auto inst = fixtures::make("(((A:1,B:1):1,C:2):1,D:3);", {"(((a:3.5,d:3.5):1,(b:2.5,c:2.5):2):1,e:5.5);"},
                                     {{"a", "A"}, {"b", "B"}, {"c", "C"}, {"d", "D"}, {"e", "D"}});
    const auto e = vtt_heuristic(inst, Rotations(inst.species().size(), false));
    EXPECT_TRUE(validate_order(inst, e));
    EXPECT_EQ(count_crossings(inst, e).count, 0u);
}

TEST(Vtt, ConcordantInstancesAreCrossingFree) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto inst = concordant_instance({6, 6, seed});
        for (std::uint64_t r = 0; r < 3; ++r) {
            const auto e = vtt_heuristic(inst, restart_rotations(inst.species(), seed, r));
            EXPECT_EQ(count_crossings(inst, e).count, 0u) << "seed " << seed;
        }
    }
}

TEST(Heuristics, OutputsAreValidEmbeddings) {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const auto inst = random_instance({1 + seed % 5, 1 + seed % 5 + seed % 8, seed});
        const auto f = ftt_heuristic(inst, inst.species().clade(inst.species().root()));
        EXPECT_TRUE(validate_order(inst, f)) << seed;
        const auto v = vtt_heuristic(inst, restart_rotations(inst.species(), seed, 1));
        EXPECT_TRUE(validate_order(inst, v)) << seed;
    }
}

TEST(PlanarRecovery, FttFindsCrossingFreeDrawings) {
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        const auto p = planar_instance({2 + seed % 4, 4 + seed % 10, seed});
        ASSERT_EQ(count_crossings(p.instance, p.drawing).count, 0u);
        const auto e = ftt_heuristic(p.instance, p.drawing.species_order);
        EXPECT_EQ(count_crossings(p.instance, e).count, 0u) << "seed " << seed;
    }
}

TEST(PlanarRecovery, VttFindsCrossingFreeDrawingsFromInputRotations) {
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        const auto p = planar_instance({2 + seed % 4, 4 + seed % 10, seed});
        const auto e = vtt_heuristic(p.instance, Rotations(p.instance.species().size(), false));
        EXPECT_EQ(count_crossings(p.instance, e).count, 0u) << "seed " << seed;
    }
}

TEST(PlanarRecovery, VttCanMissFromAnUnluckyStart) {
    // The first cross-species cherry joins A and C below their common
    // ancestor, which is never set; from the start (C, A) the root's
    // single-A leaf can no longer reach the outside.
    const auto inst = fixtures::make("((A:2,C:2):1,(B:1,D:1):2);",
                                     {"(a1:4,(((b1:1,b2:1):1,d1:2):1.5,((a3:2.3,c1:2.3):0.1,a2:2.4):1.1):0.5);"},
                                     {{"a1", "A"}, {"a2", "A"}, {"a3", "A"}, {"b1", "B"}, {"b2", "B"}, {"c1", "C"},
                                      {"d1", "D"}});
    const auto planar = fixtures::order(inst, {"A", "C", "B", "D"}, {"a1", "a2", "a3", "c1", "b2", "b1", "d1"});
    ASSERT_TRUE(validate_order(inst, planar));
    EXPECT_EQ(count_crossings(inst, planar).count, 0u);
    Rotations start(inst.species().size(), false);
    start[inst.species().parent(*inst.species().find_leaf("A")).value()] = true;
    const auto e = vtt_heuristic(inst, start);
    EXPECT_GT(count_crossings(inst, e).count, 0u);
}

TEST(MultiRestart, SingleFttRestartMatchesDefaultRun) {
    const auto inst = random_instance({3, 7, 11});
    const auto r = multi_restart(inst, HeuristicMode::Ftt, 1, 5);
    EXPECT_EQ(r.best, ftt_heuristic(inst, inst.species().clade(inst.species().root())));
    ASSERT_EQ(r.runs.size(), 1u);
}

TEST(MultiRestart, DeterministicAndMonotone) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto inst = random_instance({4, 8, seed});
        const auto a = multi_restart(inst, HeuristicMode::Both, 10, seed);
        const auto b = multi_restart(inst, HeuristicMode::Both, 10, seed);
        EXPECT_EQ(a.best, b.best);
        EXPECT_EQ(a.runs.size(), 20u);
        EXPECT_LE(a.best_crossings, a.runs[0].crossings);
        EXPECT_LE(a.best_crossings, a.runs[1].crossings);
    }
}
