#include <gtest/gtest.h>

#include "coalview/exact.hpp"
#include "coalview/generate.hpp"
#include "fixtures.hpp"

using namespace coalview;

TEST(IlpModel, VariableFamiliesOnSmallInstance) {
    const auto inst = fixtures::i1();
    const auto m = build_ilp(inst);
    EXPECT_EQ(m.count("x_"), 5u);
    EXPECT_EQ(m.count("z_"), 8u);
    EXPECT_EQ(m.count("lb_"), 8u);
    EXPECT_EQ(m.count("rb_"), 8u);
    EXPECT_EQ(m.count("o_"), 3u);
    EXPECT_EQ(m.count("Jl_"), 3u);
    EXPECT_EQ(m.vertical_overlaps.size(), 1u);
}

TEST(IlpModel, FixedOrderDropsSpeciesLeafIntervals) {
    const auto inst = fixtures::i1();
    const auto m = build_ilp(inst, fixtures::ids(inst.species(), {"A", "B"}));
    EXPECT_EQ(m.count("Jl_"), 1u);
    EXPECT_THROW(build_ilp(inst, std::vector<NodeId>{0}), EmbeddingError);
}

TEST(IlpModel, InducedAssignmentMatchesCrossingCount) {
    const auto inst = fixtures::i1();
    const auto m = build_ilp(inst);
    const auto good = evaluate_model(m, fixtures::order(inst, {"A", "B"}, {"a2", "a1", "b1"}));
    EXPECT_TRUE(good.feasible);
    EXPECT_EQ(good.objective, Rational(0));
    const auto bad = evaluate_model(m, fixtures::order(inst, {"A", "B"}, {"a1", "a2", "b1"}));
    EXPECT_TRUE(bad.feasible);
    EXPECT_EQ(bad.objective, Rational(1));
}

TEST(IlpModel, InterleavedSpeciesViolatesIntervalWidth) {
    const auto inst = fixtures::i1();
    const auto m = build_ilp(inst);
    const auto ev = evaluate_model(m, fixtures::order(inst, {"A", "B"}, {"a1", "b1", "a2"}));
    EXPECT_FALSE(ev.feasible);
    bool names_j = false;
    for (const auto& r : ev.violated) names_j = names_j || r.rfind("Jwidth", 0) == 0;
    EXPECT_TRUE(names_j);
}

TEST(IlpModel, ObjectiveEqualsCountOnValidOrders) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto inst = random_instance({2 + seed % 3, 4 + seed % 4, seed});
        const auto m = build_ilp(inst);
        const auto e = ftt_heuristic(inst, inst.species().clade(inst.species().root()));
        const auto ev = evaluate_model(m, e);
        ASSERT_TRUE(ev.feasible) << seed;
        EXPECT_EQ(ev.objective, Rational(static_cast<std::int64_t>(count_crossings(inst, e).count))) << seed;
    }
}

TEST(IlpModel, LpTextHasAllSections) {
    const auto lp = emit_lp(build_ilp(fixtures::i1()));
    std::size_t at = 0;
    for (const char* s : {"Minimize", "Subject To", "Bounds", "Binaries", "Generals", "End"}) {
        const auto p = lp.find(std::string("\n") + s + "\n");
        ASSERT_NE(p, std::string::npos) << s;
        EXPECT_GT(p, at);
        at = p;
    }
    EXPECT_NE(lp.find(" Jwidth_s"), std::string::npos);
}

TEST(SolveExact, SmallInstances) {
    const auto a = solve_exact(fixtures::i1());
    EXPECT_EQ(a.crossings, 0u);
    EXPECT_TRUE(a.certified);
    const auto b = solve_exact(fixtures::double_cherry());
    EXPECT_EQ(b.crossings, 1u);
    EXPECT_TRUE(b.certified);
    EXPECT_EQ(count_crossings(fixtures::double_cherry(), b.embedding).count, 1u);
}

TEST(SolveExact, AgreesWithOracle) {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const auto inst = random_instance({1 + seed % 4, 4 + seed % 6, seed});
        const auto fixed = inst.species().clade(inst.species().root());
        const auto v = solve_exact(inst);
        const auto f = solve_exact(inst, fixed);
        ASSERT_TRUE(v.certified && f.certified);
        EXPECT_EQ(v.crossings, brute_force_oracle(inst)) << seed;
        EXPECT_EQ(f.crossings, brute_force_oracle(inst, fixed)) << seed;
        EXPECT_LE(v.crossings, f.crossings);
        EXPECT_TRUE(validate_order(inst, v.embedding));
        EXPECT_EQ(count_crossings(inst, v.embedding).count, v.crossings);
        EXPECT_EQ(evaluate_model(build_ilp(inst), v.embedding).objective,
                  Rational(static_cast<std::int64_t>(v.crossings)));
    }
}

TEST(SolveExact, TinyBudgetIsNotCertified) {
    const auto inst = random_instance({3, 8, 5});
    const auto r = solve_exact(inst, std::nullopt, 1);
    EXPECT_FALSE(r.certified);
    EXPECT_TRUE(validate_order(inst, r.embedding));
}

TEST(Oracle, RefusesLargeInstances) {
    EXPECT_THROW(brute_force_oracle(random_instance({2, 10, 1})), std::invalid_argument);
}
