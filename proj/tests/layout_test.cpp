#include <gtest/gtest.h>

#include "coalview/layout.hpp"
#include "fixtures.hpp"

using namespace coalview;
using fixtures::order;

TEST(Rectangular, ReferenceGeometry) {
    const auto inst = fixtures::i1();
    const auto lay = layout_rectangular(inst, order(inst, {"A", "B"}, {"a2", "a1", "b1"}));
    EXPECT_EQ(lay.width, Rational(6));
    EXPECT_EQ(lay.height, Rational(4));
    EXPECT_EQ(lay.vertex[inst.gene().root()].x, Rational(5, 2));
    EXPECT_EQ(lay.species.size(), 3u);
    EXPECT_EQ(lay.edges.size(), 4u);
    EXPECT_EQ(lay.horizontals.size(), 2u);
    EXPECT_EQ(count_crossings_geometric(lay).count, 0u);
}

TEST(Rectangular, SpeciesRectanglesTileByLeafCount) {
    const auto inst = fixtures::i1();
    const auto lay = layout_rectangular(inst, order(inst, {"B", "A"}, {"b1", "a1", "a2"}));
    for (const auto& sh : lay.species) {
        const Rational w = sh.right[0].x - sh.left[0].x;
        const auto& S = inst.species();
        if (S.label(sh.node) == "A") {
            EXPECT_EQ(w, Rational(4));
        } else if (S.label(sh.node) == "B") {
            EXPECT_EQ(w, Rational(2));
        } else {
            EXPECT_EQ(w, Rational(6));
        }
    }
}

TEST(Rectangular, GeometricCountMatchesOnReference) {
    const auto inst = fixtures::double_cherry();
    const auto emb = order(inst, {"A", "B"}, {"x", "w", "y", "z"});
    EXPECT_EQ(count_crossings_geometric(layout_rectangular(inst, emb)).count, count_crossings(inst, emb).count);
}

TEST(Rectangular, CoincidentVerticalsAreSeparated) {
    // the cherry (a1, b) sits at x = 5, directly above leaf a3
    const auto inst = fixtures::make("(A[&pop=1]:1,B[&pop=1]:1)[&pop=1];",
                                     {"(((a1:3,b:3)u:1,a2:4)w:2,(a3:5,a4:5)c:1);"},
                                     {{"a1", "A"}, {"a2", "A"}, {"a3", "A"}, {"a4", "A"}, {"b", "B"}});
    const auto emb = order(inst, {"A", "B"}, {"a2", "a3", "a4", "a1", "b"});
    const auto lay = layout_rectangular(inst, emb);
    EXPECT_EQ(count_crossings_geometric(lay).count, count_crossings(inst, emb).count);
    EXPECT_THROW(layout_rectangular(inst, emb, Rational(1, 4)), EmbeddingError);
}

TEST(Proportional, EqualPopulationsDoubleCherry) {
    const auto inst = fixtures::double_cherry();
    const auto emb = order(inst, {"A", "B"}, {"x", "w", "y", "z"});
    const auto lay = layout_proportional(inst, emb);
    EXPECT_EQ(lay.width, Rational(2));
    EXPECT_EQ(count_crossings_geometric(lay).count, 1u);
}

TEST(Proportional, MirrorSymmetry) {
    const auto inst = fixtures::i1();
    const auto emb = order(inst, {"A", "B"}, {"a2", "a1", "b1"});
    const auto a = layout_proportional(inst, emb);
    const auto b = layout_proportional(inst, mirrored(emb));
    for (NodeId v = 0; v < inst.gene().size(); ++v) {
        EXPECT_EQ(a.vertex[v].x, a.width - b.vertex[v].x);
        EXPECT_EQ(a.vertex[v].y, b.vertex[v].y);
    }
}

TEST(Proportional, EqualPopulationsCanCrossMoreThanRectangular) {
    const auto inst = fixtures::make("(A[&pop=1]:1,B[&pop=1]:1)[&pop=1];", {"(((a1:2,b:2)u:1,a2:3)w:2,(a3:4,a4:4)c:1)r;"},
                                     {{"a1", "A"}, {"a2", "A"}, {"a3", "A"}, {"a4", "A"}, {"b", "B"}});
    const auto emb = order(inst, {"A", "B"}, {"a1", "a2", "a3", "a4", "b"});
    EXPECT_EQ(count_crossings(inst, emb).count, 3u);
    EXPECT_EQ(count_crossings_geometric(layout_rectangular(inst, emb)).count, 3u);
    EXPECT_EQ(count_crossings_geometric(layout_proportional(inst, emb)).count, 4u);
}
