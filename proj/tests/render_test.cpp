#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "coalview/render.hpp"
#include "fixtures.hpp"

using namespace coalview;

namespace {

std::size_t occurrences(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
    return n;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Embedding i1_order(const MSCInstance& inst) { return fixtures::order(inst, {"A", "B"}, {"a2", "a1", "b1"}); }

}  // namespace

TEST(Svg, RectangularGoldenFile) {
    const auto inst = fixtures::i1();
    const auto svg = render_svg(layout_rectangular(inst, i1_order(inst)));
    const auto golden = slurp(std::string(COALVIEW_TEST_DATA) + "/golden/i1_rect.svg");
    ASSERT_FALSE(golden.empty());
    EXPECT_EQ(svg, golden);
    EXPECT_EQ(occurrences(svg, "<path "), 3u);
    EXPECT_EQ(occurrences(svg, "<line "), 6u);
}

TEST(Svg, LineCountEqualsLayoutSegments) {
    const auto inst = fixtures::i1();
    for (const auto& layout : {layout_rectangular(inst, i1_order(inst)), layout_proportional(inst, i1_order(inst))})
        EXPECT_EQ(occurrences(render_svg(layout), "<line "), layout.segment_count());
    const auto dc = fixtures::double_cherry();
    const auto e = fixtures::order(dc, {"A", "B"}, {"x", "w", "y", "z"});
    EXPECT_EQ(occurrences(render_svg(layout_proportional(dc, e)), "<line "), layout_proportional(dc, e).segment_count());
}

TEST(Svg, Deterministic) {
    const auto inst = fixtures::i1();
    RenderOptions o;
    o.population_gradient = true;
    EXPECT_EQ(render_svg(layout_rectangular(inst, i1_order(inst)), o), render_svg(layout_rectangular(inst, i1_order(inst)), o));
}

TEST(Svg, EqualPopulationsGiveIdenticalFills) {
    const auto dc = fixtures::double_cherry();
    RenderOptions o;
    o.population_gradient = true;
    const auto svg = render_svg(layout_rectangular(dc, fixtures::order(dc, {"A", "B"}, {"x", "w", "y", "z"})), o);
    const std::regex fill("<rect [^>]*fill=\"([^\"]+)\"");
    std::set<std::string> fills;
    std::size_t rects = 0;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), fill); it != std::sregex_iterator(); ++it, ++rects)
        fills.insert((*it)[1]);
    EXPECT_EQ(rects, 3u);
    EXPECT_EQ(fills.size(), 1u);
}

TEST(Svg, PopulationIntensityFollowsSize) {
    const auto inst = fixtures::i1();
    RenderOptions o;
    o.population_gradient = true;
    o.palette = "greys";
    const auto svg = render_svg(layout_rectangular(inst, i1_order(inst)), o);
    // pop 1 maps to 10%, pop 3 to 90%
    EXPECT_NE(svg.find(detail::tint({82, 82, 82}, 0.1)), std::string::npos);
    EXPECT_NE(svg.find(detail::tint({82, 82, 82}, 0.9)), std::string::npos);
    EXPECT_NE(svg.find(detail::tint({82, 82, 82}, 0.5)), std::string::npos);
    o.palette = "rainbow";
    EXPECT_THROW(render_svg(layout_rectangular(inst, i1_order(inst)), o), std::invalid_argument);
}

TEST(Svg, LinearPopulationsUseVerticalGradients) {
    const auto inst = fixtures::make("(A[&pop_bottom=2,pop_top=3]:2,B[&pop=4]:2)[&pop_top=1];", {"((a1:3,b1:3):1,a2:4);"},
                                     {{"a1", "A"}, {"a2", "A"}, {"b1", "B"}}, PopulationModel::ContinuousLinear);
    RenderOptions o;
    o.population_gradient = true;
    const auto svg = render_svg(layout_rectangular(inst, fixtures::order(inst, {"A", "B"}, {"a2", "a1", "b1"})), o);
    EXPECT_GE(occurrences(svg, "<linearGradient "), 2u);
    EXPECT_NE(svg.find("fill=\"url(#pop0)\""), std::string::npos);
}

TEST(Svg, LabelsCanBeSwitchedOff) {
    const auto inst = fixtures::i1();
    RenderOptions o;
    o.show_labels = false;
    const auto svg = render_svg(layout_rectangular(inst, i1_order(inst)), o);
    EXPECT_EQ(svg.find("<text"), std::string::npos);
    EXPECT_EQ(occurrences(render_svg(layout_rectangular(inst, i1_order(inst))), "<text"), 5u);
}

TEST(Svg, ProportionalDrawsClosedTrapezoids) {
    const auto inst = fixtures::i1();
    const auto svg = render_svg(layout_proportional(inst, i1_order(inst)));
    EXPECT_EQ(occurrences(svg, " Z\""), 3u);
    EXPECT_NE(svg.find("viewBox=\"0 0 "), std::string::npos);
}

TEST(Svg, EscapesLabels) {
    const auto inst = fixtures::make("(A:1,B:1);", {"(x&1:2,y<2:2);"}, {{"x&1", "A"}, {"y<2", "B"}});
    const auto svg = render_svg(layout_rectangular(inst, fixtures::order(inst, {"A", "B"}, {"x&1", "y<2"})));
    EXPECT_NE(svg.find("x&amp;1"), std::string::npos);
    EXPECT_NE(svg.find("y&lt;2"), std::string::npos);
}
