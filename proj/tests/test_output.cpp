#include <gtest/gtest.h>

#include <sstream>

#include "hypdisk/crit.hpp"
#include "hypdisk/flow.hpp"
#include "hypdisk/levels.hpp"
#include "hypdisk/svg.hpp"

using namespace hypdisk;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
    return n;
}

void add_level(Plot& plot, const LevelCurve& c) {
    std::stringstream ss;
    write_level_csv(ss, c);
    EXPECT_EQ(read_plot_input(ss, "level.csv", plot), PlotInputKind::level);
}

void add_trajectory(Plot& plot, const Trajectory& tr) {
    std::stringstream ss;
    write_trajectory_csv(ss, tr);
    EXPECT_EQ(read_plot_input(ss, "traj.csv", plot), PlotInputKind::trajectory);
}

Plot example4_plot() {
    const Expr phi = builtins::example4(0.6);
    Plot plot;
    add_level(plot, trace_level(phi, 0.8, 0.5));
    TraceOptions o;
    o.direction = Direction::forward;
    add_trajectory(plot, trace_trajectory(phi, 0.2, o));
    return plot;
}

} // namespace

TEST(Svg, ExampleFourCircleAndRadialPolyline) {
    const Plot plot = example4_plot();
    ASSERT_EQ(plot.levels.size(), 1u);
    EXPECT_TRUE(plot.levels[0].closed);
    for (const Complex& v : plot.levels[0].points) EXPECT_NEAR(std::abs(v), 0.5, 1e-8);
    ASSERT_EQ(plot.trajectories.size(), 1u);
    for (const Complex& v : plot.trajectories[0].points) EXPECT_LT(std::abs(v.imag()), 1e-12);

    const std::string svg = render_svg(plot);
    EXPECT_EQ(count(svg, "<path "), 1u);
    EXPECT_EQ(count(svg, " Z\"/>"), 1u);
    EXPECT_EQ(count(svg, "<polyline "), 1u);
    EXPECT_EQ(count(svg, "<circle class=\"disk\""), 1u);
    EXPECT_NE(svg.find("viewBox=\"-1 -1 2 2\""), std::string::npos);
    EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
    EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
}

TEST(Svg, ExampleTwoFourArcs) {
    const Expr phi = builtins::example2(0.5);
    Plot plot;
    for (double t : {0.25, 0.4}) {
        const auto cs = components(phi, t, 32);
        ASSERT_EQ(cs.size(), 2u) << t;
        for (const LevelCurve& c : cs) add_level(plot, c);
    }
    const std::string svg = render_svg(plot);
    EXPECT_EQ(count(svg, "<path "), 4u);
    EXPECT_EQ(count(svg, " Z\"/>"), 0u);
}

TEST(Svg, Deterministic) {
    const std::string a = render_svg(example4_plot());
    const std::string b = render_svg(example4_plot());
    EXPECT_EQ(a, b);
}

TEST(Svg, ImaginaryAxisPointsUp) {
    Plot plot;
    plot.trajectories.push_back({{Complex(0.0, 0.5), Complex(0.25, -0.5)}, false});
    const std::string svg = render_svg(plot);
    EXPECT_NE(svg.find("points=\"0.000000,-0.500000 0.250000,0.500000\""), std::string::npos);
}

TEST(Svg, CriticalMarkers) {
    std::stringstream ss;
    write_critical_report(ss, find_critical_points(builtins::example4(0.6), 16));
    Plot plot;
    EXPECT_EQ(read_plot_input(ss, "crit.csv", plot), PlotInputKind::critical);
    ASSERT_EQ(plot.markers.size(), 1u);
    const std::string svg = render_svg(plot);
    EXPECT_EQ(count(svg, "<circle class=\"phi_prime_zero\""), 1u);
    EXPECT_NE(svg.find("<title>local_min</title>"), std::string::npos);
}

TEST(Svg, Options) {
    RenderOptions o;
    o.show_disk = false;
    o.width_px = 400;
    o.level_color = "red";
    const std::string svg = render_svg(example4_plot(), o);
    EXPECT_EQ(count(svg, "class=\"disk\""), 0u);
    EXPECT_NE(svg.find("width=\"400\" height=\"400\""), std::string::npos);
    EXPECT_NE(svg.find("stroke=\"red\""), std::string::npos);
    o.level_color = "\"/><script>";
    EXPECT_THROW((void)render_svg(Plot{}, o), Error);
    o.level_color = "#abc";
    o.width_px = 4;
    EXPECT_THROW((void)render_svg(Plot{}, o), Error);
}

TEST(Svg, MalformedInput) {
    auto fails = [](const std::string& text) {
        std::stringstream ss(text);
        Plot plot;
        try {
            (void)read_plot_input(ss, "bad.csv", plot);
        } catch (const Error& e) {
            return e.kind() == ErrorKind::parse;
        }
        return false;
    };
    EXPECT_TRUE(fails(""));
    EXPECT_TRUE(fails("x,y\n1,2\n"));
    EXPECT_TRUE(fails("t,re_z,im_z\n"));
    EXPECT_TRUE(fails("t,re_z,im_z\n0.5,0.1\n"));
    EXPECT_TRUE(fails("t,re_z,im_z\n0.5,0.1,abc\n"));
    EXPECT_TRUE(fails("t,re_z,im_z\n0.5,0.1,0.2x\n"));
    EXPECT_TRUE(fails("t,re_z,im_z\n0.5,inf,0.2\n"));
}

TEST(Csv, RoundTripIsExact) {
    const LevelCurve c = trace_level(builtins::example4(0.6), 0.8, 0.5);
    Plot plot;
    add_level(plot, c);
    ASSERT_EQ(plot.levels[0].points.size() + 1, c.vertices.size());
    for (std::size_t i = 0; i < plot.levels[0].points.size(); ++i) EXPECT_EQ(plot.levels[0].points[i], c.vertices[i]);
}
