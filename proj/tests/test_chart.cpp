#include "monoride/chart.hpp"
#include "monoride/cli.hpp"
#include "monoride/errors.hpp"
#include "monoride/trajectory_io.hpp"

#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace monoride;
using namespace monoride::testing;

namespace {

Table small_table() {
    Table t;
    t.names = {"t", "x1", "u1"};
    t.columns = {{0.0, 1.0, 2.0, 3.0}, {0.0, 0.25, 0.5, 0.6}, {2.0, 2.0, 1.0, 0.5}};
    return t;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST(NiceTicks, OneTwoFiveSteps) {
    EXPECT_EQ(nice_ticks(0.0, 1.0), (std::vector<double>{0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0}));
    EXPECT_EQ(nice_ticks(0.0, 600.0), (std::vector<double>{0.0, 200.0, 400.0, 600.0}));
    const auto t = nice_ticks(-3.0, 7.0);
    EXPECT_EQ(t.front(), -2.0);
    EXPECT_EQ(t.back(), 6.0);
    EXPECT_DOUBLE_EQ(t[1] - t[0], 2.0);
}

TEST(NiceTicks, TicksStayInsideTheRange) {
    for (double hi : {0.3, 1.7, 9.9, 42.0, 1e4}) {
        const auto t = nice_ticks(0.1, hi);
        ASSERT_FALSE(t.empty());
        EXPECT_GE(t.front(), 0.1);
        EXPECT_LE(t.back(), hi * (1 + 1e-12));
        EXPECT_LE(t.size(), 11u);
    }
}

TEST(Chart, OnePolylinePerPanel) {
    const auto svg = render_chart_svg(small_table(), {{"x1", "SOC", "[-]"}, {"u1", "Current", "[A]"}});
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_EQ(count(svg, "<polyline"), 2u);
    EXPECT_NE(svg.find("(a) SOC"), std::string::npos);
    EXPECT_NE(svg.find("(b) Current"), std::string::npos);
    EXPECT_EQ(svg.substr(svg.size() - 7), "</svg>\n");
}

TEST(Chart, Deterministic) {
    const auto panels = std::vector<Panel>{{"x1", "SOC", "[-]"}};
    EXPECT_EQ(render_chart_svg(small_table(), panels), render_chart_svg(small_table(), panels));
}

TEST(Chart, EscapesText) {
    const auto svg = render_chart_svg(small_table(), {{"x1", "a < b & c", "[\"x\"]"}});
    EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
    EXPECT_EQ(svg.find("a < b"), std::string::npos);
}

TEST(Chart, SinglePointIsFlat) {
    Table t;
    t.names = {"t", "x1"};
    t.columns = {{0.0}, {0.5}};
    const auto svg = render_chart_svg(t, {{"x1", "SOC", ""}});
    const auto start = svg.find("points=\"") + 8;
    const auto pts = svg.substr(start, svg.find('"', start) - start);
    EXPECT_EQ(pts.find(' '), std::string::npos) << pts;  // a single vertex
}

TEST(Chart, Errors) {
    Table empty;
    empty.names = {"t", "x1"};
    empty.columns = {{}, {}};
    EXPECT_THROW((void)render_chart_svg(empty, {{"x1", "SOC", ""}}), FormatError);
    EXPECT_THROW((void)render_chart_svg(small_table(), {{"x9", "missing", ""}}), FormatError);
    EXPECT_THROW((void)render_chart_svg(small_table(), {}), ParameterError);
    EXPECT_THROW(emit_chart("/nonexistent/traj.csv", {{"x1", "SOC", ""}}, "/tmp/never.svg"), Error);
}

TEST(Chart, BatteryPanels) {
    EXPECT_EQ(battery_panels(true).size(), 4u);
    EXPECT_EQ(battery_panels(false).size(), 3u);
    EXPECT_EQ(battery_panels(true)[0].column, "u1");
}

TEST(Chart, ReferenceChargeMatchesGolden) {
    const auto traj = read_trajectory_csv_file(data_path("section3/trajectory.csv"));
    const auto table = cli::trajectory_table(traj, reference_ecm());
    EXPECT_EQ(render_chart_svg(table, battery_panels(true)), slurp(data_path("section3/chart.svg")));
}
