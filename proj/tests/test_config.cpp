#include "finsler/config.hpp"

#include <gtest/gtest.h>

#include <string>

using finsler::ParseError;
using finsler::RunConfig;

namespace {

const char* kMinimal = R"cfg(command = "curvature"
[metric]
kind = "riemannian"
dim = 2
g = ["1", "0", "0", "1"]
)cfg";

const char* kWarped = R"cfg(command = "warped-check"
seed = 7
[warped]
einstein_expected = false
[metric]
kind = "warped"
name = "cosine-warp"
warp = "2 + cos(theta)"
[metric.base]
kind = "riemannian"
dim = 1
g = ["1"]
chart = "torus"
[metric.fiber]
kind = "riemannian"
dim = 2
g = ["1", "0", "0", "1"]
chart = "torus"
)cfg";

}  // namespace

TEST(Config, MinimalFillsDefaults) {
    RunConfig c = finsler::parse_config(kMinimal);
    EXPECT_EQ(c.command, "curvature");
    EXPECT_EQ(c.seed, 20240901ull);  // seed is always defined
    EXPECT_EQ(c.budget, 100000);
    EXPECT_EQ(c.samples, 20);
    EXPECT_EQ(c.format, "text");
    EXPECT_DOUBLE_EQ(c.tol.identity, 1e-6);
    EXPECT_DOUBLE_EQ(c.tol.mixed, 1e-8);
    EXPECT_EQ(c.metric.kind, finsler::MetricKind::Riemannian);
    EXPECT_EQ(c.metric.dim, 2);
    // default chart is the [-1, 1] box
    EXPECT_FALSE(c.metric.chart.periodic[0]);
    EXPECT_DOUBLE_EQ(c.metric.chart.domain[0].first, -1.0);
}

TEST(Config, WarpExpressionEvaluates) {
    RunConfig c = finsler::parse_config(kWarped);
    ASSERT_EQ(c.metric.kind, finsler::MetricKind::WarpedProduct);
    double theta = 0.0;
    EXPECT_DOUBLE_EQ(c.metric.warp.eval(&theta, 1, static_cast<const double*>(nullptr), 0), 3.0);
    EXPECT_EQ(c.metric.base->dim, 1);
    EXPECT_EQ(c.metric.fiber->dim, 2);
    EXPECT_EQ(c.seed, 7ull);
}

TEST(Config, MisspelledFieldIsNamedWithLocation) {
    std::string text = std::string("sampels = 3\n") + kMinimal;
    try {
        finsler::parse_config(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("sampels"), std::string::npos);
        EXPECT_EQ(e.line, 1);
    }
}

TEST(Config, SyntaxErrorsCarryLine) {
    try {
        finsler::parse_config("command = \"volume\"\nseed = 3\nbudget = = 4\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 3);
        EXPECT_GT(e.col, 0);
    }
}

TEST(Config, RejectsBadEnumsAndValues) {
    EXPECT_THROW(finsler::parse_config(std::string("format = \"yaml\"\n") + kMinimal), ParseError);
    EXPECT_THROW(finsler::parse_config(std::string("seed = -4\n") + kMinimal), ParseError);
    EXPECT_THROW(finsler::parse_config(std::string(kMinimal) + "[volume]\nform = \"BHX\"\n"),
                 ParseError);
    EXPECT_THROW(finsler::parse_config(std::string(kMinimal) + "[audit]\nop = \"sometimes\"\n"),
                 ParseError);
    EXPECT_THROW(finsler::parse_config(std::string(kMinimal) + "[volume]\nbound_a = 1.0\n"),
                 ParseError);
}

TEST(Config, MissingMetricRejected) {
    EXPECT_THROW(finsler::parse_config("command = \"curvature\"\n"), ParseError);
}

TEST(Config, BadSymbolInMetricNamesTable) {
    std::string text = R"cfg(command = "curvature"
[metric]
kind = "riemannian"
dim = 1
g = ["bogus"]
)cfg";
    try {
        finsler::parse_config(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("metric"), std::string::npos);
        EXPECT_NE(msg.find("bogus"), std::string::npos);
    }
}

TEST(Config, DuplicateKeyRejected) {
    EXPECT_THROW(finsler::parse_config(std::string("seed = 1\nseed = 2\n") + kMinimal),
                 ParseError);
}

TEST(Config, CommentsArraysAndNewlines) {
    const char* text = R"cfg(# geodesic run
command = "geodesic"   # trailing comment
[geodesic]
x0 = [0.1,
      0.2]
y0 = [1.0, 0.0]
t_end = 2.5
[metric]
kind = "riemannian"
dim = 2
g = [
  "1", "0",
  "0", "4"
]
)cfg";
    RunConfig c = finsler::parse_config(text);
    ASSERT_EQ(c.geodesic.x0.size(), 2u);
    EXPECT_DOUBLE_EQ(c.geodesic.x0[1], 0.2);
    EXPECT_DOUBLE_EQ(c.geodesic.t_end, 2.5);
    EXPECT_EQ(c.metric.g_entries.size(), 4u);
}

TEST(Config, RoundTripThroughSerializer) {
    const char* texts[] = {kMinimal, kWarped, R"cfg(command = "volume"
budget = 250000
[tolerances]
identity = 1e-7
[volume]
form = "BH"
bound_a = 1.0
bound_b = 3.0
[metric]
kind = "randers"
name = "drift"
b = ["0.2 + 0.1*sin(x1)", "0"]
[metric.alpha]
kind = "riemannian"
dim = 2
g = ["1", "0", "0", "1"]
chart = "torus"
period = 6.283185307179586
)cfg",
                           R"cfg(command = "curvature"
[metric]
kind = "minkowski"
dim = 2
norm = "(y1^4 + y2^4 + 2.2*y1^2*y2^2)^0.25"
)cfg",
                           R"cfg(command = "audit"
[audit]
op = "triviality"
lambda_claim = -1.0
[grid]
base_per_dim = 32
[metric]
kind = "warped"
warp = "1.5 + 0.3*cos(theta)"
[metric.base]
kind = "riemannian"
dim = 1
g = ["1"]
chart = "torus"
[metric.fiber]
kind = "riemannian"
dim = 2
g = ["1", "0", "0", "1"]
chart = "custom"
periodic = [true, false]
period = [6.283185307179586, 0.0]
domain = [[0.0, 6.283185307179586], [-2.0, 2.0]]
)cfg"};
    for (const char* t : texts) {
        RunConfig a = finsler::parse_config(t);
        std::string s1 = finsler::serialize_config(a);
        RunConfig b = finsler::parse_config(s1);
        std::string s2 = finsler::serialize_config(b);
        EXPECT_EQ(s1, s2);
        EXPECT_TRUE(a == b);
    }
}

TEST(Config, SerializerIsCanonicalForEquivalentInputs) {
    // key order inside a table does not affect the canonical form
    const char* reordered = R"cfg(command = "curvature"
[metric]
g = ["1", "0", "0", "1"]
dim = 2
kind = "riemannian"
)cfg";
    RunConfig a = finsler::parse_config(kMinimal);
    RunConfig b = finsler::parse_config(reordered);
    EXPECT_EQ(finsler::serialize_config(a), finsler::serialize_config(b));
}

TEST(Config, CustomChartSurvivesRoundTrip) {
    const char* text = R"cfg(command = "curvature"
[metric]
kind = "riemannian"
name = "sphere2"
dim = 2
g = ["1", "0", "0", "sin(theta)^2"]
chart = "custom"
periodic = [false, true]
period = [0.0, 6.283185307179586]
domain = [[0.35, 2.79], [0.0, 6.283185307179586]]
)cfg";
    RunConfig a = finsler::parse_config(text);
    RunConfig b = finsler::parse_config(finsler::serialize_config(a));
    EXPECT_TRUE(a == b);
    EXPECT_FALSE(b.metric.chart.periodic[0]);
    EXPECT_TRUE(b.metric.chart.periodic[1]);
    EXPECT_DOUBLE_EQ(b.metric.chart.domain[0].first, 0.35);
}
