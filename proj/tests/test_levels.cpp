#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hypdisk/flow.hpp"
#include "hypdisk/levels.hpp"
#include "hypdisk/oracles.hpp"

using namespace hypdisk;

namespace {

const double pi = std::numbers::pi;

double level_drift(const Expr& phi, const LevelCurve& c) {
    double d = 0.0;
    for (const Complex& v : c.vertices) d = std::max(d, std::abs(std::abs(hyp_derivative(phi, v)) - c.t));
    return d;
}

Complex upper_seed(const Expr& phi, double t) {
    for (const Complex& s : seed_points(phi, t, 32))
        if (s.imag() > 0.2) return s;
    ADD_FAILURE() << "no seed in the upper half-plane";
    return {};
}

bool segments_cross(Complex a, Complex b, Complex c, Complex d) {
    auto cross = [](Complex u, Complex v) { return u.real() * v.imag() - u.imag() * v.real(); };
    const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

} // namespace

TEST(Seeds, ExampleFourOnCircle) {
    const double t = 0.8;
    const double r = (1.0 - std::sqrt(1.0 - t * t)) / t;
    const auto seeds = seed_points(builtins::example4(0.6), t, 32);
    ASSERT_FALSE(seeds.empty());
    for (const Complex& s : seeds) EXPECT_NEAR(std::abs(s), r, 1e-10);
}

TEST(Seeds, AboveSupremumIsEmpty) {
    EXPECT_TRUE(seed_points(builtins::example2(0.5), 0.99, 32).empty());
    EXPECT_THROW((void)seed_points(builtins::example2(0.5), 1.5, 32), Error);
}

TEST(Seeds, ExampleTwoSplitsByHalfPlane) {
    const auto seeds = seed_points(builtins::example2(0.5), 0.25, 32);
    int upper = 0, lower = 0;
    for (const Complex& s : seeds) {
        ASSERT_GT(std::abs(s.imag()), 1e-3);
        (s.imag() > 0 ? upper : lower)++;
    }
    EXPECT_GT(upper, 0);
    EXPECT_EQ(upper, lower);
}

TEST(Trace, ExampleFourClosedCircle) {
    const LevelCurve c = trace_level(builtins::example4(0.6), 0.8, 0.5);
    EXPECT_TRUE(c.closed);
    EXPECT_EQ(c.end_reasons.first, LevelEnd::loop_closed);
    double worst = 0.0;
    for (const Complex& v : c.vertices) worst = std::max(worst, std::abs(std::abs(v) - 0.5));
    EXPECT_LT(worst, 1e-8);
    EXPECT_LT(std::abs(c.vertices.front() - c.vertices.back()), 1e-2);
}

TEST(Trace, ExampleTwoArcThroughPlusMinusOne) {
    const Expr phi = builtins::example2(0.5);
    const LevelCurve c = trace_level(phi, 0.25, upper_seed(phi, 0.25));
    EXPECT_FALSE(c.closed);
    EXPECT_EQ(c.end_reasons.first, LevelEnd::disk_boundary);
    EXPECT_EQ(c.end_reasons.second, LevelEnd::disk_boundary);
    const oracle::Circle fit = oracle::fit_circle(c.vertices);
    EXPECT_LT(std::abs(std::abs(1.0 - fit.centre) - fit.radius), 1e-3);
    EXPECT_LT(std::abs(std::abs(-1.0 - fit.centre) - fit.radius), 1e-3);
    for (const Complex& v : c.vertices) EXPECT_GT(v.imag(), -1e-5);
}

TEST(Trace, ExampleThreeStopsAtSaddle) {
    const Expr phi = builtins::example3(pi / 4);
    const double t0 = std::abs(hyp_derivative(phi, 0.0));
    Complex seed = 0.5;
    for (const Complex& s : seed_points(phi, t0, 32))
        if (std::abs(s) > 0.01 && std::abs(s) < std::abs(seed)) seed = s;
    ASSERT_LT(std::abs(seed), 0.1);
    const LevelCurve c = trace_level(phi, t0, seed);
    const bool first = c.end_reasons.first == LevelEnd::critical_point;
    const bool last = c.end_reasons.second == LevelEnd::critical_point;
    ASSERT_TRUE(first || last);
    EXPECT_LT(std::abs(first ? c.vertices.front() : c.vertices.back()), 1e-4);
}

TEST(Trace, Preconditions) {
    const Expr phi = builtins::example4(0.6);
    EXPECT_THROW((void)trace_level(phi, 0.8, 0.4), Error);
    EXPECT_THROW((void)trace_level(phi, 0.0, 0.0), Error);
    try {
        (void)trace_level(builtins::example2(0.5), 0.5, 0.2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::zero_a);
    }
}

TEST(Trace, StepLimit) {
    LevelOptions o;
    o.max_steps = 10;
    const LevelCurve c = trace_level(builtins::example4(0.6), 0.8, 0.5, o);
    EXPECT_FALSE(c.closed);
    EXPECT_EQ(c.end_reasons.second, LevelEnd::step_limit);
    EXPECT_EQ(c.vertices.size(), 11u);
}

TEST(Components, Counts) {
    EXPECT_EQ(components(builtins::example4(0.6), 0.8, 32).size(), 1u);
    EXPECT_EQ(components(builtins::example2(0.5), 0.25, 32).size(), 2u);
    const auto ex1 = components(builtins::example1(0.5), 0.25, 32);
    ASSERT_EQ(ex1.size(), 1u);
    EXPECT_FALSE(ex1[0].closed);
    EXPECT_TRUE(components(builtins::example2(0.5), 0.99, 32).empty());
}

TEST(LevelProperty, VerticesOnLevelAndSpaced) {
    const Expr phis[] = {builtins::example1(0.5), builtins::example2(0.5), builtins::example3(pi / 3),
                         builtins::example4(0.6)};
    const LevelOptions o;
    for (const Expr& phi : phis) {
        for (double t : {0.3, 0.45}) {
            for (const LevelCurve& c : components(phi, t, 24, o)) {
                EXPECT_LE(level_drift(phi, c), o.level_tol) << unparse(phi) << " t=" << t;
                for (std::size_t i = 1; i < c.vertices.size(); ++i) {
                    EXPECT_LE(std::abs(c.vertices[i] - c.vertices[i - 1]), 2.0 * o.step);
                    EXPECT_LT(std::abs(c.vertices[i]), 1.0);
                }
            }
        }
    }
}

TEST(LevelProperty, OrthogonalToGradient) {
    for (const Expr& phi : {builtins::example1(0.5), builtins::example2(0.5), builtins::example4(0.6)}) {
        for (const LevelCurve& c : components(phi, 0.3, 24)) {
            // Skip two vertices at each end, including the seam of a closed loop.
            for (std::size_t i = 2; i + 2 < c.vertices.size(); ++i) {
                const Complex v = c.vertices[i];
                if (std::abs(v) > 0.95) continue;
                const Complex tan = c.vertices[i + 1] - c.vertices[i - 1];
                const Complex g = grad_absD(phi, v);
                const double angle = std::abs(std::abs(std::arg(tan / g)) - pi / 2);
                EXPECT_LT(angle, 1e-2) << unparse(phi) << " at " << v;
            }
        }
    }
}

TEST(LevelProperty, ExampleOneLevelsNest) {
    // The levels all run into the boundary point -1, where any two of them
    // become arbitrarily close; the separation test is made away from it.
    const Expr phi = builtins::example1(0.5);
    const LevelOptions o;
    const double levels[] = {0.2, 0.3, 0.4, 0.45};
    std::vector<LevelCurve> curves;
    for (double t : levels) {
        auto cs = components(phi, t, 32, o);
        ASSERT_EQ(cs.size(), 1u) << t;
        curves.push_back(cs[0]);
    }
    for (std::size_t a = 0; a < curves.size(); ++a) {
        for (std::size_t b = a + 1; b < curves.size(); ++b) {
            double dmin = 1e9;
            for (const Complex& u : curves[a].vertices) {
                if (std::abs(u + 1.0) < 0.05) continue;
                for (const Complex& v : curves[b].vertices) {
                    if (std::abs(v + 1.0) < 0.05) continue;
                    dmin = std::min(dmin, std::abs(u - v));
                }
            }
            EXPECT_GT(dmin, o.step / 2) << levels[a] << " vs " << levels[b];
            int crossings = 0;
            const auto& P = curves[a].vertices;
            const auto& Q = curves[b].vertices;
            for (std::size_t i = 1; i < P.size(); ++i)
                for (std::size_t j = 1; j < Q.size(); ++j)
                    crossings += segments_cross(P[i - 1], P[i], Q[j - 1], Q[j]) ? 1 : 0;
            EXPECT_EQ(crossings, 0) << levels[a] << " vs " << levels[b];
        }
    }
}

TEST(LevelProperty, TrajectoryCrossesLevelOnce) {
    const Expr phi = builtins::example1(0.5);
    const Trajectory tr = trace_trajectory(phi, {0.1, 0.2});
    for (double t : {0.3, 0.4, 0.45}) {
        if (t <= tr.omega_minus_est || t >= tr.omega_plus_est) continue;
        int changes = 0;
        for (std::size_t i = 1; i < tr.samples.size(); ++i) {
            const double a = std::abs(hyp_derivative(phi, tr.samples[i - 1].z)) - t;
            const double b = std::abs(hyp_derivative(phi, tr.samples[i].z)) - t;
            changes += (a < 0.0) != (b < 0.0) ? 1 : 0;
        }
        EXPECT_EQ(changes, 1) << t;
    }
}

TEST(Csv, LevelAndSidecar) {
    const LevelCurve c = trace_level(builtins::example4(0.6), 0.8, 0.5);
    std::ostringstream csv, meta;
    write_level_csv(csv, c);
    write_level_sidecar(meta, c, 0);
    const std::string text = csv.str();
    EXPECT_EQ(text.substr(0, 12), "t,re_z,im_z\n");
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')),
              c.vertices.size() + 1);
    EXPECT_NE(meta.str().find("closed=true\n"), std::string::npos);
    EXPECT_NE(meta.str().find("end_reason_start=loop_closed\n"), std::string::npos);
    EXPECT_NE(meta.str().find("t=0.80000000000000004\n"), std::string::npos);
}
