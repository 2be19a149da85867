#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "hypdisk/expr.hpp"
#include "hypdisk/oracles.hpp"

using namespace hypdisk;

namespace {

std::vector<std::pair<std::string, Expr>> builtin_cases() {
    return {
        {"example1(0.5)", builtins::example1(0.5)},
        {"example1(0.8)", builtins::example1(0.8)},
        {"example2(0.5)", builtins::example2(0.5)},
        {"example3(pi/4)", builtins::example3(std::numbers::pi / 4)},
        {"example3(pi/6)", builtins::example3(std::numbers::pi / 6)},
        {"example4(0.6)", builtins::example4(0.6)},
        {"mobius", builtins::mobius({0.3, -0.2}, 0.7)},
        {"identity", builtins::identity()},
    };
}

ErrorKind parse_error_kind(const std::string& text) {
    try {
        (void)parse(text);
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error for " << text;
    return ErrorKind::io;
}

} // namespace

TEST(Parse, PowerOfQuotient) {
    const Expr z = Expr::var();
    const Expr want = pow((cst(1.0) + z) / (cst(1.0) - z), 0.5);
    EXPECT_EQ(parse("((1+z)/(1-z))^0.5"), want);
}

TEST(Parse, ExampleOneShape) {
    const Expr e = parse("exp(-((1+z)/(1-z))^0.5)");
    ASSERT_EQ(e.kind(), NodeKind::exp);
    ASSERT_EQ(e.child().kind(), NodeKind::neg);
    ASSERT_EQ(e.child().child().kind(), NodeKind::pow_real);
    EXPECT_EQ(e.child().child().param(), 0.5);
    EXPECT_EQ(e, builtins::example1(0.5));
}

TEST(Parse, Precedence) {
    const Expr z = Expr::var();
    // ^ binds tighter than unary minus, which binds tighter than * and /.
    EXPECT_EQ(parse("-z^2"), -pow(z, 2.0));
    EXPECT_EQ(parse("-z*z"), (-z) * z);
    EXPECT_EQ(parse("z-z-z"), (z - z) - z);
    EXPECT_EQ(parse("z/z/z"), (z / z) / z);
    EXPECT_EQ(parse("z+z*z"), z + z * z);
    const Expr right = parse("z^2^0.5");
    ASSERT_EQ(right.kind(), NodeKind::pow_real);
    EXPECT_NEAR(right.param(), std::sqrt(2.0), 1e-15);
    EXPECT_EQ(parse("z^-0.5"), pow(z, -0.5));
}

TEST(Parse, ConstantsFoldAndLiterals) {
    EXPECT_EQ(parse("2*pi"), cst(2.0 * std::numbers::pi));
    EXPECT_EQ(parse("i*i"), cst(-1.0));
    EXPECT_EQ(parse("1.5e-1 + z"), cst(0.15) + Expr::var());
    EXPECT_EQ(parse("sqrt(z)"), pow(Expr::var(), 0.5));
}

TEST(Parse, Errors) {
    EXPECT_EQ(parse_error_kind("z^i"), ErrorKind::non_real_exponent);
    EXPECT_EQ(parse_error_kind("z^z"), ErrorKind::non_real_exponent);
    EXPECT_EQ(parse_error_kind("w+1"), ErrorKind::unknown_identifier);
    EXPECT_EQ(parse_error_kind("(z+1"), ErrorKind::parse);
    EXPECT_EQ(parse_error_kind("z+"), ErrorKind::parse);
    EXPECT_EQ(parse_error_kind("2 z"), ErrorKind::parse);
    EXPECT_EQ(parse_error_kind("example1(a=2)"), ErrorKind::invalid_argument);
    EXPECT_EQ(parse_error_kind("example1(b=0.5)"), ErrorKind::invalid_argument);
    EXPECT_EQ(parse_error_kind("mobius(a_re=0.3)"), ErrorKind::invalid_argument);
    try {
        (void)parse("z + $");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 4u);
    }
}

TEST(Parse, BuiltinCalls) {
    EXPECT_EQ(parse("example1(a=0.5)"), builtins::example1(0.5));
    EXPECT_EQ(parse("example1(0.5)"), builtins::example1(0.5));
    EXPECT_EQ(parse("example4(c=0.6)"), builtins::example4(0.6));
    EXPECT_EQ(parse("example3(theta=pi/4)"), builtins::example3(std::numbers::pi / 4));
    EXPECT_EQ(parse("mobius(a_re=0.3,a_im=0,theta=0)"), builtins::mobius(0.3, 0.0));
    EXPECT_EQ(parse("identity"), Expr::var());
    EXPECT_EQ(parse("identity()"), Expr::var());
    EXPECT_EQ(builtin_registry().size(), 6u);
}

TEST(Parse, RoundTripCorpus) {
    const std::vector<std::string> corpus{
        "z",
        "((1+z)/(1-z))^0.5",
        "exp(-((1+z)/(1-z))^0.5)",
        "(((1+z)/(1-z))^0.3-1)/(((1+z)/(1-z))^0.3+1)",
        "(z^2-0.36)/(1-0.36*z^2)",
        "0.5*z + 0.1*z^3",
        "-z",
        "-(z*z)",
        "z/(2-z)",
        "log(1+z/2)",
        "coth(2+z)",
        "exp(i*z)/3",
        "(z-0.3*i)/(1+0.3*i*z)",
        "z^-0.5 * 0",
        "sqrt(1+z)/2",
        "z^2^0.5",
        "1 - 2*z + z^3/7",
        "example1(a=0.25)",
        "example3(theta=pi/3)",
        "mobius(0.2,-0.6,1.1)",
    };
    ASSERT_EQ(corpus.size(), 20u);
    for (const auto& s : corpus) {
        const Expr once = parse(s);
        const std::string text = unparse(once);
        const Expr twice = parse(text);
        EXPECT_EQ(once, twice) << s << " -> " << text;
        EXPECT_EQ(unparse(twice), text) << s;
    }
}

TEST(Eval, IdentityJet) { EXPECT_EQ(eval_jet(builtins::identity(), 0.3), Jet3(0.3, 1.0, 0.0, 0.0)); }

TEST(Eval, ExampleFourAtOrigin) {
    const Jet3 j = eval_jet(builtins::example4(0.6), 0.0);
    EXPECT_NEAR(j.f.real(), -0.36, 1e-15);
    EXPECT_NEAR(j.f.imag(), 0.0, 1e-15);
    EXPECT_EQ(std::abs(j.d1), 0.0);
}

TEST(Eval, ExampleFourDerivativeClosedForm) {
    // phi'(z) = 2(1-c^4) z / (1 - c^2 z^2)^2
    const double c = 0.6;
    oracle::DiskSampler rng(5);
    for (int k = 0; k < 50; ++k) {
        const Complex z = rng.point(0.95);
        const Complex want = 2.0 * (1.0 - std::pow(c, 4)) * z / std::pow(1.0 - c * c * z * z, 2);
        EXPECT_LT(std::abs(eval_jet(builtins::example4(c), z).d1 - want), 1e-14);
    }
}

TEST(Eval, EllipticGAgainstSimpson) {
    for (double c : {0.0, 0.5, -0.5, 0.9}) {
        for (Complex z : {Complex(0.5), Complex(0.3, 0.6), Complex(-0.1, -0.85)}) {
            const Jet3 j = eval_jet(Expr::elliptic_g(c, Expr::var()), z);
            const Complex simpson = oracle::simpson_segment(
                [&](Complex s) { return std::pow(1.0 - 2.0 * c * s * s + s * s * s * s, -0.5); },
                0.0, z, 4000);
            EXPECT_LT(std::abs(j.f - simpson), 1e-10) << "c=" << c << " z=" << z;
            EXPECT_LT(std::abs(j.d1 - std::pow(1.0 - 2.0 * c * z * z + std::pow(z, 4), -0.5)), 1e-14);
        }
    }
}

TEST(Eval, EllipticGOutsideDiskFails) {
    EXPECT_THROW((void)eval_jet(Expr::elliptic_g(0.0, Expr::var() * cst(2.0)), 0.6), Error);
    EXPECT_THROW((void)Expr::elliptic_g(1.0, Expr::var()), Error);
}

TEST(Eval, BuiltinsMatchFiniteDifferences) {
    oracle::DiskSampler rng(31337);
    for (const auto& [name, phi] : builtin_cases()) {
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const Complex z = rng.point(0.7);
            const Jet3 j = eval_jet(phi, z);
            const Jet3 fd = fd_jet_oracle([&](Complex w) { return eval_value(phi, w); }, z, 1e-4);
            worst = std::max({worst, oracle::rel_err(j.d1, fd.d1, 1e-3),
                              oracle::rel_err(j.d2, fd.d2, 1e-3),
                              oracle::rel_err(j.d3, fd.d3, 1e-3)});
        }
        EXPECT_LT(worst, 1e-5) << name;
    }
}

TEST(Eval, RegistryAndParsedFormsAgree) {
    const Expr reg = builtins::example1(0.5);
    const Expr txt = parse("exp(-((1+z)/(1-z))^0.5)");
    oracle::DiskSampler rng(3);
    for (int k = 0; k < 20; ++k) {
        const Complex z = rng.point(0.95);
        EXPECT_LT(std::abs(eval_value(reg, z) - eval_value(txt, z)), 1e-14);
    }
}

TEST(Eval, SubstituteComposes) {
    const Expr outer = builtins::example4(0.6);
    const Expr inner = builtins::mobius({0.2, 0.1}, 0.3);
    const Expr both = compose(outer, inner);
    const Complex z(0.1, -0.4);
    EXPECT_LT(std::abs(eval_value(both, z) - eval_value(outer, eval_value(inner, z))), 1e-15);
}

TEST(SelfMap, LensMapIsSelfMap) {
    const SelfMapReport r = check_self_map(builtins::example2(0.5), 40);
    EXPECT_TRUE(r.ok());
    EXPECT_LT(r.max_abs, 1.0);
}

TEST(SelfMap, DoublingIsNot) {
    const SelfMapReport r = check_self_map(parse("2*z"), 20);
    EXPECT_FALSE(r.ok());
    EXPECT_GT(r.violations.size(), 0u);
}

TEST(SelfMap, IdentityMobius) {
    const SelfMapReport r = check_self_map(parse("mobius(0,0,0)"), 10);
    EXPECT_TRUE(r.ok());
    EXPECT_LT(r.max_abs, 1.0);
}

TEST(SelfMap, ErrorsAreReportedPerPoint) {
    const SelfMapReport r = check_self_map(parse("1/z"), 4);
    EXPECT_EQ(r.errors.size(), 1u);  // only the origin
    EXPECT_THROW((void)check_self_map(Expr::var(), 0), Error);
}
