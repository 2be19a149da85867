#pragma once

// Expression trees for analytic self-maps of the unit disk.
//
// Grammar (variable `z`, constants `i`, `pi`, decimal literals):
//
//   expr    ::= term { ("+" | "-") term }
//   term    ::= unary { ("*" | "/") unary }
//   unary   ::= "-" unary | power
//   power   ::= primary [ "^" unary ]          exponent must fold to a real constant
//   primary ::= number | "z" | "i" | "pi" | "(" expr ")"
//             | func "(" expr ")"              func in {exp, log, coth, sqrt}
//             | builtin [ "(" args ")" ]        args: key=value or positional
//             | "ellipticg" "(" c "," expr ")"
//
// Subtrees without `z` are folded to constants at parse time.

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hypdisk/error.hpp"
#include "hypdisk/format.hpp"
#include "hypdisk/jet.hpp"
#include "hypdisk/quadrature.hpp"

namespace hypdisk {

enum class NodeKind { var, constant, add, sub, mul, div, neg, pow_real, exp, log, coth, elliptic_g };

/// Immutable, shareable expression tree. Copies are cheap.
class Expr {
public:
    Expr() : Expr(var()) {}

    static Expr var() { return Expr(NodeKind::var, {}, 0.0, {}); }
    static Expr constant(Complex c) { return Expr(NodeKind::constant, c, 0.0, {}); }
    static Expr unary(NodeKind k, Expr a) { return Expr(k, {}, 0.0, {std::move(a)}); }
    static Expr binary(NodeKind k, Expr a, Expr b) {
        return Expr(k, {}, 0.0, {std::move(a), std::move(b)});
    }
    static Expr pow_real(Expr base, double exponent) {
        return Expr(NodeKind::pow_real, {}, exponent, {std::move(base)});
    }
    /// g(u) = int_0^u (1 - 2 c s^2 + s^4)^{-1/2} ds, requires -1 < c < 1.
    static Expr elliptic_g(double c, Expr arg) {
        if (!(c > -1.0 && c < 1.0)) {
            throw Error(ErrorKind::invalid_argument, "ellipticg requires -1 < c < 1");
        }
        return Expr(NodeKind::elliptic_g, {}, c, {std::move(arg)});
    }

    NodeKind kind() const { return node_->kind; }
    Complex value() const { return node_->value; }
    /// Exponent for pow_real, c for elliptic_g.
    double param() const { return node_->param; }
    const std::vector<Expr>& children() const { return node_->children; }
    const Expr& child(std::size_t i = 0) const { return node_->children.at(i); }

    bool contains_var() const {
        if (kind() == NodeKind::var) return true;
        for (const auto& c : children())
            if (c.contains_var()) return true;
        return false;
    }

    friend bool operator==(const Expr& a, const Expr& b) {
        if (a.node_ == b.node_) return true;
        if (a.kind() != b.kind() || a.value() != b.value() || a.param() != b.param() ||
            a.children().size() != b.children().size())
            return false;
        for (std::size_t i = 0; i < a.children().size(); ++i)
            if (!(a.children()[i] == b.children()[i])) return false;
        return true;
    }

private:
    struct Node {
        NodeKind kind;
        Complex value;
        double param;
        std::vector<Expr> children;
    };

    Expr(NodeKind k, Complex v, double p, std::vector<Expr> ch)
        : node_(std::make_shared<const Node>(Node{k, v, p, std::move(ch)})) {}

    std::shared_ptr<const Node> node_;
};

inline Expr operator+(Expr a, Expr b) { return Expr::binary(NodeKind::add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return Expr::binary(NodeKind::sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return Expr::binary(NodeKind::mul, std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return Expr::binary(NodeKind::div, std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return Expr::unary(NodeKind::neg, std::move(a)); }
inline Expr exp(Expr a) { return Expr::unary(NodeKind::exp, std::move(a)); }
inline Expr log(Expr a) { return Expr::unary(NodeKind::log, std::move(a)); }
inline Expr coth(Expr a) { return Expr::unary(NodeKind::coth, std::move(a)); }
inline Expr pow(Expr a, double p) { return Expr::pow_real(std::move(a), p); }
inline Expr cst(Complex c) { return Expr::constant(c); }

/// outer(inner(z)): replaces every occurrence of z in `outer`.
inline Expr substitute(const Expr& outer, const Expr& inner) {
    if (outer.kind() == NodeKind::var) return inner;
    if (outer.children().empty()) return outer;
    std::vector<Expr> ch;
    ch.reserve(outer.children().size());
    for (const auto& c : outer.children()) ch.push_back(substitute(c, inner));
    switch (outer.kind()) {
    case NodeKind::pow_real: return Expr::pow_real(ch[0], outer.param());
    case NodeKind::elliptic_g: return Expr::elliptic_g(outer.param(), ch[0]);
    case NodeKind::neg:
    case NodeKind::exp:
    case NodeKind::log:
    case NodeKind::coth: return Expr::unary(outer.kind(), ch[0]);
    default: return Expr::binary(outer.kind(), ch[0], ch[1]);
    }
}

inline Expr compose(const Expr& outer, const Expr& inner) { return substitute(outer, inner); }

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

// g'(s) for the elliptic node, written as a product of two factors whose
// principal square roots are analytic in the open disk:
//   1 - 2c s^2 + s^4 = (1 - s^2 e^{-ib}) (1 - s^2 e^{ib}),  cos b = c.
inline Complex elliptic_integrand(double c, Complex s) {
    const Complex e = std::polar(1.0, std::acos(c));
    const Complex w = s * s;
    return 1.0 / (std::sqrt(1.0 - w * std::conj(e)) * std::sqrt(1.0 - w * e));
}

inline Jet3 elliptic_g_jet(double c, Complex u) {
    if (!(std::abs(u) < 1.0)) {
        throw Error(ErrorKind::branch_cut, "ellipticg evaluated outside the open unit disk");
    }
    const QuadratureResult q = integrate_gk(
        [&](double t) { return u * elliptic_integrand(c, t * u); }, 0.0, 1.0);
    const Complex e = std::polar(1.0, std::acos(c));
    const Jet3 s = jet_var(u);
    const Jet3 w = s * s;
    const Jet3 one = Jet3::constant(1.0);
    const Jet3 gp = pow_real(one - w * std::conj(e), -0.5) * pow_real(one - w * e, -0.5);
    return {q.value, gp.f, gp.d1, gp.d2};
}

} // namespace detail

/// Value and first three derivatives of the expression at z.
inline Jet3 eval_jet(const Expr& e, Complex z) {
    switch (e.kind()) {
    case NodeKind::var: return jet_var(z);
    case NodeKind::constant: return Jet3::constant(e.value());
    case NodeKind::add: return eval_jet(e.child(0), z) + eval_jet(e.child(1), z);
    case NodeKind::sub: return eval_jet(e.child(0), z) - eval_jet(e.child(1), z);
    case NodeKind::mul: return eval_jet(e.child(0), z) * eval_jet(e.child(1), z);
    case NodeKind::div: return eval_jet(e.child(0), z) / eval_jet(e.child(1), z);
    case NodeKind::neg: return -eval_jet(e.child(0), z);
    case NodeKind::pow_real: return pow_real(eval_jet(e.child(0), z), e.param());
    case NodeKind::exp: return exp(eval_jet(e.child(0), z));
    case NodeKind::log: return log(eval_jet(e.child(0), z));
    case NodeKind::coth: return coth(eval_jet(e.child(0), z));
    case NodeKind::elliptic_g: {
        const Jet3 inner = eval_jet(e.child(0), z);
        const Jet3 g = detail::elliptic_g_jet(e.param(), inner.f);
        return compose({g.f, g.d1, g.d2, g.d3}, inner);
    }
    }
    throw Error(ErrorKind::invalid_argument, "unknown node kind");
}

inline Complex eval_value(const Expr& e, Complex z) {
    // Value-only path; shares the jet code so both agree bit for bit.
    return eval_jet(e, z).f;
}

// ---------------------------------------------------------------------------
// Builtin registry

struct BuiltinSpec {
    std::string name;
    std::vector<std::string> parameters;
    std::string description;
};

inline const std::vector<BuiltinSpec>& builtin_registry() {
    static const std::vector<BuiltinSpec> specs{
        {"example1", {"a"}, "exp(-((1+z)/(1-z))^a), 0 < a < 1"},
        {"example2", {"a"}, "(g-1)/(g+1) with g = ((1+z)/(1-z))^a, 0 < a < 1"},
        {"example3", {"theta"}, "h(g(z)) with g the elliptic integral, 0 < theta < pi/2"},
        {"example4", {"c"}, "Blaschke product (z^2-c^2)/(1-c^2 z^2), 0 < c < 1"},
        {"mobius", {"a_re", "a_im", "theta"}, "e^{i theta}(z-a)/(1-conj(a) z), |a| < 1"},
        {"identity", {}, "z"},
    };
    return specs;
}

namespace builtins {

inline Expr half_plane_power(double a) {
    const Expr z = Expr::var();
    return pow((cst(1.0) + z) / (cst(1.0) - z), a);
}

inline void require_open_unit(double v, const char* what) {
    if (!(v > 0.0 && v < 1.0)) {
        throw Error(ErrorKind::invalid_argument, std::string(what) + " must lie in (0, 1)");
    }
}

inline Expr example1(double a) {
    require_open_unit(a, "example1: a");
    return exp(-half_plane_power(a));
}

inline Expr example2(double a) {
    require_open_unit(a, "example2: a");
    const Expr g = half_plane_power(a);
    return (g - cst(1.0)) / (g + cst(1.0));
}

/// Half-width parameter a = K(cos theta) of the third example.
inline double example3_a(double theta) { return elliptic_k(std::cos(theta)); }

inline Expr example3(double theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi / 2)) {
        throw Error(ErrorKind::invalid_argument, "example3: theta must lie in (0, pi/2)");
    }
    const double a = example3_a(theta);
    const Expr g = Expr::elliptic_g(std::cos(2.0 * theta), Expr::var());
    const Expr e = exp(cst(Complex(0.0, std::numbers::pi / a)) * g);
    return cst(Complex(0.0, 1.0)) * (cst(1.0) - e) / (cst(1.0) + e);
}

inline Expr example4(double c) {
    require_open_unit(c, "example4: c");
    const Expr z = Expr::var();
    const double c2 = c * c;
    return (z * z - cst(c2)) / (cst(1.0) - cst(c2) * z * z);
}

inline Expr mobius(Complex a, double theta) {
    if (!(std::abs(a) < 1.0)) {
        throw Error(ErrorKind::invalid_argument, "mobius: |a| must be < 1");
    }
    const Expr z = Expr::var();
    return cst(std::polar(1.0, theta)) * (z - cst(a)) / (cst(1.0) - cst(std::conj(a)) * z);
}

inline Expr identity() { return Expr::var(); }

} // namespace builtins

/// Builds a registry function from named parameters. Missing or unknown keys
/// are reported as invalid_argument.
inline Expr make_builtin(const std::string& name, const std::map<std::string, double>& params) {
    const BuiltinSpec* spec = nullptr;
    for (const auto& s : builtin_registry())
        if (s.name == name) spec = &s;
    if (!spec) throw Error(ErrorKind::unknown_identifier, "unknown builtin '" + name + "'");
    for (const auto& [k, v] : params) {
        bool known = false;
        for (const auto& p : spec->parameters) known = known || p == k;
        if (!known) {
            throw Error(ErrorKind::invalid_argument,
                        name + ": unknown parameter '" + k + "'");
        }
    }
    auto get = [&](const std::string& key) {
        auto it = params.find(key);
        if (it == params.end()) {
            throw Error(ErrorKind::invalid_argument, name + ": missing parameter '" + key + "'");
        }
        return it->second;
    };
    if (name == "example1") return builtins::example1(get("a"));
    if (name == "example2") return builtins::example2(get("a"));
    if (name == "example3") return builtins::example3(get("theta"));
    if (name == "example4") return builtins::example4(get("c"));
    if (name == "mobius") return builtins::mobius({get("a_re"), get("a_im")}, get("theta"));
    return builtins::identity();
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    Expr parse_all() {
        Expr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg, ErrorKind k = ErrorKind::parse) const {
        fail_at(pos_, msg, k);
    }
    [[noreturn]] static void fail_at(std::size_t p, const std::string& msg,
                                     ErrorKind k = ErrorKind::parse) {
        throw ParseError(k, p, msg);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() {
        skip();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    static Expr fold(Expr e) {
        if (e.kind() == NodeKind::constant || e.contains_var()) return e;
        try {
            return Expr::constant(eval_value(e, 0.0));
        } catch (const Error&) {
            return e;  // left for evaluation to report
        }
    }

    Expr expr() {
        Expr lhs = term();
        for (;;) {
            if (accept('+')) lhs = fold(lhs + term());
            else if (accept('-')) lhs = fold(lhs - term());
            else return lhs;
        }
    }

    Expr term() {
        Expr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = fold(lhs * unary());
            else if (accept('/')) lhs = fold(lhs / unary());
            else return lhs;
        }
    }

    Expr unary() {
        if (accept('-')) return fold(-unary());
        return power();
    }

    Expr power() {
        Expr base = primary();
        skip();
        const std::size_t at = pos_;
        if (!accept('^')) return base;
        Expr ex = unary();
        if (ex.kind() != NodeKind::constant) {
            fail_at(at, "exponent must be a real constant", ErrorKind::non_real_exponent);
        }
        const Complex p = ex.value();
        if (p.imag() != 0.0 || !std::isfinite(p.real())) {
            fail_at(at, "non-real exponent", ErrorKind::non_real_exponent);
        }
        return fold(Expr::pow_real(base, p.real()));
    }

    double number() {
        skip();
        const char* begin = s_.data() + pos_;
        std::size_t n = 0;
        auto digits = [&] {
            while (pos_ + n < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + n]))) ++n;
        };
        digits();
        if (pos_ + n < s_.size() && s_[pos_ + n] == '.') {
            ++n;
            digits();
        }
        if (pos_ + n < s_.size() && (s_[pos_ + n] == 'e' || s_[pos_ + n] == 'E')) {
            std::size_t m = n + 1;
            if (pos_ + m < s_.size() && (s_[pos_ + m] == '+' || s_[pos_ + m] == '-')) ++m;
            if (pos_ + m < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + m]))) {
                n = m;
                digits();
            }
        }
        const std::string lit(begin, n);
        if (lit == "." || lit.empty()) fail("malformed number");
        pos_ += n;
        return std::strtod(lit.c_str(), nullptr);
    }

    std::string identifier() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    double real_constant(const char* what) {
        const std::size_t at = pos_;
        Expr e = expr();
        if (e.kind() != NodeKind::constant || e.value().imag() != 0.0) {
            fail_at(at, std::string(what) + " must be a real constant",
                    ErrorKind::invalid_argument);
        }
        return e.value().real();
    }

    Expr builtin_call(const std::string& name, std::size_t at) {
        const BuiltinSpec* spec = nullptr;
        for (const auto& s : builtin_registry())
            if (s.name == name) spec = &s;
        std::map<std::string, double> params;
        if (accept('(')) {
            std::size_t positional = 0;
            if (!accept(')')) {
                do {
                    skip();
                    const std::size_t save = pos_;
                    std::string key = identifier();
                    if (!key.empty() && accept('=')) {
                        params[key] = real_constant("builtin parameter");
                    } else {
                        pos_ = save;
                        if (positional >= spec->parameters.size()) {
                            fail("too many arguments for " + name, ErrorKind::invalid_argument);
                        }
                        params[spec->parameters[positional++]] = real_constant("builtin parameter");
                    }
                } while (accept(','));
                expect(')');
            }
        }
        try {
            return make_builtin(name, params);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail_at(at, e.what(), e.kind());
        }
    }

    Expr primary() {
        const char c = peek();
        const std::size_t at = pos_;
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return Expr::constant(number());
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::string id = identifier();
            if (id == "z") return Expr::var();
            if (id == "i") return Expr::constant({0.0, 1.0});
            if (id == "pi") return Expr::constant(std::numbers::pi);
            if (id == "exp" || id == "log" || id == "coth" || id == "sqrt") {
                expect('(');
                Expr arg = expr();
                expect(')');
                if (id == "exp") return fold(exp(arg));
                if (id == "log") return fold(log(arg));
                if (id == "coth") return fold(coth(arg));
                return fold(pow(arg, 0.5));
            }
            if (id == "ellipticg") {
                expect('(');
                const double cc = real_constant("ellipticg parameter");
                expect(',');
                Expr arg = expr();
                expect(')');
                try {
                    return fold(Expr::elliptic_g(cc, arg));
                } catch (const Error& e) {
                    fail_at(at, e.what(), e.kind());
                }
            }
            for (const auto& s : builtin_registry())
                if (s.name == id) return builtin_call(id, at);
            fail_at(at, "unknown identifier '" + id + "'", ErrorKind::unknown_identifier);
        }
        if (c == '\0') fail("unexpected end of input");
        fail("unexpected '" + std::string(1, c) + "'");
    }
};

} // namespace detail

inline Expr parse(std::string_view text) { return detail::Parser(text).parse_all(); }

/// Text that parses back to a structurally equal tree. Every compound node is
/// parenthesised, so precedence never has to be reconstructed.
inline std::string unparse(const Expr& e) {
    auto un = [](const Expr& x) { return unparse(x); };
    switch (e.kind()) {
    case NodeKind::var: return "z";
    case NodeKind::constant: {
        const Complex v = e.value();
        if (v.imag() == 0.0) {
            if (v.real() < 0.0 || std::signbit(v.real())) return "(-" + format_g17(-v.real()) + ")";
            return format_g17(v.real());
        }
        if (v == Complex(0.0, 1.0)) return "i";
        return "(" + format_g17(v.real()) + "+" + format_g17(v.imag()) + "*i)";
    }
    case NodeKind::add: return "(" + un(e.child(0)) + "+" + un(e.child(1)) + ")";
    case NodeKind::sub: return "(" + un(e.child(0)) + "-" + un(e.child(1)) + ")";
    case NodeKind::mul: return "(" + un(e.child(0)) + "*" + un(e.child(1)) + ")";
    case NodeKind::div: return "(" + un(e.child(0)) + "/" + un(e.child(1)) + ")";
    case NodeKind::neg: return "(-" + un(e.child(0)) + ")";
    case NodeKind::pow_real: {
        const double p = e.param();
        const std::string ps = p < 0.0 ? "(-" + format_g17(-p) + ")" : format_g17(p);
        return "(" + un(e.child(0)) + "^" + ps + ")";
    }
    case NodeKind::exp: return "exp(" + un(e.child(0)) + ")";
    case NodeKind::log: return "log(" + un(e.child(0)) + ")";
    case NodeKind::coth: return "coth(" + un(e.child(0)) + ")";
    case NodeKind::elliptic_g: {
        const double c = e.param();
        const std::string cs = c < 0.0 ? "(-" + format_g17(-c) + ")" : format_g17(c);
        return "ellipticg(" + cs + "," + un(e.child(0)) + ")";
    }
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Self-map check

struct SelfMapReport {
    double max_abs = 0.0;
    Complex argmax{};
    int samples = 0;
    std::vector<Complex> violations;                          // |phi| >= 1
    std::vector<std::pair<Complex, std::string>> errors;      // evaluation failures
    bool ok() const { return violations.empty(); }
};

/// Samples |phi| on a polar grid in |z| <= 0.999: the origin plus n_samples
/// rings of 4 * n_samples points each. Advisory only; sampling cannot prove the
/// inclusion phi(D) in D.
inline SelfMapReport check_self_map(const Expr& phi, int n_samples) {
    if (n_samples < 1) throw Error(ErrorKind::invalid_argument, "n_samples must be >= 1");
    SelfMapReport rep;
    auto visit = [&](Complex z) {
        ++rep.samples;
        try {
            const double m = std::abs(eval_value(phi, z));
            if (!std::isfinite(m) || m >= 1.0) rep.violations.push_back(z);
            if (m > rep.max_abs || !std::isfinite(m)) {
                rep.max_abs = m;
                rep.argmax = z;
            }
        } catch (const Error& e) {
            rep.errors.emplace_back(z, e.what());
        }
    };
    visit(0.0);
    const int na = 4 * n_samples;
    for (int k = 1; k <= n_samples; ++k) {
        const double r = 0.999 * k / n_samples;
        for (int j = 0; j < na; ++j) visit(std::polar(r, 2.0 * std::numbers::pi * j / na));
    }
    return rep;
}

} // namespace hypdisk
