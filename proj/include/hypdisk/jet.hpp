#pragma once

// Third-order forward-mode differentiation over std::complex<double>.
//
// A Jet3 carries f(z), f'(z), f''(z), f'''(z). Arithmetic follows the Leibniz
// rule truncated at order three; elementary functions are applied through the
// third-order chain rule
//   (h o g)''' = h'''(g) g'^3 + 3 h''(g) g' g'' + h'(g) g'''.

#include <array>
#include <cmath>
#include <complex>
#include <functional>

#include "hypdisk/error.hpp"

namespace hypdisk {

using Complex = std::complex<double>;

/// Magnitudes below this are treated as exact zeros when dividing.
inline constexpr double near_pole_threshold = 1e-300;

struct Jet3 {
    Complex f{};
    Complex d1{};
    Complex d2{};
    Complex d3{};

    constexpr Jet3() = default;
    constexpr Jet3(Complex value, Complex first, Complex second, Complex third)
        : f(value), d1(first), d2(second), d3(third) {}

    static constexpr Jet3 constant(Complex c) { return {c, 0.0, 0.0, 0.0}; }
    static constexpr Jet3 variable(Complex z) { return {z, 1.0, 0.0, 0.0}; }

    bool operator==(const Jet3&) const = default;
};

inline Jet3 jet_var(Complex z) { return Jet3::variable(z); }

inline Jet3 operator+(const Jet3& a, const Jet3& b) {
    return {a.f + b.f, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3};
}

inline Jet3 operator-(const Jet3& a, const Jet3& b) {
    return {a.f - b.f, a.d1 - b.d1, a.d2 - b.d2, a.d3 - b.d3};
}

inline Jet3 operator-(const Jet3& a) { return {-a.f, -a.d1, -a.d2, -a.d3}; }

inline Jet3 operator*(const Jet3& a, const Jet3& b) {
    // Terms are paired so that a * b and b * a round identically.
    return {a.f * b.f,
            a.d1 * b.f + a.f * b.d1,
            (a.d2 * b.f + a.f * b.d2) + 2.0 * (a.d1 * b.d1),
            (a.d3 * b.f + a.f * b.d3) + 3.0 * (a.d2 * b.d1 + a.d1 * b.d2)};
}

inline Jet3 operator*(Complex s, const Jet3& a) { return {s * a.f, s * a.d1, s * a.d2, s * a.d3}; }
inline Jet3 operator*(const Jet3& a, Complex s) { return s * a; }

/// Applies a scalar function given its value and first three derivatives at
/// g.f to the jet g.
inline Jet3 compose(const std::array<Complex, 4>& h, const Jet3& g) {
    const Complex g1 = g.d1;
    return {h[0],
            h[1] * g1,
            h[2] * g1 * g1 + h[1] * g.d2,
            h[3] * g1 * g1 * g1 + 3.0 * h[2] * g1 * g.d2 + h[1] * g.d3};
}

inline Jet3 reciprocal(const Jet3& a) {
    if (std::abs(a.f) < near_pole_threshold) {
        throw Error(ErrorKind::pole, "division by a jet whose value vanishes");
    }
    const Complex r = 1.0 / a.f;
    const Complex r2 = r * r;
    return compose({r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2}, a);
}

inline Jet3 operator/(const Jet3& a, const Jet3& b) { return a * reciprocal(b); }

namespace detail {

inline void check_branch_cut(Complex u, const char* fn) {
    if (u.imag() == 0.0 && u.real() <= 0.0) {
        throw Error(ErrorKind::branch_cut,
                    std::string(fn) + " evaluated on its branch cut (non-positive real axis)");
    }
}

} // namespace detail

inline Jet3 exp(const Jet3& a) {
    const Complex e = std::exp(a.f);
    return compose({e, e, e, e}, a);
}

/// Principal branch, cut along the non-positive real axis.
inline Jet3 log(const Jet3& a) {
    detail::check_branch_cut(a.f, "log");
    const Complex r = 1.0 / a.f;
    const Complex r2 = r * r;
    return compose({std::log(a.f), r, -r2, 2.0 * r2 * r}, a);
}

namespace detail {
inline Complex ipow(Complex x, int n) {
    if (n < 0) return 1.0 / ipow(x, -n);
    Complex r = 1.0;
    for (; n > 0; n >>= 1, x *= x)
        if (n & 1) r *= x;
    return r;
}
} // namespace detail

/// a^p for real p: exact powers for integer p, principal branch otherwise.
inline Jet3 pow_real(const Jet3& a, double p) {
    if (p == std::round(p) && std::abs(p) <= 64.0) {
        const int n = static_cast<int>(p);
        if (n < 0 && a.f == Complex(0.0)) throw Error(ErrorKind::pole, "negative power of zero");
        const auto c = [&](int k) { return k > n && n >= 0 ? Complex(0.0) : detail::ipow(a.f, n - k); };
        return compose({c(0), p * c(1), p * (p - 1.0) * c(2), p * (p - 1.0) * (p - 2.0) * c(3)}, a);
    }
    detail::check_branch_cut(a.f, "pow");
    const Complex w = std::exp(p * std::log(a.f));
    const Complex r = 1.0 / a.f;
    return compose({w,
                    p * w * r,
                    p * (p - 1.0) * w * r * r,
                    p * (p - 1.0) * (p - 2.0) * w * r * r * r},
                   a);
}

inline Complex coth_value(Complex u) {
    // Evaluated through exp(-2u) on the half-plane where it is bounded.
    const bool flip = u.real() < 0.0;
    const Complex v = flip ? -u : u;
    const Complex e = std::exp(-2.0 * v);
    const Complex den = 1.0 - e;
    if (std::abs(den) < 1e-15) {
        throw Error(ErrorKind::pole, "coth evaluated at a pole (sinh = 0)");
    }
    const Complex c = (1.0 + e) / den;
    return flip ? -c : c;
}

inline Jet3 coth(const Jet3& a) {
    const Complex c = coth_value(a.f);
    const Complex c1 = 1.0 - c * c;                 // -csch^2
    const Complex c2 = -2.0 * c * c1;
    const Complex c3 = -2.0 * c1 * c1 - 2.0 * c * c2;
    return compose({c, c1, c2, c3}, a);
}

/// Finite-difference jet of an analytic function, used as an independent
/// check on the forward-mode path.
///
/// The stencil is the five points {z, z+r, z-r, z+ir, z-ir}. For an analytic f
/// the discrete Cauchy sums over the four outer points give every derivative
/// with an O(r^4) truncation error. The stencil radius grows with the order,
/// r_n = h^(2/(n+1)), so that rounding (which scales like eps / r^n) stays
/// well below truncation: r_1 = h, r_2 = h^(2/3), r_3 = h^(1/2).
inline Jet3 fd_jet_oracle(const std::function<Complex(Complex)>& f, Complex z, double h) {
    if (!(h > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "fd_jet_oracle requires h > 0");
    }
    static constexpr std::array<Complex, 4> dirs{Complex(1, 0), Complex(0, 1), Complex(-1, 0),
                                                 Complex(0, -1)};
    auto cauchy = [&](int order) {
        const double r = std::pow(h, 2.0 / (order + 1));
        Complex sum = 0.0;
        for (int k = 0; k < 4; ++k) {
            // dirs[k]^(-order)
            const Complex w = dirs[(4 - (k * order) % 4) % 4];
            sum += f(z + r * dirs[k]) * w;
        }
        double fact = 1.0;
        for (int i = 2; i <= order; ++i) fact *= i;
        return fact * sum / (4.0 * std::pow(r, order));
    };
    return {f(z), cauchy(1), cauchy(2), cauchy(3)};
}

} // namespace hypdisk
