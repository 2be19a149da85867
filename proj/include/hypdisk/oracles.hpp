#pragma once

// Independent numerical oracles used by the test and verification suites.
// Only the tests and the verification suites include this header.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "hypdisk/jet.hpp"

namespace hypdisk::oracle {

using RealField = std::function<double(Complex)>;
using ComplexField = std::function<Complex(Complex)>;

/// Wirtinger derivatives of a function of (x, y) by central differences:
/// d/dz = (d/dx - i d/dy)/2, d/dzbar = (d/dx + i d/dy)/2.
struct Wirtinger {
    Complex dz;
    Complex dzbar;
};

inline Wirtinger wirtinger_fd(const ComplexField& f, Complex z, double h) {
    const Complex fx = (f(z + h) - f(z - h)) / (2.0 * h);
    const Complex fy = (f(z + Complex(0, h)) - f(z - Complex(0, h))) / (2.0 * h);
    const Complex I(0, 1);
    return {0.5 * (fx - I * fy), 0.5 * (fx + I * fy)};
}

inline Wirtinger wirtinger_fd(const RealField& f, Complex z, double h) {
    return wirtinger_fd(ComplexField([&](Complex w) { return Complex(f(w)); }), z, h);
}

/// Second Wirtinger derivatives of a real function: d^2/dz^2 and d^2/dzdzbar.
struct SecondWirtinger {
    Complex zz;
    double zzbar;
};

inline SecondWirtinger second_wirtinger_fd(const RealField& f, Complex z, double h) {
    const Complex ih(0, h);
    const double f0 = f(z);
    const double fxx = (f(z + h) - 2.0 * f0 + f(z - h)) / (h * h);
    const double fyy = (f(z + ih) - 2.0 * f0 + f(z - ih)) / (h * h);
    const double fxy = (f(z + h + ih) - f(z + h - ih) - f(z - h + ih) + f(z - h - ih)) / (4.0 * h * h);
    return {Complex(fxx - fyy, -2.0 * fxy) / 4.0, (fxx + fyy) / 4.0};
}

/// Composite Simpson rule for a complex integrand over a straight segment
/// [a, b] in the plane, with n (even) panels.
inline Complex simpson_segment(const ComplexField& f, Complex a, Complex b, int n) {
    if (n % 2) ++n;
    const Complex h = (b - a) / static_cast<double>(n);
    Complex sum = f(a) + f(b);
    for (int k = 1; k < n; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(k) * h);
    return sum * h / 3.0;
}

/// K(k) = (pi/2) sum_n [ (2n)! / (2^{2n} (n!)^2) ]^2 k^{2n}.
inline double elliptic_k_series(double k, int terms = 400) {
    double coef = 1.0;  // (2n)!/(2^{2n} n!^2)
    double sum = 1.0;
    double kp = 1.0;
    for (int n = 1; n < terms; ++n) {
        coef *= (2.0 * n - 1.0) / (2.0 * n);
        kp *= k * k;
        sum += coef * coef * kp;
    }
    return 0.5 * std::numbers::pi * sum;
}

/// Signed Euclidean curvature of the circle through three points (positive
/// for a left turn a -> b -> c).
inline double menger_curvature(Complex a, Complex b, Complex c) {
    const Complex u = b - a;
    const Complex v = c - b;
    const double cross = u.real() * v.imag() - u.imag() * v.real();
    return 2.0 * cross / (std::abs(u) * std::abs(v) * std::abs(c - a));
}

/// Hyperbolic curvature (density 1/(1-|z|^2)) of a curve sampled at three
/// consecutive points, from the Euclidean curvature k_e and unit tangent T:
/// kappa = (1 - |z|^2) k_e + 2 Im(conj(z) T).
inline double hyperbolic_curvature_3pt(Complex a, Complex b, Complex c) {
    const double ke = menger_curvature(a, b, c);
    const Complex T = (c - a) / std::abs(c - a);
    return (1.0 - std::norm(b)) * ke + 2.0 * std::imag(std::conj(b) * T);
}

/// Least-squares (Kasa) circle fit; returns centre and radius.
struct Circle {
    Complex centre;
    double radius;
};

inline Circle fit_circle(const std::vector<Complex>& pts) {
    // Minimise sum (x^2 + y^2 + D x + E y + F)^2 via the 3x3 normal equations.
    double m[3][4] = {};
    for (const Complex& p : pts) {
        const double row[3] = {p.real(), p.imag(), 1.0};
        const double rhs = -std::norm(p);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) m[i][j] += row[i] * row[j];
            m[i][3] += row[i] * rhs;
        }
    }
    for (int i = 0; i < 3; ++i) {
        int piv = i;
        for (int r = i + 1; r < 3; ++r)
            if (std::abs(m[r][i]) > std::abs(m[piv][i])) piv = r;
        for (int j = 0; j < 4; ++j) std::swap(m[i][j], m[piv][j]);
        for (int r = 0; r < 3; ++r) {
            if (r == i) continue;
            const double f = m[r][i] / m[i][i];
            for (int j = i; j < 4; ++j) m[r][j] -= f * m[i][j];
        }
    }
    const double D = m[0][3] / m[0][0], E = m[1][3] / m[1][1], F = m[2][3] / m[2][2];
    const Complex c(-D / 2.0, -E / 2.0);
    return {c, std::sqrt(std::max(0.0, std::norm(c) - F))};
}

/// Deterministic sampler of points in a disk of given radius.
class DiskSampler {
public:
    explicit DiskSampler(std::uint64_t seed) : rng_(seed) {}

    Complex point(double rmax) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double r = rmax * std::sqrt(u(rng_));
        const double a = 2.0 * std::numbers::pi * u(rng_);
        return std::polar(r, a);
    }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline double rel_err(Complex got, Complex want, double floor = 1e-300) {
    return std::abs(got - want) / std::max(std::abs(want), floor);
}

} // namespace hypdisk::oracle
