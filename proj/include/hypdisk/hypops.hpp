#pragma once

// Pointwise differential operators of an analytic self-map phi of the disk.
//
// Notation used below: s = 1 - |z|^2, t = 1 - |phi|^2.
//   D      = s phi' / t                                  hyperbolic derivative
//   A      = s phi''/(2 phi') - conj(z) + s conj(phi) phi' / t
//          = s * d/dz log|D|                              (infinite where phi' = 0)
//   S      = phi'''/phi' - 3/2 (phi''/phi')^2             Schwarzian
//   s A_z    = s^2 S / 2 + A^2 + conj(z) A
//   s A_zbar = -z A + |D|^2 - 1
//   grad |D| = 2 |D| conj(A) / s                          (real gradient as a complex number)

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>

#include "hypdisk/error.hpp"
#include "hypdisk/expr.hpp"
#include "hypdisk/jet.hpp"

namespace hypdisk {

/// A_phi(z), or the infinite flag at zeros of phi'.
struct AValue {
    bool infinite = false;
    Complex value{};

    static AValue make_infinite() { return {true, {}}; }
    double abs() const {
        return infinite ? std::numeric_limits<double>::infinity() : std::abs(value);
    }
};

struct WirtingerA {
    Complex dz;
    Complex dzbar;
};

struct HessianAbsD {
    Complex d2_zz;    // d^2|D| / dz^2
    double d2_zzbar;  // d^2|D| / dz dzbar
};

/// Everything the operators need at one point, computed from a single jet.
struct HypPoint {
    Complex z;
    Jet3 jet;
    Complex D;
    double absD = 0.0;
    AValue A;
    // The fields below are meaningful only when !A.infinite.
    Complex S{};
    Complex grad{};
    WirtingerA A_w{};

    bool phi_prime_zero() const { return A.infinite; }
};

inline HypPoint hyp_point_from_jet(Complex z, const Jet3& j) {
    if (!(std::abs(z) < 1.0)) throw Error(ErrorKind::domain, "point outside the open unit disk");
    const double s = 1.0 - std::norm(z);
    const double t = 1.0 - std::norm(j.f);
    if (!(t > 0.0)) throw Error(ErrorKind::domain, "|phi(z)| >= 1: not a self-map of the disk");
    HypPoint p;
    p.z = z;
    p.jet = j;
    p.D = s * j.d1 / t;
    p.absD = std::abs(p.D);
    if (std::abs(j.d1) <= near_pole_threshold) {
        p.A = AValue::make_infinite();
        return p;
    }
    const Complex ratio = j.d2 / j.d1;
    const Complex A = 0.5 * s * ratio - std::conj(z) + s * std::conj(j.f) * j.d1 / t;
    p.A = {false, A};
    p.S = j.d3 / j.d1 - 1.5 * ratio * ratio;
    p.grad = 2.0 * p.absD * std::conj(A) / s;
    p.A_w.dz = (0.5 * s * s * p.S + A * A + std::conj(z) * A) / s;
    p.A_w.dzbar = (-z * A + p.absD * p.absD - 1.0) / s;
    return p;
}

inline HypPoint hyp_point(const Expr& phi, Complex z) {
    if (!(std::abs(z) < 1.0)) throw Error(ErrorKind::domain, "point outside the open unit disk");
    return hyp_point_from_jet(z, eval_jet(phi, z));
}

namespace detail {
inline void require_phi_prime(const HypPoint& p) {
    if (p.phi_prime_zero()) throw Error(ErrorKind::zero_derivative, "phi'(z) = 0");
}
} // namespace detail

inline Complex hyp_derivative(const Expr& phi, Complex z) { return hyp_point(phi, z).D; }

inline AValue a_operator(const Expr& phi, Complex z) { return hyp_point(phi, z).A; }

inline Complex schwarzian(const HypPoint& p) {
    detail::require_phi_prime(p);
    return p.S;
}
inline Complex schwarzian(const Expr& phi, Complex z) { return schwarzian(hyp_point(phi, z)); }

inline WirtingerA wirtinger_A(const HypPoint& p) {
    detail::require_phi_prime(p);
    return p.A_w;
}
inline WirtingerA wirtinger_A(const Expr& phi, Complex z) { return wirtinger_A(hyp_point(phi, z)); }

inline Complex grad_absD(const HypPoint& p) {
    detail::require_phi_prime(p);
    return p.grad;
}
inline Complex grad_absD(const Expr& phi, Complex z) { return grad_absD(hyp_point(phi, z)); }

inline HessianAbsD hessian_absD(const HypPoint& p) {
    detail::require_phi_prime(p);
    const double s = 1.0 - std::norm(p.z);
    const Complex A = p.A.value;
    const double k = p.absD / (s * s);
    return {k * (0.5 * s * s * p.S + 2.0 * A * A + 2.0 * std::conj(p.z) * A),
            k * (-1.0 + p.absD * p.absD + std::norm(A))};
}
inline HessianAbsD hessian_absD(const Expr& phi, Complex z) { return hessian_absD(hyp_point(phi, z)); }

/// d^2 log|D| / dz dzbar = -(1 - |D|^2) / (1 - |z|^2)^2.
inline double laplacian_log_absD(const HypPoint& p) {
    detail::require_phi_prime(p);
    const double s = 1.0 - std::norm(p.z);
    return -(1.0 - p.absD * p.absD) / (s * s);
}
inline double laplacian_log_absD(const Expr& phi, Complex z) {
    return laplacian_log_absD(hyp_point(phi, z));
}

/// Hyperbolic curvature of the trajectory through p, oriented by increasing
/// level: kappa = -(|A|/2) Im[(1-|z|^2)^2 S / A^2].
inline double curvature(const HypPoint& p) {
    detail::require_phi_prime(p);
    const Complex A = p.A.value;
    if (std::abs(A) <= near_pole_threshold) {
        throw Error(ErrorKind::zero_a, "curvature undefined where A_phi = 0");
    }
    const double s = 1.0 - std::norm(p.z);
    return -0.5 * std::abs(A) * std::imag(s * s * p.S / (A * A));
}
inline double curvature(const Expr& phi, Complex z) { return curvature(hyp_point(phi, z)); }

/// Newton step for A(z) = 0: the complex delta solving
///   A_z delta + A_zbar conj(delta) = -A
/// as a real 2x2 system. Returns nothing when the system is singular.
inline std::optional<Complex> a_newton_step(const HypPoint& p) {
    if (p.phi_prime_zero()) return std::nullopt;
    const Complex c1 = p.A_w.dz + p.A_w.dzbar;
    const Complex c2 = Complex(0, 1) * (p.A_w.dz - p.A_w.dzbar);
    const double det = c1.real() * c2.imag() - c2.real() * c1.imag();
    const double scale = std::abs(c1) * std::abs(c2);
    if (!(std::abs(det) > 1e-14 * scale) || scale == 0.0) return std::nullopt;
    const Complex r = -p.A.value;
    const double x = (r.real() * c2.imag() - c2.real() * r.imag()) / det;
    const double y = (c1.real() * r.imag() - r.real() * c1.imag()) / det;
    return Complex(x, y);
}

/// Hyperbolic distance for the density 1/(1-|z|^2):
/// d(z1, z2) = artanh |(z1 - z2) / (1 - conj(z2) z1)|.
inline double hyperbolic_distance(Complex z1, Complex z2) {
    if (!(std::abs(z1) < 1.0 && std::abs(z2) < 1.0)) {
        throw Error(ErrorKind::domain, "hyperbolic_distance needs points in the open disk");
    }
    const double rho = std::abs((z1 - z2) / (1.0 - std::conj(z2) * z1));
    return std::atanh(std::min(rho, 1.0));
}

struct OrderEstimates {
    double alpha = 0.0;        // sup |A| over finite samples
    bool alpha_infinite = false;  // some sample hit a zero of phi'
    double mu = std::numeric_limits<double>::infinity();
    int samples = 0;
};

/// Sup and inf of |A_phi| over a polar grid: n+1 radii evenly spaced in
/// [0, 1 - 1/n^2] times 4n angles, n = grid_density.
inline OrderEstimates order_estimates(const Expr& phi, int grid_density) {
    if (grid_density < 8) throw Error(ErrorKind::invalid_argument, "grid_density must be >= 8");
    const int n = grid_density;
    const double rmax = 1.0 - 1.0 / (static_cast<double>(n) * n);
    const int na = 4 * n;
    OrderEstimates est;
    auto visit = [&](Complex z) {
        try {
            const HypPoint p = hyp_point(phi, z);
            ++est.samples;
            if (p.A.infinite) {
                est.alpha_infinite = true;
                return;
            }
            const double a = std::abs(p.A.value);
            est.alpha = std::max(est.alpha, a);
            est.mu = std::min(est.mu, a);
        } catch (const Error&) {
        }
    };
    visit(0.0);
    for (int k = 1; k <= n; ++k) {
        const double r = rmax * k / n;
        for (int j = 0; j < na; ++j) visit(std::polar(r, 2.0 * std::numbers::pi * j / na));
    }
    return est;
}

} // namespace hypdisk
