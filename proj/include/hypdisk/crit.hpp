#pragma once

// Critical points of |D|: zeros of A and zeros of phi'.
//
// At a zero z0 of A with phi'(z0) != 0, put s = 1 - |z0|^2,
//   lhs = s^2 |S(z0)|,  rhs = 2 (1 - |D(z0)|^2).
// lhs < rhs gives a strict local maximum, lhs > rhs a saddle whose level set
// crosses itself along the four directions theta with
//   cos(gamma + 2 theta) = rhs / lhs,  gamma = arg S(z0).
// Zeros of phi' are local minima (|D| = 0 there).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hypdisk/format.hpp"
#include "hypdisk/hypops.hpp"

namespace hypdisk {

enum class CriticalKind { A_zero, phi_prime_zero };
enum class Classification { strict_local_max, saddle, degenerate, local_min };

inline std::string to_string(CriticalKind k) { return k == CriticalKind::A_zero ? "A_zero" : "phi_prime_zero"; }

inline std::string to_string(Classification c) {
    switch (c) {
    case Classification::strict_local_max: return "strict_local_max";
    case Classification::saddle: return "saddle";
    case Classification::degenerate: return "degenerate";
    case Classification::local_min: return "local_min";
    }
    return "degenerate";
}

struct CriticalPoint {
    Complex z{};
    CriticalKind kind = CriticalKind::A_zero;
    std::optional<double> lhs;  // absent at zeros of phi'
    double rhs = 0.0;
    double absD = 0.0;
    Classification classification = Classification::degenerate;
    std::vector<double> branch_angles;  // saddles only, sorted in [0, 2 pi)
    std::optional<double> gamma;        // saddles only
};

inline constexpr double default_newton_tol = 1e-12;
inline constexpr double default_class_tol = 1e-8;
inline constexpr double default_residual_tol = 1e-8;
/// Grid starts and iterates closer than this to a zero of phi' are dropped.
inline constexpr double phi_prime_exclusion = 1e-4;

namespace detail {

inline std::vector<Complex> grid_starts(int n) {
    if (n < 8) throw Error(ErrorKind::invalid_argument, "grid_density must be >= 8");
    const double R = 1.0 - 1.0 / n;
    const double h = 2.0 * R / n;
    std::vector<Complex> out;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const Complex z(-R + i * h, -R + j * h);
            if (std::abs(z) <= R) out.push_back(z);
        }
    }
    return out;
}

inline void dedup_push(std::vector<Complex>& roots, Complex z) {
    for (const Complex& r : roots)
        if (std::abs(r - z) < 1e-8) return;
    roots.push_back(z);
}

inline bool excluded(Complex z, const std::vector<Complex>& centres) {
    return std::any_of(centres.begin(), centres.end(),
                       [&](Complex c) { return std::abs(z - c) < phi_prime_exclusion; });
}

inline std::optional<HypPoint> finite_point(const Expr& phi, Complex z) {
    if (!(std::abs(z) < 1.0 - 1e-6)) return std::nullopt;
    try {
        HypPoint p = hyp_point(phi, z);
        if (p.phi_prime_zero()) return std::nullopt;
        return p;
    } catch (const Error&) {
        return std::nullopt;
    }
}

/// Gauss-Newton step for A(z) = 0 as a real 2-system, with a small
/// Levenberg-Marquardt shift so that rank-deficient Jacobians (lines of
/// zeros) still give a usable step.
inline std::optional<Complex> lm_step_A(const HypPoint& p) {
    const Complex c1 = p.A_w.dz + p.A_w.dzbar;
    const Complex c2 = Complex(0, 1) * (p.A_w.dz - p.A_w.dzbar);
    const double J[2][2] = {{c1.real(), c2.real()}, {c1.imag(), c2.imag()}};
    const double rv[2] = {p.A.value.real(), p.A.value.imag()};
    double M[2][2] = {{J[0][0] * J[0][0] + J[1][0] * J[1][0], J[0][0] * J[0][1] + J[1][0] * J[1][1]},
                      {0.0, J[0][1] * J[0][1] + J[1][1] * J[1][1]}};
    M[1][0] = M[0][1];
    const double lambda = 1e-14 * (M[0][0] + M[1][1]);
    M[0][0] += lambda;
    M[1][1] += lambda;
    const double g[2] = {J[0][0] * rv[0] + J[1][0] * rv[1], J[0][1] * rv[0] + J[1][1] * rv[1]};
    const double det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
    if (!(std::abs(det) > 0.0)) return std::nullopt;
    return Complex(-(M[1][1] * g[0] - M[0][1] * g[1]) / det, -(M[0][0] * g[1] - M[1][0] * g[0]) / det);
}

/// A root must also be a fixed point of the iteration on the hyperbolic
/// scale; near the boundary A decays like (1 - |z|^2)^2 and a small residual
/// alone proves nothing.
inline bool converged_step(Complex step, Complex z) { return std::abs(step) <= 1e-6 * (1.0 - std::norm(z)); }

/// Damped Newton on A(z) = 0 with backtracking on |A|.
inline std::optional<Complex> newton_A(const Expr& phi, Complex z, double tol, const std::vector<Complex>& avoid) {
    auto p = finite_point(phi, z);
    for (int it = 0; p && it < 60; ++it) {
        const double r0 = std::abs(p->A.value);
        const auto step = lm_step_A(*p);
        if (r0 < tol) {
            if (!p->A_w.dz.real() && !p->A_w.dz.imag() && !p->A_w.dzbar.real() && !p->A_w.dzbar.imag())
                return p->z;
            if (step && converged_step(*step, p->z)) return p->z;
            return std::nullopt;
        }
        if (!step) return std::nullopt;
        Complex delta = *step;
        const double room = 0.5 * (1.0 - std::abs(p->z));
        if (std::abs(delta) > room) delta *= room / std::abs(delta);
        std::optional<HypPoint> next;
        for (int back = 0; back < 20; ++back) {
            next = finite_point(phi, p->z + delta);
            if (next && !excluded(next->z, avoid) && std::abs(next->A.value) < r0) break;
            next.reset();
            delta *= 0.5;
        }
        if (!next) return std::nullopt;
        p = next;
    }
    return std::nullopt;
}

inline std::optional<Complex> newton_phi_prime(const Expr& phi, Complex z, double tol) {
    for (int it = 0; it < 100; ++it) {
        if (!(std::abs(z) < 1.0 - 1e-6)) return std::nullopt;
        Jet3 j;
        try {
            j = eval_jet(phi, z);
        } catch (const Error&) {
            return std::nullopt;
        }
        if (std::abs(j.d2) == 0.0) return std::abs(j.d1) < tol ? std::optional<Complex>(z) : std::nullopt;
        Complex step = j.d1 / j.d2;
        if (std::abs(j.d1) < tol) return converged_step(step, z) ? std::optional<Complex>(z) : std::nullopt;
        const double room = 0.5 * (1.0 - std::abs(z));
        if (std::abs(step) > room) step *= room / std::abs(step);
        z -= step;
    }
    return std::nullopt;
}

inline double wrap_angle(double a) {
    const double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a -= two_pi;
    return a;
}

} // namespace detail

/// Saddle directions: the solutions theta in [0, 2 pi) of
/// cos(gamma + 2 theta) = b / a, sorted.
inline std::vector<double> saddle_angles(double a, double b, double gamma) {
    const double c = std::acos(std::clamp(b / a, -1.0, 1.0));
    std::vector<double> out;
    for (double sgn : {1.0, -1.0})
        for (int k = 0; k < 2; ++k)
            out.push_back(detail::wrap_angle(0.5 * (sgn * c - gamma) + k * std::numbers::pi));
    std::sort(out.begin(), out.end());
    return out;
}

inline CriticalPoint classify(const Expr& phi, Complex z0, double class_tol = default_class_tol,
                              double residual_tol = default_residual_tol) {
    const HypPoint p = hyp_point(phi, z0);
    CriticalPoint cp;
    cp.z = z0;
    cp.absD = p.absD;
    cp.rhs = 2.0 * (1.0 - p.absD * p.absD);
    if (p.phi_prime_zero() || std::abs(p.jet.d1) < residual_tol) {
        cp.kind = CriticalKind::phi_prime_zero;
        cp.classification = Classification::local_min;
        return cp;
    }
    if (!(std::abs(p.A.value) < residual_tol)) {
        throw Error(ErrorKind::not_critical, "not a critical point: |A| = " + format_g17(std::abs(p.A.value)));
    }
    cp.kind = CriticalKind::A_zero;
    const double s = 1.0 - std::norm(z0);
    const double lhs = s * s * std::abs(p.S);
    cp.lhs = lhs;
    const double band = class_tol * cp.rhs;
    if (std::abs(lhs - cp.rhs) <= band) {
        cp.classification = Classification::degenerate;
    } else if (lhs > cp.rhs) {
        cp.classification = Classification::saddle;
        cp.gamma = std::arg(p.S);
        cp.branch_angles = saddle_angles(0.5 * lhs, 0.5 * cp.rhs, *cp.gamma);
    } else {
        cp.classification = Classification::strict_local_max;
    }
    return cp;
}

inline std::vector<CriticalPoint> find_phi_prime_zeros(const Expr& phi, int grid_density,
                                                       double newton_tol = default_newton_tol) {
    std::vector<Complex> roots;
    for (const Complex& s : detail::grid_starts(grid_density))
        if (const auto r = detail::newton_phi_prime(phi, s, newton_tol)) detail::dedup_push(roots, *r);
    std::vector<CriticalPoint> out;
    for (const Complex& r : roots) out.push_back(classify(phi, r));
    return out;
}

inline std::vector<CriticalPoint> find_A_zeros(const Expr& phi, int grid_density,
                                               double newton_tol = default_newton_tol,
                                               double class_tol = default_class_tol) {
    std::vector<Complex> avoid;
    for (const auto& cp : find_phi_prime_zeros(phi, grid_density)) avoid.push_back(cp.z);
    std::vector<Complex> roots;
    for (const Complex& s : detail::grid_starts(grid_density)) {
        if (detail::excluded(s, avoid)) continue;
        if (const auto r = detail::newton_A(phi, s, newton_tol, avoid)) detail::dedup_push(roots, *r);
    }
    std::vector<CriticalPoint> out;
    for (const Complex& r : roots) out.push_back(classify(phi, r, class_tol, newton_tol));
    return out;
}

inline bool critical_order(const CriticalPoint& a, const CriticalPoint& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
}

/// Zeros of A and of phi', classified and sorted.
inline std::vector<CriticalPoint> find_critical_points(const Expr& phi, int grid_density,
                                                       double newton_tol = default_newton_tol,
                                                       double class_tol = default_class_tol) {
    std::vector<CriticalPoint> out = find_A_zeros(phi, grid_density, newton_tol, class_tol);
    for (auto& cp : find_phi_prime_zeros(phi, grid_density, newton_tol)) out.push_back(std::move(cp));
    std::sort(out.begin(), out.end(), critical_order);
    return out;
}

/// Second-order Taylor model of |D| about z0, evaluated at z.
inline double local_expansion(const Expr& phi, Complex z0, Complex z) {
    const HypPoint p = hyp_point(phi, z0);
    if (p.phi_prime_zero()) throw Error(ErrorKind::zero_derivative, "phi'(z0) = 0");
    const double s = 1.0 - std::norm(z0);
    const Complex A = p.A.value;
    const Complex d = z - z0;
    const double D0 = p.absD;
    return D0 + 2.0 * D0 / s * std::real(A * d) +
           D0 / (s * s) * std::real((0.5 * s * s * p.S + 2.0 * A * A + 2.0 * std::conj(z0) * A) * d * d) +
           D0 / (s * s) * (-1.0 + D0 * D0 + std::norm(A)) * std::norm(d);
}

struct BranchCheck {
    int crossing_count = 0;
    std::vector<double> measured_angles;
};

/// Sign changes of |D| - |D(z0)| on the circle |z - z0| = radius.
inline BranchCheck saddle_branch_check(const Expr& phi, const CriticalPoint& cp, double radius, int samples = 2048) {
    if (cp.classification != Classification::saddle) throw Error(ErrorKind::not_saddle, "critical point is not a saddle");
    if (!(radius >= 1e-6)) throw Error(ErrorKind::invalid_argument, "radius below the noise floor");
    if (!(std::abs(cp.z) + radius < 1.0 - 1e-6)) throw Error(ErrorKind::domain, "circle leaves the disk");
    const double t0 = std::abs(hyp_derivative(phi, cp.z));
    auto f = [&](double th) { return std::abs(hyp_derivative(phi, cp.z + std::polar(radius, th))) - t0; };
    const double dth = 2.0 * std::numbers::pi / samples;
    BranchCheck out;
    double prev = f(0.0);
    for (int k = 1; k <= samples; ++k) {
        const double th = k * dth;
        const double cur = f(k == samples ? 0.0 : th);
        if ((prev < 0.0) != (cur < 0.0)) {
            double lo = th - dth, hi = th, flo = prev;
            for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            ++out.crossing_count;
            out.measured_angles.push_back(detail::wrap_angle(0.5 * (lo + hi)));
        }
        prev = cur;
    }
    std::sort(out.measured_angles.begin(), out.measured_angles.end());
    return out;
}

inline constexpr const char* critical_report_header = "kind,re_z,im_z,lhs,rhs,classification,branch_angles";

/// One report line; branch angles are separated by ';'.
inline std::string critical_report_line(const CriticalPoint& cp) {
    std::string line = to_string(cp.kind) + ',' + format_g17(cp.z.real()) + ',' + format_g17(cp.z.imag()) + ',' +
                       (cp.lhs ? format_g17(*cp.lhs) : std::string()) + ',' + format_g17(cp.rhs) + ',' +
                       to_string(cp.classification) + ',';
    for (std::size_t i = 0; i < cp.branch_angles.size(); ++i) {
        if (i) line += ';';
        line += format_g17(cp.branch_angles[i]);
    }
    return line;
}

inline void write_critical_report(std::ostream& os, const std::vector<CriticalPoint>& cps) {
    os << critical_report_header << '\n';
    for (const auto& cp : cps) os << critical_report_line(cp) << '\n';
}

} // namespace hypdisk
