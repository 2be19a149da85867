#pragma once

// Verification suites: closed-form reproduction of the four example families
// and property checks against the independent oracles. Every check reports
// the measured error next to its tolerance. Output depends only on the fixed
// seeds below, so repeated runs print identical bytes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "hypdisk/crit.hpp"
#include "hypdisk/expr.hpp"
#include "hypdisk/flow.hpp"
#include "hypdisk/format.hpp"
#include "hypdisk/hypops.hpp"
#include "hypdisk/levels.hpp"
#include "hypdisk/oracles.hpp"
#include "hypdisk/quadrature.hpp"

namespace hypdisk::verify {

enum class Compare { below, at_least, equal };

struct Check {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    Compare cmp = Compare::below;
    bool pass = false;
};

inline Check make_check(std::string name, double measured, double bound, Compare cmp) {
    bool pass = false;
    switch (cmp) {
    case Compare::below: pass = measured < bound; break;
    case Compare::at_least: pass = measured >= bound; break;
    case Compare::equal: pass = measured == bound; break;
    }
    return {std::move(name), measured, bound, cmp, pass};
}

inline Check below(std::string name, double measured, double tol) {
    return make_check(std::move(name), measured, tol, Compare::below);
}
inline Check at_least(std::string name, double measured, double bound) {
    return make_check(std::move(name), measured, bound, Compare::at_least);
}
inline Check equal(std::string name, double measured, double want) {
    return make_check(std::move(name), measured, want, Compare::equal);
}

inline std::string format_check(const Check& c) {
    std::string s = c.pass ? "PASS " : "FAIL ";
    s += c.name;
    switch (c.cmp) {
    case Compare::below: s += " measured=" + format_sci(c.measured) + " tol<" + format_sci(c.bound); break;
    case Compare::at_least: s += " measured=" + format_sci(c.measured) + " need>=" + format_sci(c.bound); break;
    case Compare::equal: s += " measured=" + format_g17(c.measured) + " need=" + format_g17(c.bound); break;
    }
    return s;
}

using Checks = std::vector<Check>;

namespace detail {

inline const double pi = std::numbers::pi;

struct Named {
    std::string name;
    Expr phi;
};

inline std::vector<Named> all_builtins() {
    return {{"example1", builtins::example1(0.5)},
            {"example2", builtins::example2(0.5)},
            {"example3", builtins::example3(pi / 4)},
            {"example4", builtins::example4(0.6)},
            {"mobius", builtins::mobius({0.3, -0.2}, 0.7)},
            {"identity", builtins::identity()}};
}

inline std::vector<Named> non_mobius_builtins() {
    auto all = all_builtins();
    all.resize(4);
    return all;
}

inline double abs_d(const Expr& phi, Complex z) { return std::abs(hyp_derivative(phi, z)); }

inline double err_unit_floor(Complex got, Complex want) { return std::abs(got - want) / std::max(std::abs(want), 1.0); }

/// A random point in |z| < rmax with |z| > rmin.
inline Complex annulus_point(oracle::DiskSampler& rng, double rmin, double rmax) {
    for (;;) {
        const Complex z = rng.point(rmax);
        if (std::abs(z) > rmin) return z;
    }
}

inline Expr random_mobius(oracle::DiskSampler& rng) {
    return builtins::mobius(rng.point(0.7), rng.uniform(0.0, 2 * pi));
}

inline double angle_gap(double a, double b) {
    const double d = std::fmod(std::abs(a - b), 2 * pi);
    return std::min(d, 2 * pi - d);
}

} // namespace detail

// ---------------------------------------------------------------------------
// jets

inline Checks jet_oracle_checks() {
    Checks out;
    oracle::DiskSampler rng(101);
    for (const auto& [name, phi] : detail::all_builtins()) {
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const Complex z = rng.point(0.8);
            const Jet3 got = eval_jet(phi, z);
            const Jet3 want = fd_jet_oracle([&](Complex w) { return eval_value(phi, w); }, z, 1e-4);
            worst = std::max({worst, detail::err_unit_floor(got.f, want.f), detail::err_unit_floor(got.d1, want.d1),
                              detail::err_unit_floor(got.d2, want.d2), detail::err_unit_floor(got.d3, want.d3)});
        }
        out.push_back(below("jets.jet_vs_fd[" + name + "]", worst, 1e-5));
    }
    return out;
}

inline Checks elliptic_checks() {
    Checks out;
    double worst = 0.0;
    for (double th : {detail::pi / 6, detail::pi / 4, detail::pi / 3}) {
        const double k = std::cos(th);
        worst = std::max(worst, std::abs(elliptic_k(k) - oracle::elliptic_k_series(k)) / oracle::elliptic_k_series(k));
    }
    out.push_back(below("jets.elliptic_k_agm_vs_series", worst, 1e-14));
    out.push_back(below("jets.elliptic_k_sqrt_half", std::abs(elliptic_k(std::sqrt(0.5)) - 1.854074677301372), 1e-12));
    return out;
}

// ---------------------------------------------------------------------------
// operators

inline Checks operator_oracle_checks() {
    Checks out;
    const double h = 1e-4;
    oracle::DiskSampler rng(202);
    for (const auto& [name, phi] : detail::all_builtins()) {
        double e_a = 0, e_w = 0, e_h = 0, e_l = 0;
        const oracle::RealField absd = [&](Complex w) { return detail::abs_d(phi, w); };
        const oracle::RealField logd = [&](Complex w) { return std::log(detail::abs_d(phi, w)); };
        const oracle::ComplexField a = [&](Complex w) { return a_operator(phi, w).value; };
        for (int k = 0; k < 100; ++k) {
            // Stay 0.2 away from the pole of A at a zero of phi' so that h is
            // small against the distance to the singularity.
            const Complex z = detail::annulus_point(rng, 0.2, 0.8);
            const HypPoint p = hyp_point(phi, z);
            const double s = 1.0 - std::norm(z);
            const double floor = 1e-3;
            // Second derivatives are measured against their natural size, which
            // matters where they vanish identically (Mobius maps).
            const double h_scale = p.absD / (s * s), l_scale = 1.0 / (s * s);
            e_a = std::max(e_a, oracle::rel_err(p.A.value, s * oracle::wirtinger_fd(logd, z, h).dz, floor));
            const auto wa = oracle::wirtinger_fd(a, z, h);
            e_w = std::max({e_w, oracle::rel_err(p.A_w.dz, wa.dz, floor), oracle::rel_err(p.A_w.dzbar, wa.dzbar, floor)});
            const HessianAbsD H = hessian_absD(p);
            const auto sw = oracle::second_wirtinger_fd(absd, z, h);
            e_h = std::max({e_h, oracle::rel_err(H.d2_zz, sw.zz, h_scale), oracle::rel_err(H.d2_zzbar, sw.zzbar, h_scale)});
            e_l = std::max(e_l, oracle::rel_err(laplacian_log_absD(p), oracle::second_wirtinger_fd(logd, z, h).zzbar, l_scale));
        }
        out.push_back(below("operators.A_vs_fd_log_derivative[" + name + "]", e_a, 1e-5));
        out.push_back(below("operators.wirtinger_A_vs_fd[" + name + "]", e_w, 1e-5));
        out.push_back(below("operators.hessian_vs_fd[" + name + "]", e_h, 1e-4));
        out.push_back(below("operators.laplacian_vs_fd[" + name + "]", e_l, 1e-3));
    }
    return out;
}

inline Checks invariance_checks() {
    Checks out;
    oracle::DiskSampler rng(303);
    for (const auto& [name, phi] : detail::all_builtins()) {
        double e_d = 0, e_post = 0, e_pre = 0;
        for (int k = 0; k < 50; ++k) {
            const Expr sigma = detail::random_mobius(rng);
            const Expr tau = detail::random_mobius(rng);
            const Complex z = rng.point(0.8);
            const Jet3 tj = eval_jet(tau, z);
            const Expr phi_tau = compose(phi, tau);
            const Expr sigma_phi = compose(sigma, phi);
            e_d = std::max(e_d, std::abs(detail::abs_d(compose(sigma, phi_tau), z) - detail::abs_d(phi, tj.f)));
            const AValue a_z = a_operator(phi, z);
            const AValue a_tz = a_operator(phi, tj.f);
            if (!a_z.infinite) e_post = std::max(e_post, detail::err_unit_floor(a_operator(sigma_phi, z).value, a_z.value));
            if (!a_tz.infinite) {
                const Complex want = tj.d1 / std::abs(tj.d1) * a_tz.value;
                e_pre = std::max(e_pre, detail::err_unit_floor(a_operator(phi_tau, z).value, want));
            }
        }
        out.push_back(below("operators.absD_sigma_phi_tau[" + name + "]", e_d, 1e-10));
        out.push_back(below("operators.A_tau_after_phi[" + name + "]", e_post, 1e-10));
        out.push_back(below("operators.A_phi_after_tau[" + name + "]", e_pre, 1e-10));
    }
    double worst = 0.0;
    std::vector<Expr> mobs{builtins::mobius({0.3, -0.2}, 0.7), builtins::identity()};
    for (int k = 0; k < 8; ++k) mobs.push_back(detail::random_mobius(rng));
    for (const Expr& m : mobs)
        for (int k = 0; k < 50; ++k) worst = std::max(worst, a_operator(m, rng.point(0.95)).abs());
    out.push_back(below("operators.mobius_A_vanishes", worst, 1e-12));
    return out;
}

// ---------------------------------------------------------------------------
// flow

inline Checks example4_trajectory_checks() {
    Checks out;
    const Expr phi = builtins::example4(0.6);
    TraceOptions o;
    o.direction = Direction::forward;
    const Trajectory tr = trace_trajectory(phi, 0.2, o);
    double e_z = 0, e_k = 0, t_max = 0;
    for (std::size_t i = tr.start_index; i < tr.samples.size(); ++i) {
        const auto& s = tr.samples[i];
        if (s.t > 0.99) continue;
        t_max = std::max(t_max, s.t);
        e_z = std::max(e_z, std::abs(s.z - s.t / (1.0 + std::sqrt(1.0 - s.t * s.t))));
        e_k = std::max(e_k, std::isnan(s.kappa) ? 1.0 : std::abs(s.kappa));
    }
    out.push_back(at_least("flow.example4_reaches_level", tr.omega_plus_est, 0.99));
    out.push_back(below("flow.example4_radial_parametrization", e_z, 1e-6));
    out.push_back(below("flow.example4_curvature", e_k, 1e-6));
    return out;
}

inline Checks example1_flow_checks() {
    Checks out;
    const double a = 0.5;
    const Expr phi = builtins::example1(a);
    const Trajectory tr = trace_trajectory(phi, 0.0);
    double im = 0, dmax = 0;
    for (const auto& s : tr.samples) {
        im = std::max(im, std::abs(s.z.imag()));
        dmax = std::max(dmax, s.absD);
    }
    out.push_back(below("flow.example1_axis_stays_real", im, 1e-9));
    out.push_back(at_least("flow.example1_axis_reaches_a", dmax, a - 1e-3));
    std::vector<Trajectory> fan;
    for (int k = 0; k < 8; ++k) fan.push_back(trace_trajectory(phi, std::polar(0.3, 2 * detail::pi * k / 8)));
    double worst = 0;
    int forward = 0;
    for (const Endpoint& e : endpoint_report(fan)) {
        if (!e.forward) continue;
        ++forward;
        worst = std::max(worst, std::abs(e.z + 1.0));
    }
    out.push_back(equal("flow.example1_fan_forward_ends", forward, 8));
    out.push_back(below("flow.example1_fan_ends_at_minus_one", worst, 0.05));
    return out;
}

inline Checks trajectory_bound_checks() {
    Checks out;
    const Complex starts[] = {{0.2, -0.3}, {0.1, 0.2}, {-0.3, 0.1}, {0.4, 0.4}, {-0.2, -0.5}};
    for (const auto& [name, phi] : detail::non_mobius_builtins()) {
        int held = 0, total = 0;
        double margin = std::numeric_limits<double>::infinity();
        double worst_drop = std::numeric_limits<double>::infinity();
        for (const Complex& z0 : starts) {
            const Trajectory tr = trace_trajectory(phi, z0);
            const Theorem1Result r = theorem1_check(tr);
            ++total;
            held += r.holds ? 1 : 0;
            margin = std::min(margin, r.lhs - r.rhs);
            double min_a = std::numeric_limits<double>::infinity();
            for (std::size_t i = tr.start_index; i < tr.samples.size(); ++i) min_a = std::min(min_a, tr.samples[i].absA);
            worst_drop = std::min(worst_drop, tr.samples[tr.start_index].absA / min_a);
        }
        out.push_back(equal("flow.trajectory_bound_holds[" + name + "]", held, total));
        out.push_back(at_least("flow.trajectory_bound_margin[" + name + "]", margin, -1e-9));
        if (name == "example1" || name == "example4") {
            out.push_back(at_least("flow.min_A_decrease[" + name + "]", worst_drop, 10.0));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// levels

inline Checks level_checks() {
    Checks out;
    const LevelOptions o;
    auto drift = [](const Expr& phi, const std::vector<LevelCurve>& cs) {
        double d = 0;
        for (const auto& c : cs)
            for (const Complex& v : c.vertices) d = std::max(d, std::abs(detail::abs_d(phi, v) - c.t));
        return d;
    };
    {
        const Expr phi = builtins::example4(0.6);
        const auto cs = components(phi, 0.8, 32, o);
        out.push_back(equal("levels.example4_components", static_cast<double>(cs.size()), 1));
        double r = 0;
        int closed = 0;
        for (const auto& c : cs) {
            closed += c.closed ? 1 : 0;
            for (const Complex& v : c.vertices) r = std::max(r, std::abs(std::abs(v) - 0.5));
        }
        out.push_back(equal("levels.example4_closed", closed, 1));
        out.push_back(below("levels.example4_circle_radius", r, 1e-8));
        out.push_back(below("levels.example4_drift", drift(phi, cs), 1.0001 * o.level_tol));
    }
    {
        const Expr phi = builtins::example2(0.5);
        const auto cs = components(phi, 0.25, 32, o);
        out.push_back(equal("levels.example2_components", static_cast<double>(cs.size()), 2));
        double through = 0, side = 0;
        int upper = 0;
        for (const auto& c : cs) {
            const oracle::Circle fit = oracle::fit_circle(c.vertices);
            through = std::max({through, std::abs(std::abs(1.0 - fit.centre) - fit.radius),
                                std::abs(std::abs(-1.0 - fit.centre) - fit.radius)});
            double lo = 1, hi = -1;
            for (const Complex& v : c.vertices) {
                lo = std::min(lo, v.imag());
                hi = std::max(hi, v.imag());
            }
            upper += lo > 0 ? 1 : 0;
            side = std::max(side, lo < 0 && hi > 0 ? std::min(-lo, hi) : 0.0);
        }
        out.push_back(below("levels.example2_arcs_through_pm1", through, 1e-3));
        out.push_back(equal("levels.example2_upper_arcs", upper, 1));
        out.push_back(below("levels.example2_arcs_one_sided", side, 1e-5));
        out.push_back(below("levels.example2_drift", drift(phi, cs), 1.0001 * o.level_tol));
        out.push_back(equal("levels.example2_above_max_empty", static_cast<double>(components(phi, 0.99, 32, o).size()), 0));
    }
    {
        const Expr phi = builtins::example1(0.5);
        const auto cs = components(phi, 0.25, 32, o);
        out.push_back(equal("levels.example1_components", static_cast<double>(cs.size()), 1));
        out.push_back(below("levels.example1_drift", drift(phi, cs), 1.0001 * o.level_tol));
    }
    return out;
}

// ---------------------------------------------------------------------------
// critical

inline Checks example2_degeneracy_checks() {
    Checks out;
    const double a = 0.5;
    const Expr phi = builtins::example2(a);
    double e_a = 0, e_d = 0, e_c = 0;
    int degenerate = 0;
    for (int k = 0; k < 20; ++k) {
        const double x = -0.95 + 1.9 * (k + 0.5) / 20;
        const HypPoint p = hyp_point(phi, x);
        e_a = std::max(e_a, p.A.abs());
        e_d = std::max(e_d, std::abs(p.absD - a));
        const CriticalPoint cp = classify(phi, x);
        e_c = std::max(e_c, std::abs(cp.lhs.value_or(1e300) - cp.rhs));
        degenerate += cp.classification == Classification::degenerate ? 1 : 0;
    }
    out.push_back(below("critical.example2_axis_A", e_a, 1e-10));
    out.push_back(below("critical.example2_axis_absD", e_d, 1e-12));
    out.push_back(below("critical.example2_axis_lhs_minus_rhs", e_c, 1e-9));
    out.push_back(equal("critical.example2_axis_degenerate", degenerate, 20));
    oracle::DiskSampler rng(404);
    double e_off = 0;
    for (int k = 0; k < 100; ++k) {
        const double xi = rng.uniform(-0.9, 0.9), y = rng.uniform(-0.9, 0.9);
        const Complex z = Complex(xi, y) / Complex(1.0, xi * y);
        const double want = a * std::cos(2 * std::atan(y)) / std::cos(2 * a * std::atan(y));
        e_off = std::max(e_off, std::abs(detail::abs_d(phi, z) - want));
    }
    out.push_back(below("critical.example2_off_axis_absD", e_off, 1e-10));
    return out;
}

inline Checks example3_saddle_checks() {
    Checks out;
    const std::pair<const char*, double> thetas[] = {{"pi/6", detail::pi / 6}, {"pi/4", detail::pi / 4}, {"pi/3", detail::pi / 3}};
    for (const auto& [label, theta] : thetas) {
        const std::string tag = std::string("[theta=") + label + "]";
        const Expr phi = builtins::example3(theta);
        const double k = std::cos(theta);
        out.push_back(below("critical.example3_K_agm_vs_series" + tag,
                            std::abs(elliptic_k(k) - oracle::elliptic_k_series(k)) / oracle::elliptic_k_series(k), 1e-14));
        const auto roots = find_A_zeros(phi, 16);
        double nearest = 1.0;
        for (const auto& r : roots) nearest = std::min(nearest, std::abs(r.z));
        out.push_back(below("critical.example3_root_at_origin" + tag, nearest, 1e-10));
        out.push_back(equal("critical.example3_root_count" + tag, static_cast<double>(roots.size()), 1));
        const CriticalPoint cp = classify(phi, 0.0);
        out.push_back(at_least("critical.example3_lhs_minus_rhs" + tag, cp.lhs.value_or(0) - cp.rhs, 1e-12));
        out.push_back(equal("critical.example3_is_saddle" + tag, cp.classification == Classification::saddle, 1));
        if (cp.classification != Classification::saddle) continue;
        const BranchCheck bc = saddle_branch_check(phi, cp, 1e-2);
        out.push_back(equal("critical.example3_branch_crossings" + tag, bc.crossing_count, 4));
        double gap = bc.measured_angles.size() == cp.branch_angles.size() ? 0.0 : 1e300;
        for (std::size_t i = 0; gap < 1e300 && i < bc.measured_angles.size(); ++i)
            gap = std::max(gap, detail::angle_gap(bc.measured_angles[i], cp.branch_angles[i]));
        out.push_back(below("critical.example3_branch_angles" + tag, gap, 0.05));
    }
    out.push_back(below("critical.example3_K_sqrt_half", std::abs(elliptic_k(std::sqrt(0.5)) - 1.854074677), 1e-9));
    return out;
}

inline Checks example1_no_critical_checks() {
    return {equal("critical.example1_no_A_zeros", static_cast<double>(find_A_zeros(builtins::example1(0.5), 64).size()), 0)};
}

inline Checks expansion_order_checks() {
    Checks out;
    oracle::DiskSampler rng(505);
    const auto fns = detail::non_mobius_builtins();
    double worst = 1e300;
    for (int k = 0; k < 10; ++k) {
        const Expr& phi = fns[k % fns.size()].phi;
        const Complex z0 = detail::annulus_point(rng, 0.1, 0.7);
        const Complex dir = std::polar(1.0, rng.uniform(0.0, 2 * detail::pi));
        auto err = [&](double r) { return std::abs(local_expansion(phi, z0, z0 + r * dir) - detail::abs_d(phi, z0 + r * dir)); };
        worst = std::min(worst, std::log2(err(1e-2) / err(5e-3)));
    }
    out.push_back(at_least("critical.expansion_order", worst, 2.7));
    return out;
}

// ---------------------------------------------------------------------------
// examples

inline Checks example4_closed_form_checks() {
    Checks out;
    const Expr phi = builtins::example4(0.6);
    oracle::DiskSampler rng(606);
    double e_d = 0, e_a = 0;
    for (int k = 0; k < 200; ++k) {
        // A is a difference of O(1) terms of size (1-|z|^2)^2, so its relative
        // rounding error grows like eps / (1-|z|^2)^3 towards the boundary.
        const Complex z = detail::annulus_point(rng, 1e-3, 0.9);
        const double r2 = std::norm(z);
        const HypPoint p = hyp_point(phi, z);
        const double want = 2 * std::abs(z) / (1 + r2);
        e_d = std::max(e_d, std::abs(p.absD - want) / want);
        e_a = std::max(e_a, oracle::rel_err(p.A.value, (1 - r2) * (1 - r2) / (2.0 * z * (1 + r2))));
    }
    out.push_back(below("examples.example4_absD_closed_form", e_d, 1e-12));
    out.push_back(below("examples.example4_A_closed_form", e_a, 1e-12));
    return out;
}

// ---------------------------------------------------------------------------
// suites

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"all", "jets", "operators", "flow", "levels", "critical", "examples"};
    return names;
}

inline bool is_suite(const std::string& s) {
    const auto& n = suite_names();
    return std::find(n.begin(), n.end(), s) != n.end();
}

struct Group {
    std::function<Checks()> run;
    std::vector<std::string> suites;
};

inline std::vector<Group> groups() {
    return {
        {jet_oracle_checks, {"jets"}},
        {elliptic_checks, {"jets"}},
        {operator_oracle_checks, {"operators"}},
        {invariance_checks, {"operators"}},
        {example4_closed_form_checks, {"examples"}},
        {example4_trajectory_checks, {"flow", "examples"}},
        {example1_flow_checks, {"flow", "examples"}},
        {trajectory_bound_checks, {"flow"}},
        {level_checks, {"levels"}},
        {example2_degeneracy_checks, {"critical", "examples"}},
        {example3_saddle_checks, {"critical", "examples"}},
        {example1_no_critical_checks, {"critical", "examples"}},
        {expansion_order_checks, {"critical"}},
    };
}

inline Checks run_suite(const std::string& suite) {
    if (!is_suite(suite)) throw Error(ErrorKind::invalid_argument, "unknown suite '" + suite + "'");
    Checks out;
    for (const Group& g : groups()) {
        const bool member = suite == "all" || std::find(g.suites.begin(), g.suites.end(), suite) != g.suites.end();
        if (!member) continue;
        Checks c = g.run();
        out.insert(out.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
    }
    return out;
}

/// Prints one line per check and a summary; returns true when all pass.
inline bool print_report(std::ostream& os, const std::string& suite, const Checks& checks) {
    int failed = 0;
    for (const Check& c : checks) {
        os << format_check(c) << '\n';
        failed += c.pass ? 0 : 1;
    }
    os << "SUMMARY suite=" << suite << " checks=" << checks.size() << " failed=" << failed << '\n';
    return failed == 0;
}

} // namespace hypdisk::verify
