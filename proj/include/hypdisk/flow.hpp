#pragma once

// Orthogonal trajectories of the level sets of |D|.
//
// Parametrised by the level t, a trajectory solves
//   z'(t) = (1 - |z|^2) / (2 t A(z)),
// along which |D(z(t))| = t exactly. The ODE is integrated with the
// Dormand-Prince 5(4) pair; after every accepted step the point is pulled back
// onto the level by Newton iteration along the gradient of |D|.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hypdisk/format.hpp"
#include "hypdisk/hypops.hpp"

namespace hypdisk {

enum class EndReason { disk_boundary, A_vanishing, phi_prime_zero, step_limit, user_interval, none };

inline std::string to_string(EndReason r) {
    switch (r) {
    case EndReason::disk_boundary: return "disk_boundary";
    case EndReason::A_vanishing: return "A_vanishing";
    case EndReason::phi_prime_zero: return "phi_prime_zero";
    case EndReason::step_limit: return "step_limit";
    case EndReason::user_interval: return "user_interval";
    case EndReason::none: return "none";
    }
    return "none";
}

enum class Direction { forward, backward, both };

inline Direction parse_direction(const std::string& s) {
    if (s == "forward") return Direction::forward;
    if (s == "backward") return Direction::backward;
    if (s == "both") return Direction::both;
    throw Error(ErrorKind::invalid_argument, "direction must be forward, backward or both: " + s);
}

struct TrajectorySample {
    double t = 0.0;
    Complex z{};
    double absD = 0.0;
    double absA = 0.0;
    double kappa = 0.0;
};

struct Trajectory {
    double t0 = 0.0;
    Complex z0{};
    std::vector<TrajectorySample> samples;  // increasing t
    std::size_t start_index = 0;            // index of the sample at t0
    double omega_minus_est = 0.0;
    double omega_plus_est = 0.0;
    EndReason end_reason_plus = EndReason::none;
    EndReason end_reason_minus = EndReason::none;
    std::size_t steps_plus = 0;
    std::size_t steps_minus = 0;
};

struct TraceOptions {
    Direction direction = Direction::both;
    double level_tol = 1e-9;
    int max_steps = 20000;
    double boundary_margin = 1e-6;
    double rtol = 1e-10;
    double max_dt = 1e-2;
    /// Optional closed interval of levels to stay within.
    std::optional<double> t_min;
    std::optional<double> t_max;
};

/// |A| below this ends a trajectory.
inline constexpr double a_vanishing_threshold = 1e-8;
/// |D| below this is treated as reaching a zero of phi'.
inline constexpr double phi_prime_level_floor = 1e-10;

namespace detail {

struct FlowPoint {
    HypPoint p;
    Complex velocity;  // dz/dt
};

inline std::optional<HypPoint> try_point(const Expr& phi, Complex z) {
    if (!(std::abs(z) < 1.0)) return std::nullopt;
    try {
        HypPoint p = hyp_point(phi, z);
        if (p.phi_prime_zero() || p.A.infinite || p.A.value == Complex(0.0)) return std::nullopt;
        return p;
    } catch (const Error&) {
        return std::nullopt;
    }
}

inline std::optional<Complex> flow_rhs(const Expr& phi, double t, Complex z) {
    const auto p = try_point(phi, z);
    if (!p) return std::nullopt;
    return (1.0 - std::norm(z)) / (2.0 * t * p->A.value);
}

/// Newton iteration along the gradient of |D| onto the level t.
inline std::optional<HypPoint> project_to_level(const Expr& phi, Complex z, double t, double level_tol) {
    for (int it = 0; it < 30; ++it) {
        const auto p = try_point(phi, z);
        if (!p) return std::nullopt;
        const double r = p->absD - t;
        if (std::abs(r) <= 0.1 * level_tol) return p;
        const double g2 = std::norm(p->grad);
        if (!(g2 > 0.0)) return std::nullopt;
        z -= r * p->grad / g2;
    }
    return std::nullopt;
}

inline double safe_curvature(const HypPoint& p) {
    try {
        return curvature(p);
    } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

inline TrajectorySample make_sample(double t, const HypPoint& p) {
    return {t, p.z, p.absD, p.A.abs(), safe_curvature(p)};
}

struct HalfResult {
    std::vector<TrajectorySample> samples;  // excluding the start, in integration order
    EndReason reason = EndReason::none;
    std::size_t steps = 0;
};

// Dormand-Prince 5(4) tableau.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double dp_b5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
inline constexpr double dp_b4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct StepResult {
    Complex z5;
    double err;
};

inline std::optional<StepResult> dp_step(const Expr& phi, double t, Complex z, double h, Complex k0) {
    std::array<Complex, 7> k{};
    k[0] = k0;
    for (int s = 1; s < 7; ++s) {
        Complex zs = z;
        for (int j = 0; j < s; ++j) zs += h * dp_a[s][j] * k[j];
        const double ts = t + dp_c[s] * h;
        if (!(ts > 0.0)) return std::nullopt;
        const auto v = flow_rhs(phi, ts, zs);
        if (!v) return std::nullopt;
        k[s] = *v;
    }
    Complex z5 = z, z4 = z;
    for (int s = 0; s < 7; ++s) {
        z5 += h * dp_b5[s] * k[s];
        z4 += h * dp_b4[s] * k[s];
    }
    return StepResult{z5, std::abs(z5 - z4)};
}

inline HalfResult integrate_half(const Expr& phi, const HypPoint& start, double t0, double sign,
                                 const TraceOptions& o) {
    HalfResult out;
    double t = t0;
    HypPoint cur = start;
    const double atol = o.rtol * 1e-2;
    double h = o.max_dt;
    const std::optional<double> bound = sign > 0 ? o.t_max : o.t_min;

    while (true) {
        if (out.steps >= static_cast<std::size_t>(o.max_steps)) {
            out.reason = EndReason::step_limit;
            return out;
        }
        bool clamped = false;
        double step = std::min(h, o.max_dt);
        if (sign < 0) step = std::min(step, 0.5 * t);
        if (bound) {
            const double room = sign * (*bound - t);
            if (room <= 0.0) {
                out.reason = EndReason::user_interval;
                return out;
            }
            if (step >= room) {
                step = room;
                clamped = true;
            }
        }
        if (step < 1e-15 * std::max(t, 1e-300) || step < 1e-300) {
            out.reason = EndReason::step_limit;
            return out;
        }
        const Complex k0 = (1.0 - std::norm(cur.z)) / (2.0 * t * cur.A.value);
        const auto r = dp_step(phi, t, cur.z, sign * step, k0);
        const double scale = atol + o.rtol * std::abs(cur.z);
        const double err = r ? r->err / scale : std::numeric_limits<double>::infinity();
        if (!(err <= 1.0)) {
            h = std::isfinite(err) ? step * std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25 * step;
            continue;
        }
        const double t_new = clamped ? *bound : t + sign * step;
        const auto proj = project_to_level(phi, r->z5, t_new, o.level_tol);
        if (!proj) {
            h = 0.25 * step;
            continue;
        }
        ++out.steps;
        t = t_new;
        cur = *proj;
        out.samples.push_back(make_sample(t, cur));
        h = step * std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));

        if (std::abs(cur.z) > 1.0 - o.boundary_margin) {
            out.reason = EndReason::disk_boundary;
            return out;
        }
        if (cur.absD < phi_prime_level_floor) {
            out.reason = EndReason::phi_prime_zero;
            return out;
        }
        if (cur.A.abs() < a_vanishing_threshold) {
            out.reason = EndReason::A_vanishing;
            return out;
        }
        if (clamped) {
            out.reason = EndReason::user_interval;
            return out;
        }
    }
}

} // namespace detail

inline Trajectory trace_trajectory(const Expr& phi, Complex z0, const TraceOptions& opts = {}) {
    if (!(std::abs(z0) < 1.0)) throw Error(ErrorKind::domain, "start point outside the open unit disk");
    if (!(opts.level_tol > 0.0) || opts.max_steps < 1 || !(opts.boundary_margin > 0.0) ||
        !(opts.rtol > 0.0) || !(opts.max_dt > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "invalid trace options");
    }
    const HypPoint p = hyp_point(phi, z0);
    if (p.phi_prime_zero()) throw Error(ErrorKind::zero_derivative, "invalid start: phi'(z0) = 0");
    if (p.A.abs() < a_vanishing_threshold) throw Error(ErrorKind::zero_a, "invalid start: A(z0) = 0");

    Trajectory tr;
    tr.t0 = p.absD;
    tr.z0 = z0;
    const bool fwd = opts.direction != Direction::backward;
    const bool bwd = opts.direction != Direction::forward;
    detail::HalfResult minus, plus;
    if (bwd) minus = detail::integrate_half(phi, p, tr.t0, -1.0, opts);
    if (fwd) plus = detail::integrate_half(phi, p, tr.t0, +1.0, opts);

    tr.samples.reserve(minus.samples.size() + plus.samples.size() + 1);
    tr.samples.assign(minus.samples.rbegin(), minus.samples.rend());
    tr.start_index = tr.samples.size();
    tr.samples.push_back(detail::make_sample(tr.t0, p));
    tr.samples.insert(tr.samples.end(), plus.samples.begin(), plus.samples.end());
    tr.omega_minus_est = tr.samples.front().t;
    tr.omega_plus_est = tr.samples.back().t;
    tr.end_reason_minus = minus.reason;
    tr.end_reason_plus = plus.reason;
    tr.steps_minus = minus.steps;
    tr.steps_plus = plus.steps;
    return tr;
}

/// Largest deviation of |D(z)| from the recorded level over the samples.
inline double level_drift(const Expr& phi, const Trajectory& tr) {
    double drift = 0.0;
    for (const auto& s : tr.samples) drift = std::max(drift, std::abs(std::abs(hyp_derivative(phi, s.z)) - s.t));
    return drift;
}

struct Theorem1Result {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;
};

/// log(t/t0) against 2 inf|A| d(z(t0), z(t)) for the last forward sample.
inline Theorem1Result theorem1_check(const Trajectory& tr) {
    Theorem1Result r;
    if (tr.samples.empty() || tr.start_index + 1 >= tr.samples.size()) return r;
    const auto& first = tr.samples[tr.start_index];
    const auto& last = tr.samples.back();
    double min_a = std::numeric_limits<double>::infinity();
    for (std::size_t i = tr.start_index; i < tr.samples.size(); ++i) min_a = std::min(min_a, tr.samples[i].absA);
    r.lhs = std::log(last.t / first.t);
    r.rhs = 2.0 * min_a * hyperbolic_distance(first.z, last.z);
    r.holds = r.lhs >= r.rhs - 1e-9;
    return r;
}

struct Endpoint {
    Complex z;
    double t;
    EndReason reason;
    bool forward;
};

inline std::vector<Endpoint> endpoint_report(const std::vector<Trajectory>& trajs) {
    std::vector<Endpoint> out;
    for (const auto& tr : trajs) {
        if (tr.samples.empty()) continue;
        if (tr.end_reason_minus != EndReason::none)
            out.push_back({tr.samples.front().z, tr.samples.front().t, tr.end_reason_minus, false});
        if (tr.end_reason_plus != EndReason::none)
            out.push_back({tr.samples.back().z, tr.samples.back().t, tr.end_reason_plus, true});
    }
    return out;
}

inline constexpr const char* trajectory_csv_header = "t,re_z,im_z,absD,absA,kappa";

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << trajectory_csv_header << '\n';
    for (const auto& s : tr.samples) {
        os << format_g17(s.t) << ',' << format_g17(s.z.real()) << ',' << format_g17(s.z.imag()) << ','
           << format_g17(s.absD) << ',' << format_g17(s.absA) << ',' << format_g17(s.kappa) << '\n';
    }
}

} // namespace hypdisk
