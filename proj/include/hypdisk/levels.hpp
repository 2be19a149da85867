#pragma once

// Level sets {z : |D(z)| = t} traced as polylines.
//
// Seeds come from sign changes of |D| - t on the edges of a Cartesian grid.
// From each seed the curve is followed in both directions by a predictor step
// along the level tangent i conj(A)/|A| and a Newton corrector along the
// gradient of |D|.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hypdisk/flow.hpp"
#include "hypdisk/format.hpp"
#include "hypdisk/hypops.hpp"

namespace hypdisk {

enum class LevelEnd { loop_closed, disk_boundary, critical_point, step_limit };

inline std::string to_string(LevelEnd e) {
    switch (e) {
    case LevelEnd::loop_closed: return "loop_closed";
    case LevelEnd::disk_boundary: return "disk_boundary";
    case LevelEnd::critical_point: return "critical_point";
    case LevelEnd::step_limit: return "step_limit";
    }
    return "step_limit";
}

struct LevelCurve {
    double t = 0.0;
    std::vector<Complex> vertices;
    bool closed = false;
    /// Reasons the curve stops at its first and at its last vertex.
    std::pair<LevelEnd, LevelEnd> end_reasons{LevelEnd::step_limit, LevelEnd::step_limit};
};

struct LevelOptions {
    double step = 1e-2;
    double level_tol = 1e-9;
    int max_steps = 20000;
    double boundary_margin = 1e-6;
};

namespace detail {

inline void require_level(double t) {
    if (!(t > 0.0 && t < 1.0)) throw Error(ErrorKind::invalid_argument, "level must lie in (0, 1)");
}

inline std::optional<double> level_residual(const Expr& phi, Complex z, double t) {
    if (!(std::abs(z) < 1.0)) return std::nullopt;
    try {
        return hyp_point(phi, z).absD - t;
    } catch (const Error&) {
        return std::nullopt;
    }
}

/// Newton along the gradient; the result must stay within max_move of z.
inline std::optional<HypPoint> correct_onto_level(const Expr& phi, Complex z, double t, double level_tol,
                                                  double max_move) {
    const Complex z_in = z;
    for (int it = 0; it < 25; ++it) {
        const auto p = try_point(phi, z);
        if (!p) return std::nullopt;
        const double r = p->absD - t;
        if (std::abs(r) <= 0.1 * level_tol) {
            if (std::abs(z - z_in) > max_move) return std::nullopt;
            return p;
        }
        const double g2 = std::norm(p->grad);
        if (!(g2 > 0.0)) return std::nullopt;
        z -= r * p->grad / g2;
    }
    return std::nullopt;
}

inline Complex level_tangent(const HypPoint& p) {
    const Complex w = Complex(0, 1) * std::conj(p.A.value);
    return w / std::abs(w);
}

struct LevelHalf {
    std::vector<Complex> vertices;  // excluding the seed
    LevelEnd reason = LevelEnd::step_limit;
};

inline LevelHalf trace_level_half(const Expr& phi, double t, const HypPoint& seed, double dir,
                                  const LevelOptions& o, int& steps_left) {
    LevelHalf out;
    HypPoint cur = seed;
    Complex T = dir * level_tangent(seed);
    double h = o.step;
    double arclen = 0.0;
    while (true) {
        if (steps_left <= 0) {
            out.reason = LevelEnd::step_limit;
            return out;
        }
        double h_eff = h;
        if (const auto d = a_newton_step(cur)) {
            // Closer than this to a zero of A the level cannot be told apart
            // from one passing through it.
            if (std::abs(*d) < std::sqrt(o.level_tol) * (1.0 - std::norm(cur.z))) {
                out.reason = LevelEnd::critical_point;
                return out;
            }
            h_eff = std::min(h_eff, 0.5 * std::abs(*d));
        }
        if (h_eff < 1e-13) {
            out.reason = cur.A.abs() < 1e-6 ? LevelEnd::critical_point : LevelEnd::step_limit;
            return out;
        }
        const auto next = correct_onto_level(phi, cur.z + h_eff * T, t, o.level_tol, 0.5 * h_eff);
        bool ok = next.has_value();
        Complex T_new{};
        if (ok) {
            T_new = level_tangent(*next);
            if (std::real(T_new * std::conj(T)) < 0.0) T_new = -T_new;
            ok = std::abs(std::arg(T_new / T)) <= 0.2;
        }
        if (!ok) {
            h = 0.5 * h_eff;
            continue;
        }
        --steps_left;
        arclen += std::abs(next->z - cur.z);
        cur = *next;
        T = T_new;
        out.vertices.push_back(cur.z);
        h = std::min(o.step, 2.0 * h_eff);

        if (std::abs(cur.z) > 1.0 - o.boundary_margin) {
            out.reason = LevelEnd::disk_boundary;
            return out;
        }
        if (cur.A.abs() < a_vanishing_threshold) {
            out.reason = LevelEnd::critical_point;
            return out;
        }
        if (arclen > 4.0 * o.step && std::abs(cur.z - seed.z) < o.step) {
            out.reason = LevelEnd::loop_closed;
            return out;
        }
    }
}

struct CellKey {
    std::int64_t x, y;
    bool operator==(const CellKey&) const = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const {
        return std::hash<std::int64_t>()(k.x * 73856093LL ^ k.y * 19349663LL);
    }
};

/// Vertices bucketed at a fixed cell size for near-neighbour queries.
class VertexHash {
public:
    explicit VertexHash(double cell) : cell_(cell) {}

    void insert(Complex z) { cells_[key(z)].push_back(z); }

    bool near(Complex z, double radius) const {
        const CellKey k = key(z);
        const std::int64_t reach = static_cast<std::int64_t>(std::ceil(radius / cell_));
        for (std::int64_t dx = -reach; dx <= reach; ++dx) {
            for (std::int64_t dy = -reach; dy <= reach; ++dy) {
                const auto it = cells_.find({k.x + dx, k.y + dy});
                if (it == cells_.end()) continue;
                for (const Complex& w : it->second)
                    if (std::abs(w - z) <= radius) return true;
            }
        }
        return false;
    }

private:
    CellKey key(Complex z) const {
        return {static_cast<std::int64_t>(std::floor(z.real() / cell_)),
                static_cast<std::int64_t>(std::floor(z.imag() / cell_))};
    }

    double cell_;
    std::unordered_map<CellKey, std::vector<Complex>, CellHash> cells_;
};

} // namespace detail

/// Roots of |D| - t on the edges of a grid over |z| <= 1 - 1/n.
inline std::vector<Complex> seed_points(const Expr& phi, double t, int grid_density) {
    detail::require_level(t);
    if (grid_density < 2) throw Error(ErrorKind::invalid_argument, "grid_density must be >= 2");
    const int n = grid_density;
    const double R = 1.0 - 1.0 / n;
    const double h = 2.0 * R / n;
    auto node = [&](int i, int j) { return Complex(-R + i * h, -R + j * h); };
    std::vector<std::optional<double>> f((n + 1) * (n + 1));
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const Complex z = node(i, j);
            if (std::abs(z) <= R) f[i * (n + 1) + j] = detail::level_residual(phi, z, t);
        }
    }
    std::vector<Complex> seeds;
    auto edge = [&](int i0, int j0, int i1, int j1) {
        const auto fa = f[i0 * (n + 1) + j0];
        const auto fb = f[i1 * (n + 1) + j1];
        if (!fa || !fb) return;
        if (*fa == 0.0) {
            seeds.push_back(node(i0, j0));
            return;
        }
        if ((*fa < 0.0) == (*fb < 0.0) || *fb == 0.0) return;
        Complex a = node(i0, j0), b = node(i1, j1);
        double ga = *fa;
        while (std::abs(b - a) > 1e-12) {
            const Complex m = 0.5 * (a + b);
            const auto gm = detail::level_residual(phi, m, t);
            if (!gm) return;
            if ((*gm < 0.0) == (ga < 0.0)) {
                a = m;
                ga = *gm;
            } else {
                b = m;
            }
        }
        seeds.push_back(0.5 * (a + b));
    };
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            if (i < n) edge(i, j, i + 1, j);
            if (j < n) edge(i, j, i, j + 1);
        }
    }
    std::vector<Complex> unique;
    for (const Complex& s : seeds) {
        if (std::none_of(unique.begin(), unique.end(), [&](Complex u) { return std::abs(u - s) < 1e-10; }))
            unique.push_back(s);
    }
    return unique;
}

inline LevelCurve trace_level(const Expr& phi, double t, Complex seed, const LevelOptions& o = {}) {
    detail::require_level(t);
    if (!(o.step > 0.0) || !(o.level_tol > 0.0) || o.max_steps < 1) {
        throw Error(ErrorKind::invalid_argument, "invalid level tracing options");
    }
    const HypPoint p = hyp_point(phi, seed);
    if (p.phi_prime_zero()) throw Error(ErrorKind::zero_derivative, "seed is a zero of phi'");
    if (p.A.abs() < a_vanishing_threshold) throw Error(ErrorKind::zero_a, "seed is a zero of A");
    if (std::abs(p.absD - t) > o.level_tol) throw Error(ErrorKind::invalid_argument, "seed is not on the level");
    const auto start = detail::correct_onto_level(phi, seed, t, o.level_tol, o.step);
    if (!start) throw Error(ErrorKind::domain, "corrector diverged at the seed");

    int steps_left = o.max_steps;
    LevelCurve c;
    c.t = t;
    const auto fwd = detail::trace_level_half(phi, t, *start, +1.0, o, steps_left);
    if (fwd.reason == LevelEnd::loop_closed) {
        c.vertices.push_back(start->z);
        c.vertices.insert(c.vertices.end(), fwd.vertices.begin(), fwd.vertices.end());
        c.vertices.push_back(start->z);
        c.closed = true;
        c.end_reasons = {LevelEnd::loop_closed, LevelEnd::loop_closed};
        return c;
    }
    const auto bwd = detail::trace_level_half(phi, t, *start, -1.0, o, steps_left);
    c.vertices.assign(bwd.vertices.rbegin(), bwd.vertices.rend());
    c.vertices.push_back(start->z);
    c.vertices.insert(c.vertices.end(), fwd.vertices.begin(), fwd.vertices.end());
    c.end_reasons = {bwd.reason, fwd.reason};
    return c;
}

/// Distinct components of the level t. A seed is skipped when it lies within
/// one step of a vertex already traced; a traced curve is dropped when most of
/// its vertices do.
inline std::vector<LevelCurve> components(const Expr& phi, double t, int grid_density, const LevelOptions& o = {}) {
    std::vector<LevelCurve> out;
    detail::VertexHash seen(0.5 * o.step);
    for (const Complex& s : seed_points(phi, t, grid_density)) {
        if (seen.near(s, o.step)) continue;
        LevelCurve c;
        try {
            c = trace_level(phi, t, s, o);
        } catch (const Error&) {
            continue;
        }
        std::size_t shared = 0;
        for (const Complex& v : c.vertices) shared += seen.near(v, o.step) ? 1 : 0;
        if (2 * shared > c.vertices.size()) continue;
        for (const Complex& v : c.vertices) seen.insert(v);
        out.push_back(std::move(c));
    }
    return out;
}

inline constexpr const char* level_csv_header = "t,re_z,im_z";

inline void write_level_csv(std::ostream& os, const LevelCurve& c) {
    os << level_csv_header << '\n';
    for (const Complex& v : c.vertices)
        os << format_g17(c.t) << ',' << format_g17(v.real()) << ',' << format_g17(v.imag()) << '\n';
}

/// key=value sidecar describing a traced curve.
inline void write_level_sidecar(std::ostream& os, const LevelCurve& c, int component) {
    os << "t=" << format_g17(c.t) << '\n'
       << "component=" << component << '\n'
       << "vertices=" << c.vertices.size() << '\n'
       << "closed=" << (c.closed ? "true" : "false") << '\n'
       << "end_reason_start=" << to_string(c.end_reasons.first) << '\n'
       << "end_reason_end=" << to_string(c.end_reasons.second) << '\n';
}

} // namespace hypdisk
