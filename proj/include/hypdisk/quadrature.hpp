#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <queue>
#include <vector>

#include "hypdisk/error.hpp"

namespace hypdisk {

struct QuadratureResult {
    std::complex<double> value;
    double error_estimate;
    int intervals;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr double gk_nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double gk_weights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for gk_nodes[1], [3], [5], [7].
inline constexpr double g_weights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    std::complex<double> value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const std::complex<double> fc = f(c);
    std::complex<double> kronrod = gk_weights[7] * fc;
    std::complex<double> gauss = g_weights[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * gk_nodes[j];
        const std::complex<double> s = f(c - dx) + f(c + dx);
        kronrod += gk_weights[j] * s;
        if (j % 2 == 1) gauss += g_weights[j / 2] * s;
    }
    return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of a complex-valued
/// function of one real variable over [a, b]. Panels with the largest error
/// estimate are bisected until the summed estimate meets
/// max(abs_tol, rel_tol * |I|).
template <class F>
QuadratureResult integrate_gk(F&& f, double a, double b, double abs_tol = 1e-15,
                              double rel_tol = 1e-14, int max_intervals = 500) {
    std::priority_queue<detail::Panel> panels;
    panels.push(detail::gk15(f, a, b));
    std::complex<double> total = panels.top().value;
    double error = panels.top().error;
    while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (static_cast<int>(panels.size()) >= max_intervals) {
            throw Error(ErrorKind::quadrature, "adaptive quadrature did not converge");
        }
        const detail::Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const detail::Panel left = detail::gk15(f, worst.a, mid);
        const detail::Panel right = detail::gk15(f, mid, worst.b);
        panels.push(left);
        panels.push(right);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        if (error < 0.0) error = 0.0;
    }
    // Re-sum to shed the drift accumulated by the running updates.
    std::complex<double> sum = 0.0;
    double err = 0.0;
    const int n = static_cast<int>(panels.size());
    while (!panels.empty()) {
        sum += panels.top().value;
        err += panels.top().error;
        panels.pop();
    }
    return {sum, err, n};
}

/// Complete elliptic integral of the first kind K(k) (modulus convention,
/// K(k) = int_0^{pi/2} (1 - k^2 sin^2 t)^{-1/2} dt) by the arithmetic-geometric
/// mean: K(k) = pi / (2 AGM(1, sqrt(1 - k^2))).
inline double elliptic_k(double k) {
    if (!(std::abs(k) < 1.0)) {
        throw Error(ErrorKind::invalid_argument, "elliptic_k requires |k| < 1");
    }
    double a = 1.0;
    double b = std::sqrt((1.0 - k) * (1.0 + k));
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-15 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return std::numbers::pi / (a + b);
}

} // namespace hypdisk
