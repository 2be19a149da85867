#pragma once

// SVG 1.1 disk plots built from the CSV outputs of the trajectory, level and
// critical commands. The viewBox is [-1,1]^2 with the imaginary axis pointing
// up; all numbers are printed in fixed notation so equal input gives equal bytes.

#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hypdisk/error.hpp"
#include "hypdisk/format.hpp"
#include "hypdisk/jet.hpp"

namespace hypdisk {

enum class PlotInputKind { trajectory, level, critical };

inline const char* to_string(PlotInputKind k) {
    switch (k) {
    case PlotInputKind::trajectory: return "trajectory";
    case PlotInputKind::level: return "level";
    case PlotInputKind::critical: return "critical";
    }
    return "unknown";
}

struct PlotCurve {
    std::vector<Complex> points;
    bool closed = false;
};

struct PlotMarker {
    Complex z;
    std::string kind;
    std::string classification;
};

struct Plot {
    std::vector<PlotCurve> levels;
    std::vector<PlotCurve> trajectories;
    std::vector<PlotMarker> markers;
};

struct RenderOptions {
    int width_px = 800;
    bool show_disk = true;
    std::string disk_color = "#444444";
    std::string level_color = "#1f77b4";
    std::string trajectory_color = "#d62728";
    std::string critical_color = "#000000";
};

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) return out;
        start = comma + 1;
    }
}

inline double parse_field(std::string_view f, const std::string& where) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || end != f.data() + f.size() || f.empty()) {
        throw Error(ErrorKind::parse, where + ": bad number '" + std::string(f) + "'");
    }
    return v;
}

inline Complex parse_point(std::string_view re, std::string_view im, const std::string& where) {
    const Complex z(parse_field(re, where), parse_field(im, where));
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw Error(ErrorKind::parse, where + ": non-finite coordinate");
    }
    return z;
}

inline void check_color(const std::string& c) {
    bool ok = !c.empty();
    if (ok && c[0] == '#') {
        ok = c.size() == 4 || c.size() == 7;
        for (std::size_t i = 1; ok && i < c.size(); ++i) ok = std::isxdigit(static_cast<unsigned char>(c[i])) != 0;
    } else {
        for (char ch : c) ok = ok && ch >= 'a' && ch <= 'z';
    }
    if (!ok) throw Error(ErrorKind::invalid_argument, "colour must be #rgb, #rrggbb or a lowercase name: " + c);
}

inline std::string coord(double v) { return format_fixed(v, 6); }

inline std::string xy(Complex z, char sep) { return coord(z.real()) + sep + coord(-z.imag()); }

} // namespace detail

/// Reads one CSV file into the plot. The header decides the kind.
inline PlotInputKind read_plot_input(std::istream& in, const std::string& name, Plot& plot) {
    std::string header;
    if (!std::getline(in, header)) throw Error(ErrorKind::parse, name + ": empty file");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    PlotInputKind kind;
    std::size_t columns;
    if (header == "t,re_z,im_z,absD,absA,kappa") {
        kind = PlotInputKind::trajectory;
        columns = 6;
    } else if (header == "t,re_z,im_z") {
        kind = PlotInputKind::level;
        columns = 3;
    } else if (header == "kind,re_z,im_z,lhs,rhs,classification,branch_angles") {
        kind = PlotInputKind::critical;
        columns = 7;
    } else {
        throw Error(ErrorKind::parse, name + ": unrecognised header '" + header + "'");
    }
    PlotCurve curve;
    std::string line;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = name + ":" + std::to_string(row);
        const auto f = detail::split_csv(line);
        if (f.size() != columns) throw Error(ErrorKind::parse, where + ": expected " + std::to_string(columns) + " fields");
        const Complex z = detail::parse_point(f[1], f[2], where);
        if (kind == PlotInputKind::critical) {
            plot.markers.push_back({z, std::string(f[0]), std::string(f[5])});
        } else {
            curve.points.push_back(z);
        }
    }
    if (kind == PlotInputKind::critical) return kind;
    if (curve.points.empty()) throw Error(ErrorKind::parse, name + ": no data rows");
    if (kind == PlotInputKind::level) {
        // A closed level curve repeats its first vertex at the end.
        curve.closed = curve.points.size() > 2 && curve.points.front() == curve.points.back();
        if (curve.closed) curve.points.pop_back();
        plot.levels.push_back(std::move(curve));
    } else {
        plot.trajectories.push_back(std::move(curve));
    }
    return kind;
}

inline std::string render_svg(const Plot& plot, const RenderOptions& o = {}) {
    if (o.width_px < 16 || o.width_px > 20000) throw Error(ErrorKind::invalid_argument, "width_px must be in [16, 20000]");
    for (const std::string* c : {&o.disk_color, &o.level_color, &o.trajectory_color, &o.critical_color}) detail::check_color(*c);
    const double px = 2.0 / o.width_px;
    const std::string w = std::to_string(o.width_px);
    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w << "\" height=\"" << w
      << "\" viewBox=\"-1 -1 2 2\" overflow=\"visible\">\n";
    if (o.show_disk) {
        s << "<circle class=\"disk\" cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"" << o.disk_color
          << "\" stroke-width=\"" << detail::coord(1.5 * px) << "\"/>\n";
    }
    s << "<g class=\"levels\" fill=\"none\" stroke=\"" << o.level_color << "\" stroke-width=\""
      << detail::coord(1.5 * px) << "\">\n";
    for (const PlotCurve& c : plot.levels) {
        s << "<path d=\"M" << detail::xy(c.points[0], ' ');
        for (std::size_t i = 1; i < c.points.size(); ++i) s << " L" << detail::xy(c.points[i], ' ');
        s << (c.closed ? " Z" : "") << "\"/>\n";
    }
    s << "</g>\n<g class=\"trajectories\" fill=\"none\" stroke=\"" << o.trajectory_color << "\" stroke-width=\""
      << detail::coord(1.5 * px) << "\">\n";
    for (const PlotCurve& c : plot.trajectories) {
        s << "<polyline points=\"";
        for (std::size_t i = 0; i < c.points.size(); ++i) s << (i ? " " : "") << detail::xy(c.points[i], ',');
        s << "\"/>\n";
    }
    s << "</g>\n<g class=\"critical\" fill=\"" << o.critical_color << "\" stroke=\"none\">\n";
    for (const PlotMarker& m : plot.markers) {
        // Hollow markers for zeros of phi', filled ones for zeros of A.
        const bool hollow = m.kind == "phi_prime_zero";
        s << "<circle class=\"" << (hollow ? "phi_prime_zero" : "A_zero") << "\" cx=\"" << detail::coord(m.z.real())
          << "\" cy=\"" << detail::coord(-m.z.imag()) << "\" r=\"" << detail::coord(4.0 * px) << "\"";
        if (hollow) s << " fill=\"none\" stroke=\"" << o.critical_color << "\" stroke-width=\"" << detail::coord(px) << "\"";
        std::string title = m.classification;
        for (char ch : title)
            if (!(std::isalpha(static_cast<unsigned char>(ch)) || ch == '_')) title.clear();
        s << "><title>" << (title.empty() ? "critical" : title) << "</title></circle>\n";
    }
    s << "</g>\n</svg>\n";
    return s.str();
}

} // namespace hypdisk
