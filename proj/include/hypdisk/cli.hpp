#pragma once

// Command implementations behind the hypdisk executable. Each command writes
// its report to `out` and returns the process exit code; errors that abort a
// whole command are thrown as hypdisk::Error.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hypdisk/crit.hpp"
#include "hypdisk/error.hpp"
#include "hypdisk/expr.hpp"
#include "hypdisk/flow.hpp"
#include "hypdisk/format.hpp"
#include "hypdisk/hypops.hpp"
#include "hypdisk/levels.hpp"
#include "hypdisk/svg.hpp"
#include "hypdisk/verify.hpp"

namespace hypdisk::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_numeric = 2;
inline constexpr int exit_verification = 3;

inline int exit_code_for(const Error& e) { return e.is_usage() ? exit_usage : exit_numeric; }

namespace detail {

inline bool parse_real(std::string_view s, double& v) {
    if (!s.empty() && s[0] == '+') s.remove_prefix(1);
    if (s.empty() || s[0] == '+') return false;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && end == s.data() + s.size() && std::isfinite(v);
}

} // namespace detail

/// Parses `a`, `bi`, `a+bi` or `a-bi` (no spaces); a bare `i` means 1.
inline Complex parse_complex(std::string_view text) {
    const auto fail = [&] { return Error(ErrorKind::parse, "bad complex number '" + std::string(text) + "', expected a+bi"); };
    if (text.empty()) throw fail();
    double re = 0.0, im = 0.0;
    if (text.back() != 'i') {
        if (!detail::parse_real(text, re)) throw fail();
        return re;
    }
    const std::string_view body = text.substr(0, text.size() - 1);
    std::size_t split = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    std::string_view imag = body;
    if (split != std::string_view::npos) {
        if (!detail::parse_real(body.substr(0, split), re)) throw fail();
        imag = body.substr(split);
    }
    if (imag.empty() || imag == "+") {
        im = 1.0;
    } else if (imag == "-") {
        im = -1.0;
    } else if (!detail::parse_real(imag, im)) {
        throw fail();
    }
    return {re, im};
}

inline std::string format_complex(Complex z) {
    const double im = z.imag() == 0.0 ? 0.0 : z.imag();
    return format_g17(z.real()) + (std::signbit(im) ? "-" : "+") + format_g17(std::abs(im)) + "i";
}

namespace detail {

inline std::string join_path(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).generic_string();
}

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create directory '" + dir + "': " + ec.message());
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
    f << bytes;
    f.close();
    if (!f) throw Error(ErrorKind::io, "write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::io, "cannot open '" + path + "'");
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

inline bool complex_less(Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}

inline std::string quoted(const std::string& s) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? '\'' : c;
    return q + "\"";
}

} // namespace detail

// ---------------------------------------------------------------------------

inline int run_eval(const Expr& phi, Complex z, std::ostream& out) {
    const HypPoint p = hyp_point(phi, z);
    out << "z = " << format_complex(z) << '\n'
        << "phi = " << format_complex(p.jet.f) << '\n'
        << "D = " << format_complex(p.D) << '\n'
        << "absD = " << format_g17(p.absD) << '\n';
    if (p.phi_prime_zero()) {
        out << "A = INF\nS = undefined\ngrad_absD = undefined\ncurvature = undefined\n";
        return exit_ok;
    }
    out << "A = " << format_complex(p.A.value) << '\n'
        << "absA = " << format_g17(std::abs(p.A.value)) << '\n'
        << "S = " << format_complex(p.S) << '\n'
        << "grad_absD = " << format_complex(p.grad) << '\n';
    if (std::abs(p.A.value) < a_vanishing_threshold) {
        out << "curvature = undefined\n";
    } else {
        out << "curvature = " << format_g17(curvature(p)) << '\n';
    }
    return exit_ok;
}

struct OutputSpec {
    std::string dir = ".";
    std::string prefix;
};

inline int run_trajectory(const Expr& phi, std::vector<Complex> starts, const TraceOptions& opts, const OutputSpec& o,
                          std::ostream& out) {
    if (starts.empty()) throw Error(ErrorKind::invalid_argument, "no start points given");
    std::stable_sort(starts.begin(), starts.end(), detail::complex_less);
    detail::ensure_dir(o.dir);
    const std::string prefix = o.prefix.empty() ? "trajectory" : o.prefix;
    int status = exit_ok;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        out << "trajectory index=" << k << " start=" << format_complex(starts[k]);
        try {
            const Trajectory tr = trace_trajectory(phi, starts[k], opts);
            const std::string file = detail::join_path(o.dir, prefix + "_" + std::to_string(k) + ".csv");
            std::ostringstream csv;
            write_trajectory_csv(csv, tr);
            detail::write_file(file, csv.str());
            const Theorem1Result th = theorem1_check(tr);
            out << " file=" << file << " t0=" << format_g17(tr.t0) << " omega_minus=" << format_g17(tr.omega_minus_est)
                << " omega_plus=" << format_g17(tr.omega_plus_est) << " end_minus=" << to_string(tr.end_reason_minus)
                << " end_plus=" << to_string(tr.end_reason_plus) << " samples=" << tr.samples.size()
                << " drift=" << format_g17(level_drift(phi, tr)) << " theorem1_lhs=" << format_g17(th.lhs)
                << " theorem1_rhs=" << format_g17(th.rhs) << " theorem1=" << (th.holds ? "holds" : "fails") << '\n';
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::io) throw;
            out << " error=" << to_string(e.kind()) << " message=" << detail::quoted(e.what()) << '\n';
            status = exit_numeric;
        }
    }
    return status;
}

inline int run_level(const Expr& phi, std::vector<double> levels, int grid_density, const LevelOptions& opts,
                     const OutputSpec& o, std::ostream& out) {
    if (levels.empty()) throw Error(ErrorKind::invalid_argument, "no levels given");
    for (double t : levels)
        if (!(t > 0.0 && t < 1.0)) throw Error(ErrorKind::invalid_argument, "levels must lie in (0, 1): " + format_g17(t));
    std::stable_sort(levels.begin(), levels.end());
    detail::ensure_dir(o.dir);
    const std::string prefix = o.prefix.empty() ? "level" : o.prefix;
    int status = exit_ok;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        out << "level index=" << i << " t=" << format_g17(levels[i]);
        try {
            const auto cs = components(phi, levels[i], grid_density, opts);
            out << " components=" << cs.size() << '\n';
            for (std::size_t k = 0; k < cs.size(); ++k) {
                const std::string stem = detail::join_path(o.dir, prefix + "_" + std::to_string(i) + "_" + std::to_string(k));
                std::ostringstream csv, meta;
                write_level_csv(csv, cs[k]);
                write_level_sidecar(meta, cs[k], static_cast<int>(k));
                detail::write_file(stem + ".csv", csv.str());
                detail::write_file(stem + ".meta", meta.str());
                out << "component level=" << i << " index=" << k << " vertices=" << cs[k].vertices.size()
                    << " closed=" << (cs[k].closed ? "true" : "false")
                    << " end_start=" << to_string(cs[k].end_reasons.first)
                    << " end_end=" << to_string(cs[k].end_reasons.second) << " file=" << stem << ".csv\n";
            }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::io) throw;
            out << " error=" << to_string(e.kind()) << " message=" << detail::quoted(e.what()) << '\n';
            status = exit_numeric;
        }
    }
    return status;
}

struct CriticalOptions {
    int grid_density = 32;
    double newton_tol = default_newton_tol;
    double class_tol = default_class_tol;
};

inline int run_critical(const Expr& phi, const CriticalOptions& c, std::ostream& out) {
    write_critical_report(out, find_critical_points(phi, c.grid_density, c.newton_tol, c.class_tol));
    return exit_ok;
}

inline std::string render_files(const std::vector<std::string>& inputs, const RenderOptions& opts) {
    if (inputs.empty()) throw Error(ErrorKind::invalid_argument, "no input files given");
    Plot plot;
    for (const std::string& path : inputs) {
        std::istringstream in(detail::read_file(path));
        read_plot_input(in, path, plot);
    }
    return render_svg(plot, opts);
}

inline int run_verify(const std::string& suite, std::ostream& out) {
    const auto checks = verify::run_suite(suite);
    return verify::print_report(out, suite, checks) ? exit_ok : exit_verification;
}

} // namespace hypdisk::cli
