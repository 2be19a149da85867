#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hypdisk/cli.hpp"

using namespace hypdisk;

namespace {

std::vector<Complex> parse_points(const std::vector<std::string>& texts) {
    std::vector<Complex> out;
    for (const auto& t : texts) out.push_back(cli::parse_complex(t));
    return out;
}

void add_function(CLI::App* cmd, std::string& fn) {
    cmd->add_option("function,--function", fn, "DSL text or builtin call such as example1(a=0.5)")->required();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hyperbolic derivative, trajectories, level sets and critical points of analytic self-maps of the disk"};
    app.config_formatter(std::make_shared<CLI::ConfigINI>());
    app.set_config("--scenario", "", "key = value file with one [command] section per command");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    // eval
    std::string eval_fn, eval_z;
    auto* eval = app.add_subcommand("eval", "Evaluate D, A, S, grad|D| and curvature at a point");
    add_function(eval, eval_fn);
    eval->add_option("z,--z", eval_z, "Point a+bi")->required();

    // trajectory
    std::string traj_fn;
    std::vector<std::string> traj_starts;
    TraceOptions traj;
    std::string traj_direction = "both";
    std::optional<double> traj_t_min, traj_t_max;
    cli::OutputSpec traj_out{".", "trajectory"};
    auto* trajectory = app.add_subcommand("trajectory", "Trace trajectories through start points");
    add_function(trajectory, traj_fn);
    trajectory->add_option("--start", traj_starts, "Start point a+bi (repeatable)")->required();
    trajectory->add_option("--direction", traj_direction, "forward, backward or both")
        ->check(CLI::IsMember({"forward", "backward", "both"}))
        ->capture_default_str();
    trajectory->add_option("--level-tol", traj.level_tol, "Projection tolerance on |D| = t")->capture_default_str();
    trajectory->add_option("--max-steps", traj.max_steps, "Accepted steps per half")->capture_default_str();
    trajectory->add_option("--boundary-margin", traj.boundary_margin, "Stop at |z| >= 1 - margin")->capture_default_str();
    trajectory->add_option("--rtol", traj.rtol, "Relative error per step")->capture_default_str();
    trajectory->add_option("--max-dt", traj.max_dt, "Largest step in t")->capture_default_str();
    trajectory->add_option("--t-min", traj_t_min, "Lower end of the requested level interval");
    trajectory->add_option("--t-max", traj_t_max, "Upper end of the requested level interval");
    trajectory->add_option("--out-dir", traj_out.dir, "Directory for CSV files")->capture_default_str();
    trajectory->add_option("--prefix", traj_out.prefix, "CSV file name prefix")->capture_default_str();

    // level
    std::string level_fn;
    std::vector<double> level_ts;
    int level_grid = 32;
    LevelOptions lev;
    cli::OutputSpec level_out{".", "level"};
    auto* level = app.add_subcommand("level", "Trace every component of the level sets |D| = t");
    add_function(level, level_fn);
    level->add_option("--level", level_ts, "Level t in (0,1) (repeatable)")->required();
    level->add_option("--grid", level_grid, "Seed grid density")->capture_default_str();
    level->add_option("--step", lev.step, "Euclidean arclength step")->capture_default_str();
    level->add_option("--level-tol", lev.level_tol, "Corrector tolerance on |D| = t")->capture_default_str();
    level->add_option("--max-steps", lev.max_steps, "Steps per direction")->capture_default_str();
    level->add_option("--boundary-margin", lev.boundary_margin, "Stop at |z| >= 1 - margin")->capture_default_str();
    level->add_option("--out-dir", level_out.dir, "Directory for CSV and sidecar files")->capture_default_str();
    level->add_option("--prefix", level_out.prefix, "File name prefix")->capture_default_str();

    // critical
    std::string crit_fn, crit_out = "-";
    cli::CriticalOptions crit;
    auto* critical = app.add_subcommand("critical", "Find and classify critical points of |D|");
    add_function(critical, crit_fn);
    critical->add_option("--grid", crit.grid_density, "Newton start grid density")->capture_default_str();
    critical->add_option("--newton-tol", crit.newton_tol, "Residual tolerance on |A|")->capture_default_str();
    critical->add_option("--class-tol", crit.class_tol, "Relative band for the degenerate case")->capture_default_str();
    critical->add_option("--out", crit_out, "Report file, - for stdout")->capture_default_str();

    // render
    std::vector<std::string> render_inputs;
    std::string render_out;
    RenderOptions ropt;
    bool no_disk = false;
    auto* render = app.add_subcommand("render", "Render trajectory, level and critical CSV files as SVG");
    render->add_option("inputs,--input", render_inputs, "CSV files")->required();
    render->add_option("--out", render_out, "SVG file, - for stdout")->required();
    render->add_option("--width", ropt.width_px, "Canvas width and height in pixels")->capture_default_str();
    render->add_flag("--no-disk", no_disk, "Omit the unit circle");
    render->add_option("--disk-color", ropt.disk_color)->capture_default_str();
    render->add_option("--level-color", ropt.level_color)->capture_default_str();
    render->add_option("--trajectory-color", ropt.trajectory_color)->capture_default_str();
    render->add_option("--critical-color", ropt.critical_color)->capture_default_str();

    // verify
    std::string suite = "all";
    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    verify->add_option("suite,--suite", suite, "all, jets, operators, flow, levels, critical or examples")
        ->check(CLI::IsMember(verify::suite_names()))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e);
        return cli::exit_usage;
    }

    try {
        if (*eval) return cli::run_eval(parse(eval_fn), cli::parse_complex(eval_z), std::cout);
        if (*trajectory) {
            const Expr phi = parse(traj_fn);
            traj.direction = parse_direction(traj_direction);
            traj.t_min = traj_t_min;
            traj.t_max = traj_t_max;
            return cli::run_trajectory(phi, parse_points(traj_starts), traj, traj_out, std::cout);
        }
        if (*level) return cli::run_level(parse(level_fn), level_ts, level_grid, lev, level_out, std::cout);
        if (*critical) {
            const Expr phi = parse(crit_fn);
            if (crit_out == "-") return cli::run_critical(phi, crit, std::cout);
            std::ostringstream report;
            const int code = cli::run_critical(phi, crit, report);
            cli::detail::write_file(crit_out, report.str());
            return code;
        }
        if (*render) {
            ropt.show_disk = !no_disk;
            const std::string svg = cli::render_files(render_inputs, ropt);
            if (render_out == "-") {
                std::cout << svg;
            } else {
                cli::detail::write_file(render_out, svg);
            }
            return cli::exit_ok;
        }
        if (*verify) return cli::run_verify(suite, std::cout);
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return cli::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::exit_numeric;
    }
    return cli::exit_usage;
}
