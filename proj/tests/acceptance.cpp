// Acceptance criteria AC1-AC10: one PASS/FAIL line per criterion.
// Usage: acceptance [path-to-hypdisk-executable]
// With the executable, AC10 also compares the bytes of two CLI runs.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "hypdisk/cli.hpp"
#include "hypdisk/verify.hpp"

using namespace hypdisk;
namespace fs = std::filesystem;

namespace {

// Ratio of measured value to bound, oriented so that larger is closer to failing.
double tightness(const verify::Check& c) {
    switch (c.cmp) {
    case verify::Compare::below: return c.bound > 0 ? c.measured / c.bound : 0.0;
    case verify::Compare::at_least: return c.measured > 0 ? c.bound / c.measured : 1e300;
    case verify::Compare::equal: return c.pass ? 0.0 : 1e300;
    }
    return 0.0;
}

bool report(const std::string& id, const std::string& title, const verify::Checks& checks) {
    int passed = 0;
    const verify::Check* failure = nullptr;
    const verify::Check* tightest = nullptr;
    for (const auto& c : checks) {
        passed += c.pass ? 1 : 0;
        if (!c.pass && !failure) failure = &c;
        if (c.pass && (!tightest || tightness(c) > tightness(*tightest))) tightest = &c;
    }
    const verify::Check* shown = failure ? failure : tightest;
    const bool ok = !checks.empty() && passed == static_cast<int>(checks.size());
    std::cout << id << ' ' << (ok ? "PASS" : "FAIL") << ' ' << title << " (" << passed << '/' << checks.size()
              << " checks";
    if (shown) std::cout << "; " << (shown->pass ? "tightest " : "first failure ") << verify::format_check(*shown).substr(5);
    std::cout << ")\n";
    return ok;
}

verify::Checks join(std::initializer_list<verify::Checks> parts) {
    verify::Checks out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string verify_all_text() {
    std::ostringstream os;
    verify::print_report(os, "all", verify::run_suite("all"));
    return os.str();
}

verify::Checks determinism(const char* cli_path) {
    verify::Checks out;
    out.push_back(verify::equal("determinism.verify_all_in_process", verify_all_text() == verify_all_text(), 1));

    const fs::path dir = fs::temp_directory_path() / "hypdisk_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const Expr e4 = builtins::example4(0.6);
    const Expr e2 = builtins::example2(0.5);
    std::vector<std::string> inputs;
    auto save = [&](const std::string& name, const std::function<void(std::ostream&)>& w) {
        std::ofstream f(dir / name, std::ios::binary);
        w(f);
        inputs.push_back((dir / name).string());
    };
    save("l4.csv", [&](std::ostream& os) { write_level_csv(os, trace_level(e4, 0.8, 0.5)); });
    save("t4.csv", [&](std::ostream& os) { write_trajectory_csv(os, trace_trajectory(e4, 0.2)); });
    const auto arcs = components(e2, 0.25, 32);
    for (std::size_t k = 0; k < arcs.size(); ++k)
        save("l2_" + std::to_string(k) + ".csv", [&](std::ostream& os) { write_level_csv(os, arcs[k]); });
    save("c3.csv", [&](std::ostream& os) { write_critical_report(os, find_critical_points(builtins::example3(std::numbers::pi / 4), 16)); });
    out.push_back(verify::equal("determinism.render_in_process",
                                cli::render_files(inputs, {}) == cli::render_files(inputs, {}), 1));

    if (cli_path) {
        std::string files;
        for (const auto& i : inputs) files += " \"" + i + "\"";
        const std::string exe = std::string("\"") + cli_path + "\"";
        auto sh = [](const std::string& cmd) { return std::system(cmd.c_str()) == 0; };
        bool ran = true;
        for (int k : {1, 2}) {
            const std::string n = std::to_string(k);
            ran = sh(exe + " verify all > \"" + (dir / ("verify" + n + ".txt")).string() + "\"") && ran;
            ran = sh(exe + " render" + files + " --out \"" + (dir / ("plot" + n + ".svg")).string() + "\"") && ran;
        }
        out.push_back(verify::equal("determinism.cli_runs_succeed", ran, 1));
        const std::string v1 = slurp(dir / "verify1.txt"), s1 = slurp(dir / "plot1.svg");
        out.push_back(verify::equal("determinism.cli_verify_all_bytes", !v1.empty() && v1 == slurp(dir / "verify2.txt"), 1));
        out.push_back(verify::equal("determinism.cli_render_bytes", !s1.empty() && s1 == slurp(dir / "plot2.svg"), 1));
        out.push_back(verify::equal("determinism.cli_matches_in_process", v1 == verify_all_text(), 1));
    }
    fs::remove_all(dir);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    using namespace verify;
    bool ok = true;
    const auto run = [&](const char* id, const char* title, const std::function<Checks()>& f) {
        try {
            ok = report(id, title, f()) && ok;
        } catch (const std::exception& e) {
            std::cout << id << " FAIL " << title << " (exception: " << e.what() << ")\n";
            ok = false;
        }
    };
    run("AC1", "example4 closed forms for |D| and A", example4_closed_form_checks);
    run("AC2", "example4 radial trajectory and zero curvature", example4_trajectory_checks);
    run("AC3", "example2 degeneracy on the real axis and off-axis |D|", example2_degeneracy_checks);
    run("AC4", "example3 saddle at the origin with four branches", example3_saddle_checks);
    run("AC5", "example1 has no critical points; axis and fan trajectories",
        [] { return join({example1_no_critical_checks(), example1_flow_checks()}); });
    run("AC6", "operator identities against finite differences", operator_oracle_checks);
    run("AC7", "Mobius invariance and vanishing A for automorphisms", invariance_checks);
    run("AC8", "trajectory inequality and decay of min |A|", trajectory_bound_checks);
    run("AC9", "local expansion error order", expansion_order_checks);
    run("AC10", "byte-identical verification and render output",
        [&] { return determinism(argc > 1 ? argv[1] : nullptr); });
    return ok ? 0 : 1;
}
