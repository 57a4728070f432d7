// Command line front end: solve, table, kernel, bound, compare, list-presets.
//
// Exit status: 0 on success, 2 on invalid input, 1 on numerical failure.

#include "tbc/harness/config.hpp"
#include "tbc/harness/experiments.hpp"
#include "tbc/harness/presets.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

namespace fs = std::filesystem;
using namespace tbc;
using namespace tbc::harness;

namespace {

struct Options {
    std::string config;
    std::string preset;
    std::string out;
    std::size_t threads = 1;
    std::string snapshots;
    std::string axis = "J";
    std::string boundary_a = "dtbc";
    std::string boundary_b = "sdtbc";
};

Preset require_preset(const std::string& name, const std::string& kind)
{
    auto p = find_preset(name);
    if (!p) throw ValidationError("unknown preset '" + name + "' (see list-presets)");
    if (p->kind() != kind) {
        throw ValidationError("preset '" + name + "' is a " + p->kind() + " preset, not " + kind);
    }
    return *p;
}

/// Base configuration from --config, else defaults; --snapshots overrides.
RunConfig base_config(const Options& o)
{
    RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (!o.snapshots.empty()) {
        auto levels = parse_levels(o.snapshots);
        if (!levels) throw ValidationError("--snapshots: expected comma separated levels, got '" + o.snapshots + "'");
        cfg.snapshots = *levels;
    }
    return cfg;
}

void reject_both(const Options& o)
{
    if (!o.config.empty() && !o.preset.empty()) throw ValidationError("--config and --preset are mutually exclusive");
}

fs::path output_dir(const Options& o, const RunConfig& cfg)
{
    fs::path dir = o.out.empty() ? fs::path(cfg.output_dir) : fs::path(o.out);
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write '" + path.string() + "'");
    return f;
}

BoundaryPreset parse_boundary(const std::string& s)
{
    for (auto p : {BoundaryPreset::DTBC, BoundaryPreset::SDTBC, BoundaryPreset::ISDTBC}) {
        if (to_string(p) == s) return p;
    }
    throw ValidationError("unknown boundary '" + s + "': expected dtbc, sdtbc or isdtbc");
}

int cmd_solve(const Options& o)
{
    reject_both(o);
    RunConfig cfg = o.preset.empty() ? base_config(o) : std::get<RunConfig>(require_preset(o.preset, "solve").payload);
    if (!o.preset.empty() && !o.snapshots.empty()) cfg.snapshots = base_config(o).snapshots;
    const auto dir = output_dir(o, cfg);
    const auto res = run_solve(cfg);
    {
        auto f = open_out(dir / "trajectory.csv");
        write_trajectory_csv(f, res.trajectory);
    }
    {
        auto f = open_out(dir / "errors.csv");
        write_error_series_csv(f, res.errors);
    }
    {
        auto f = open_out(dir / "error_summary.csv");
        write_error_summary_csv(f, cfg, res.errors);
    }
    const auto mesh = cfg.scheme().mesh;
    for (const auto& [m, field] : res.trajectory.snapshots) {
        auto f = open_out(dir / ("snapshot_m" + std::to_string(m) + ".csv"));
        write_snapshot_csv(f, mesh, field);
    }
    {
        auto f = open_out(dir / "config.ini");
        f << serialize_config(cfg);
    }
    std::cout << "E_L2 = " << format_sig3(res.errors.l2) << "  E_C = " << format_sig3(res.errors.c)
              << "  E_L2rel = " << format_sig3(res.errors.l2_rel) << "  E_Crel = " << format_sig3(res.errors.c_rel)
              << "\n";
    std::cerr << "solve J=" << cfg.J << " M=" << cfg.M << " wall " << std::fixed << std::setprecision(3)
              << res.wall_seconds << " s\n";
    return 0;
}

int cmd_table(const Options& o)
{
    reject_both(o);
    std::vector<TableSpec> specs;
    RunConfig cfg;
    if (!o.preset.empty()) {
        specs = std::get<std::vector<TableSpec>>(require_preset(o.preset, "table").payload);
    } else {
        cfg = base_config(o);
        TableSpec t = o.axis == "M" ? table2_spec() : table1_spec();
        if (o.axis != "J" && o.axis != "M") throw ValidationError("--axis: expected J or M, got '" + o.axis + "'");
        t.name = "table";
        t.theta = cfg.theta;
        t.fixed = o.axis == "M" ? cfg.J : cfg.M;
        t.base = cfg;
        specs.push_back(t);
    }
    const auto dir = output_dir(o, cfg);
    auto csv = open_out(dir / "table.csv");
    auto txt = open_out(dir / "table.txt");
    bool header = true;
    for (const auto& spec : specs) {
        const auto res = run_table(spec, o.threads, &std::cerr);
        write_table_csv(csv, res, header);
        header = false;
        write_table_text(txt, res);
        write_table_text(std::cout, res);
    }
    return 0;
}

int cmd_kernel(const Options& o)
{
    reject_both(o);
    KernelSpec spec;
    RunConfig cfg;
    if (!o.preset.empty()) {
        spec = std::get<KernelSpec>(require_preset(o.preset, "kernel").payload);
    } else {
        cfg = base_config(o);
        spec = {cfg.theta, cfg.J, cfg.M, cfg};
    }
    const auto dir = output_dir(o, cfg);
    const auto dump = run_kernel(spec);
    auto f = open_out(dir / "kernel.csv");
    write_kernel_dump_csv(f, spec, dump);
    std::cout << "|c0| theta=" << spec.theta << ": " << format_sig3(std::abs(dump.requested.c0()))
              << "  theta=1/4: " << format_sig3(std::abs(dump.quarter.c0()))
              << "  max gap of |c0 R^m|: " << format_sig3(dump.max_gap) << "\n";
    return 0;
}

int cmd_bound(const Options& o)
{
    reject_both(o);
    BoundSpec spec;
    RunConfig cfg;
    if (!o.preset.empty()) {
        spec = std::get<BoundSpec>(require_preset(o.preset, "bound").payload);
    } else {
        cfg = base_config(o);
        spec.base = cfg;
    }
    const auto dir = output_dir(o, cfg);
    const auto cases = run_bound(spec, o.threads);
    {
        auto f = open_out(dir / "bound_summary.csv");
        write_bound_summary_csv(f, cases);
    }
    {
        auto f = open_out(dir / "bound_detail.csv");
        write_bound_detail_csv(f, cases);
    }
    std::size_t failed = 0;
    for (const auto& c : cases) failed += c.pass ? 0 : 1;
    std::cout << cases.size() << " cases, " << failed << " exceed the bound\n";
    return 0;
}

int cmd_compare(const Options& o)
{
    reject_both(o);
    CompareSpec spec;
    if (!o.preset.empty()) {
        spec = std::get<CompareSpec>(require_preset(o.preset, "compare").payload);
    } else {
        const RunConfig cfg = base_config(o);
        spec.a = spec.b = cfg;
        spec.a.boundary = resolve(parse_boundary(o.boundary_a), cfg.theta);
        spec.b.boundary = resolve(parse_boundary(o.boundary_b), cfg.theta);
    }
    const auto dir = output_dir(o, spec.a);
    auto Ms = spec.Ms.empty() ? std::vector<std::size_t>{spec.a.M} : spec.Ms;
    auto summary = open_out(dir / "compare_summary.csv");
    summary << "J,M,max_diff_l2,max_diff_c\n";
    for (auto M : Ms) {
        RunConfig a = spec.a;
        RunConfig b = spec.b;
        a.M = b.M = M;
        const auto start = std::chrono::steady_clock::now();
        const auto r = run_compare(a, b);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        auto f = open_out(dir / ("compare_M" + std::to_string(M) + ".csv"));
        write_compare_csv(f, r);
        write_csv_row(summary, a.J, M, r.max_l2, r.max_c);
        std::cout << "M=" << M << "  max L2 diff = " << format_sig3(r.max_l2)
                  << "  max C diff = " << format_sig3(r.max_c) << "\n";
        std::cerr << "compare J=" << a.J << " M=" << M << " wall " << std::fixed << std::setprecision(3) << secs
                  << " s\n"
                  << std::defaultfloat;
    }
    return 0;
}

int cmd_list()
{
    for (const auto& p : preset_registry()) {
        std::cout << std::left << std::setw(24) << p.name << std::setw(9) << p.kind() << p.description << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Crank-Nicolson solver with discrete transparent boundary conditions"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "configuration file");
        sub->add_option("--preset", o.preset, "named experiment (see list-presets)");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--threads", o.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
        sub->add_option("--snapshots", o.snapshots, "levels whose full field is written, e.g. 0,3000,6000");
    };
    auto* solve = app.add_subcommand("solve", "run one configuration and write trajectory and error CSVs");
    auto* table = app.add_subcommand("table", "error and ratio tables over a J or M sweep");
    auto* kernel = app.add_subcommand("kernel", "dump |c0 R^m| for theta and for 1/4");
    auto* bound = app.add_subcommand("bound", "check kernel differences against their bound");
    auto* compare = app.add_subcommand("compare", "difference between two boundary closures");
    auto* list = app.add_subcommand("list-presets", "list named experiments");
    for (auto* s : {solve, table, kernel, bound, compare}) add_common(s);
    table->add_option("--axis", o.axis, "sweep axis for --config runs: J or M (the other one comes from the config)");
    compare->add_option("--a", o.boundary_a, "first boundary: dtbc, sdtbc or isdtbc");
    compare->add_option("--b", o.boundary_b, "second boundary: dtbc, sdtbc or isdtbc");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto start = std::chrono::steady_clock::now();
    int rc = 0;
    try {
        if (*solve) rc = cmd_solve(o);
        else if (*table) rc = cmd_table(o);
        else if (*kernel) rc = cmd_kernel(o);
        else if (*bound) rc = cmd_bound(o);
        else if (*compare) rc = cmd_compare(o);
        else if (*list) rc = cmd_list();
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "total wall time " << std::fixed << std::setprecision(3) << secs << " s\n";
    return rc;
}
