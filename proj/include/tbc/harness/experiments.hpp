#pragma once

// Experiment drivers behind the CLI subcommands. Each returns in-memory
// results and has a matching writer producing plot-ready CSV.

#include "tbc/analytic.hpp"
#include "tbc/csv.hpp"
#include "tbc/harness/config.hpp"
#include "tbc/kernels.hpp"
#include "tbc/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <exception>
#include <functional>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace tbc::harness {

/// Runs body(i) for i in [0, n) on up to `threads` workers. The first
/// exception thrown by any body is rethrown after all workers finish.
inline void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body)
{
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// solve

struct SolveRun {
    Trajectory trajectory;
    ErrorReport errors;
    double wall_seconds = 0.0;
};

inline SolveRun run_solve(const RunConfig& cfg)
{
    const auto scheme = cfg.scheme();
    ErrorAccumulator acc(scheme.mesh, scheme.grid, cfg.packet);
    RunOptions opts;
    opts.snapshot_levels = cfg.snapshots;
    opts.observer = acc.observer();
    const auto start = std::chrono::steady_clock::now();
    auto traj = run(scheme, sample_gaussian(scheme.mesh, 0.0, cfg.packet), opts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(traj), acc.report(), secs};
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj)
{
    out << "m,t,l2_norm,c_norm,re_psi_J,im_psi_J\n";
    for (std::size_t m = 0; m < traj.level_count(); ++m) {
        write_csv_row(out, m, traj.times[m], traj.l2[m], traj.c[m], traj.boundary[m].real(), traj.boundary[m].imag());
    }
}

inline void write_snapshot_csv(std::ostream& out, const SpaceMesh& mesh, const WaveField& w)
{
    out << "j,x,re_psi,im_psi\n";
    for (std::size_t j = 0; j < w.size(); ++j) write_csv_row(out, j, mesh.node(j), w[j].real(), w[j].imag());
}

inline void write_error_series_csv(std::ostream& out, const ErrorReport& r)
{
    out << "m,t,err_l2,err_c,rel_l2,rel_c\n";
    for (const auto& e : r.series) write_csv_row(out, e.level, e.time, e.l2, e.c, e.l2_rel, e.c_rel);
}

inline void write_error_summary_csv(std::ostream& out, const RunConfig& cfg, const ErrorReport& r)
{
    out << "boundary,theta,J,M,e_l2,e_c,e_l2_rel,e_c_rel\n";
    const auto p = match_preset(cfg.boundary, cfg.theta);
    write_csv_row(out, p ? to_string(*p) : std::string("custom"), cfg.theta, cfg.J, cfg.M, r.l2, r.c, r.l2_rel,
                  r.c_rel);
}

// ---------------------------------------------------------------------------
// table

enum class SweepAxis { J, M };

struct TableSpec {
    std::string name;
    SweepAxis axis = SweepAxis::J;
    std::vector<std::size_t> values;
    std::size_t fixed = 6000;
    double theta = 1.0 / 12.0;
    std::vector<BoundaryPreset> boundaries{BoundaryPreset::DTBC, BoundaryPreset::SDTBC, BoundaryPreset::ISDTBC};
    RunConfig base; // physics and packet; theta/J/M/boundary are overridden

    RunConfig config_for(BoundaryPreset b, std::size_t value) const
    {
        RunConfig cfg = base;
        cfg.theta = theta;
        cfg.boundary = resolve(b, theta);
        cfg.J = axis == SweepAxis::J ? value : fixed;
        cfg.M = axis == SweepAxis::M ? value : fixed;
        cfg.snapshots.clear();
        return cfg;
    }

    void validate() const
    {
        tbc::detail::require(!values.empty(), "TableSpec: no sweep values");
        tbc::detail::require(theta <= 0.25, "TableSpec: theta must not exceed 1/4");
        tbc::detail::require(!boundaries.empty(), "TableSpec: no boundary presets");
    }
};

struct SubTable {
    BoundaryPreset boundary;
    std::vector<std::size_t> values;
    std::vector<ErrorReport> reports;
    std::vector<RatioRow> ratios;
    std::vector<double> wall_seconds;
};

struct TableResult {
    TableSpec spec;
    std::vector<SubTable> tables;
};

inline TableResult run_table(const TableSpec& spec, std::size_t threads = 1, std::ostream* log = nullptr)
{
    spec.validate();
    TableResult result{spec, {}};
    const std::size_t nv = spec.values.size();
    const std::size_t nb = spec.boundaries.size();
    std::vector<SolveRun> runs(nb * nv);
    std::mutex log_mutex;
    parallel_for(nb * nv, threads, [&](std::size_t i) {
        const auto b = spec.boundaries[i / nv];
        const auto v = spec.values[i % nv];
        auto cfg = spec.config_for(b, v);
        auto r = run_solve(cfg);
        r.trajectory = {};
        r.errors.series.clear();
        if (log) {
            std::lock_guard lock(log_mutex);
            *log << "[" << spec.name << "] " << to_string(b) << " J=" << cfg.J << " M=" << cfg.M << " done in "
                 << std::fixed << std::setprecision(2) << r.wall_seconds << " s\n"
                 << std::defaultfloat;
        }
        runs[i] = std::move(r);
    });
    for (std::size_t bi = 0; bi < nb; ++bi) {
        SubTable sub{spec.boundaries[bi], spec.values, {}, {}, {}};
        for (std::size_t vi = 0; vi < nv; ++vi) {
            sub.reports.push_back(runs[bi * nv + vi].errors);
            sub.wall_seconds.push_back(runs[bi * nv + vi].wall_seconds);
        }
        sub.ratios = convergence_ratios(sub.reports);
        result.tables.push_back(std::move(sub));
    }
    return result;
}

inline std::string axis_name(SweepAxis a) { return a == SweepAxis::J ? "J" : "M"; }

inline void write_table_csv(std::ostream& out, const TableResult& res, bool header = true)
{
    if (header) out << "table,boundary,theta,J,M,e_l2,r_l2,e_c,r_c,e_l2_rel,r_l2_rel,e_c_rel,r_c_rel\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& sub : res.tables) {
        for (std::size_t i = 0; i < sub.values.size(); ++i) {
            const auto cfg = res.spec.config_for(sub.boundary, sub.values[i]);
            const auto& r = sub.reports[i];
            const auto& q = sub.ratios[i];
            write_csv_row(out, res.spec.name, to_string(sub.boundary), res.spec.theta, cfg.J, cfg.M, r.l2,
                          opt(q.l2), r.c, opt(q.c), r.l2_rel, opt(q.l2_rel), r.c_rel, opt(q.c_rel));
        }
    }
}

/// Aligned text with three significant digits; absent ratios print as "--".
inline void write_table_text(std::ostream& out, const TableResult& res)
{
    auto ratio = [](const std::optional<double>& v) {
        if (!v) return std::string("--");
        std::ostringstream s;
        s << std::fixed << std::setprecision(2) << *v;
        return s.str();
    };
    for (const auto& sub : res.tables) {
        out << res.spec.name << " / " << to_string(sub.boundary) << " (theta = " << res.spec.theta << ", "
            << (res.spec.axis == SweepAxis::J ? "M" : "J") << " = " << res.spec.fixed << ")\n";
        out << std::setw(6) << axis_name(res.spec.axis);
        for (const char* h : {"E_L2", "R_L2", "E_C", "R_C", "E_L2rel", "R_L2rel", "E_Crel", "R_Crel"})
            out << std::setw(11) << h;
        out << "\n";
        for (std::size_t i = 0; i < sub.values.size(); ++i) {
            const auto& r = sub.reports[i];
            const auto& q = sub.ratios[i];
            out << std::setw(6) << sub.values[i] << std::setw(11) << format_sig3(r.l2) << std::setw(11)
                << ratio(q.l2) << std::setw(11) << format_sig3(r.c) << std::setw(11) << ratio(q.c) << std::setw(11)
                << format_sig3(r.l2_rel) << std::setw(11) << ratio(q.l2_rel) << std::setw(11)
                << format_sig3(r.c_rel) << std::setw(11) << ratio(q.c_rel) << "\n";
        }
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// kernel

struct KernelSpec {
    double theta = 1.0 / 12.0;
    std::size_t J = 800;
    std::size_t M = 3000;
    RunConfig base;
};

struct KernelDump {
    KernelTable requested;
    KernelTable quarter;
    double max_gap = 0.0; // max_m | |c0 R^m|_theta - |c0 R^m|_{1/4} |
};

inline KernelDump run_kernel(const KernelSpec& spec)
{
    RunConfig cfg = spec.base;
    cfg.J = spec.J;
    cfg.M = spec.M;
    const auto tail = TailConstants{cfg.hbar, cfg.rho, cfg.B, cfg.V};
    KernelDump d{KernelTable(dtbc_parameters(spec.theta, cfg.h(), cfg.tau(), tail), spec.M),
                 KernelTable(dtbc_parameters(0.25, cfg.h(), cfg.tau(), tail), spec.M), 0.0};
    for (std::size_t m = 0; m <= spec.M; ++m) {
        const double a = std::abs(d.requested.c0() * d.requested[m]);
        const double b = std::abs(d.quarter.c0() * d.quarter[m]);
        d.max_gap = std::max(d.max_gap, std::abs(a - b));
    }
    return d;
}

inline void write_kernel_dump_csv(std::ostream& out, const KernelSpec& spec, const KernelDump& d)
{
    write_kernel_csv(out, spec.theta, d.requested, true);
    write_kernel_csv(out, 0.25, d.quarter, false);
}

// ---------------------------------------------------------------------------
// bound

struct BoundSpec {
    std::vector<double> thetas{0.0, 1.0 / 12.0, 1.0 / 6.0, 0.25};
    std::vector<std::size_t> Js{200, 400, 800, 1600, 3200};
    std::vector<std::size_t> Ms{375, 750, 1500, 3000, 6000};
    std::size_t m_max = 10000;
    std::size_t m_rows = 250; // per-m rows written to the detail CSV
    RunConfig base;
};

struct BoundCase {
    double theta = 0.0;
    std::size_t J = 0;
    std::size_t M = 0;
    double h = 0.0;
    double tau = 0.0;
    double cond2 = 0.0;
    double sup_measured = 0.0;
    double max_ratio = 0.0; // max_m measured / bound (0/0 counts as 0)
    bool pass = true;
    std::optional<double> halving_ratio; // sup(h) / sup(h/2) against the next J in the sweep
    std::vector<double> measured;        // m = 0..m_rows
    std::vector<double> bounds;
};

/// |c0_theta R^m_theta - c0_D R^m_D| against its bound for every (theta, J, M).
inline std::vector<BoundCase> run_bound(const BoundSpec& spec, std::size_t threads = 1)
{
    for (double th : spec.thetas) tbc::detail::require(th <= 0.25, "bound: theta must not exceed 1/4");
    const auto tail = TailConstants{spec.base.hbar, spec.base.rho, spec.base.B, spec.base.V};
    const std::size_t nj = spec.Js.size();
    const std::size_t nm = spec.Ms.size();
    std::vector<BoundCase> cases(spec.thetas.size() * nm * nj);
    std::vector<KernelTable> semi;
    for (auto M : spec.Ms) semi.emplace_back(sdtbc_parameters(spec.base.T / static_cast<double>(M), tail), spec.m_max);

    parallel_for(cases.size(), threads, [&](std::size_t i) {
        const double theta = spec.thetas[i / (nm * nj)];
        const std::size_t mi = (i / nj) % nm;
        const std::size_t J = spec.Js[i % nj];
        BoundCase c;
        c.theta = theta;
        c.J = J;
        c.M = spec.Ms[mi];
        c.h = spec.base.X / static_cast<double>(J);
        c.tau = spec.base.T / static_cast<double>(c.M);
        c.cond2 = admissibility(theta, c.h, c.tau, tail, 1.0).cond2;
        const KernelTable disc(dtbc_parameters(theta, c.h, c.tau, tail), spec.m_max);
        const auto& sd = semi[mi];
        for (std::size_t m = 0; m <= spec.m_max; ++m) {
            const double d = std::abs(disc.c0() * disc[m] - sd.c0() * sd[m]);
            const double b = divergence_bound(theta, c.h, c.tau, tail, m);
            c.sup_measured = std::max(c.sup_measured, d);
            if (d > b) c.pass = false;
            if (b > 0.0) c.max_ratio = std::max(c.max_ratio, d / b);
            if (m <= spec.m_rows) {
                c.measured.push_back(d);
                c.bounds.push_back(b);
            }
        }
        cases[i] = std::move(c);
    });
    for (std::size_t i = 0; i < cases.size(); ++i) {
        if (i % nj + 1 < nj && spec.Js[i % nj + 1] == 2 * spec.Js[i % nj] && cases[i + 1].sup_measured > 0.0) {
            cases[i].halving_ratio = cases[i].sup_measured / cases[i + 1].sup_measured;
        }
    }
    return cases;
}

inline void write_bound_summary_csv(std::ostream& out, const std::vector<BoundCase>& cases)
{
    out << "theta,J,M,h,tau,cond2,sup_measured,max_ratio_to_bound,pass,halving_ratio\n";
    for (const auto& c : cases) {
        write_csv_row(out, c.theta, c.J, c.M, c.h, c.tau, c.cond2, c.sup_measured, c.max_ratio,
                      c.pass ? "pass" : "FAIL", c.halving_ratio ? format_double(*c.halving_ratio) : std::string());
    }
}

inline void write_bound_detail_csv(std::ostream& out, const std::vector<BoundCase>& cases)
{
    out << "theta,J,M,h,tau,m,measured,bound,pass\n";
    for (const auto& c : cases) {
        for (std::size_t m = 0; m < c.measured.size(); ++m) {
            write_csv_row(out, c.theta, c.J, c.M, c.h, c.tau, m, c.measured[m], c.bounds[m],
                          c.measured[m] <= c.bounds[m] ? "pass" : "FAIL");
        }
    }
}

// ---------------------------------------------------------------------------
// compare

struct CompareResult {
    std::vector<double> times;
    std::vector<double> l2; // ||Psi_A^m - Psi_B^m||
    std::vector<double> c;
    double max_l2 = 0.0;
    double max_c = 0.0;
};

/// Runs `a` and `b` in lockstep; they may differ only in the boundary.
inline CompareResult run_compare(const RunConfig& a, const RunConfig& b)
{
    RunConfig a_cmp = a;
    RunConfig b_cmp = b;
    a_cmp.boundary = b_cmp.boundary = {};
    a_cmp.snapshots = b_cmp.snapshots = {};
    a_cmp.preset = b_cmp.preset = {};
    a_cmp.output_dir = b_cmp.output_dir = {};
    if (!(a_cmp == b_cmp)) throw ValidationError("compare: configurations differ in more than the boundary");

    const auto sa = a.scheme();
    const auto sb = b.scheme();
    const auto init = sample_gaussian(sa.mesh, 0.0, a.packet);
    CrankNicolsonSolver solver_a(sa, init);
    CrankNicolsonSolver solver_b(sb, init);
    CompareResult r;
    auto record = [&](double t, const WaveField& wa, const WaveField& wb) {
        WaveField d(wa.size());
        for (std::size_t j = 0; j < wa.size(); ++j) d[j] = wa[j] - wb[j];
        r.times.push_back(t);
        r.l2.push_back(l2_norm(d, sa.mesh));
        r.c.push_back(c_norm(d));
        r.max_l2 = std::max(r.max_l2, r.l2.back());
        r.max_c = std::max(r.max_c, r.c.back());
    };
    record(0.0, solver_a.state().field, solver_b.state().field);
    while (!solver_a.done()) {
        solver_a.step();
        solver_b.step();
        record(sa.grid.time(solver_a.state().level), solver_a.state().field, solver_b.state().field);
    }
    return r;
}

inline void write_compare_csv(std::ostream& out, const CompareResult& r)
{
    out << "m,t,diff_l2,diff_c\n";
    for (std::size_t m = 0; m < r.times.size(); ++m) write_csv_row(out, m, r.times[m], r.l2[m], r.c[m]);
}

} // namespace tbc::harness
