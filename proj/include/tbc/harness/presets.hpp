#pragma once

// Named experiments covering the benchmark tables and figures.

#include "tbc/harness/config.hpp"
#include "tbc/harness/experiments.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tbc::harness {

inline const std::vector<std::size_t> kJSweep{200, 400, 800, 1600, 3200};
inline const std::vector<std::size_t> kMSweep{375, 750, 1500, 3000, 6000};

struct CompareSpec {
    RunConfig a;
    RunConfig b;
    std::vector<std::size_t> Ms; // one comparison per M; empty means a.M only
};

using PresetPayload = std::variant<RunConfig, std::vector<TableSpec>, KernelSpec, BoundSpec, CompareSpec>;

struct Preset {
    std::string name;
    std::string description;
    PresetPayload payload;

    std::string kind() const
    {
        static const char* names[] = {"solve", "table", "kernel", "bound", "compare"};
        return names[payload.index()];
    }
};

/// Gaussian packet benchmark: hbar = 1, rho = 1, B = 2, V = 0, k = 100,
/// alpha = 1/120, x0 = 0.8 on [0, 1.5] up to T = 0.006.
inline RunConfig benchmark_config(double theta, BoundaryPreset boundary, std::size_t J, std::size_t M)
{
    RunConfig cfg;
    cfg.theta = theta;
    cfg.boundary = resolve(boundary, theta);
    cfg.J = J;
    cfg.M = M;
    return cfg;
}

inline TableSpec table1_spec()
{
    TableSpec t;
    t.name = "table1";
    t.axis = SweepAxis::J;
    t.values = kJSweep;
    t.fixed = 6000;
    return t;
}

inline TableSpec table2_spec()
{
    TableSpec t;
    t.name = "table2";
    t.axis = SweepAxis::M;
    t.values = kMSweep;
    t.fixed = 3200;
    return t;
}

/// Maximum-in-time errors against J for several theta at M = 3000.
inline std::vector<TableSpec> theta_sweep_specs()
{
    std::vector<TableSpec> out;
    for (double theta : {0.0, 1.0 / 12.0, 1.0 / 6.0, 0.25}) {
        TableSpec t;
        t.name = "theta-sweep";
        t.values = kJSweep;
        t.fixed = 3000;
        t.theta = theta;
        t.boundaries = {BoundaryPreset::DTBC, BoundaryPreset::SDTBC};
        if (theta == 1.0 / 12.0) t.boundaries.push_back(BoundaryPreset::ISDTBC);
        out.push_back(t);
    }
    return out;
}

inline std::vector<Preset> preset_registry()
{
    std::vector<Preset> r;
    const double numerov = 1.0 / 12.0;
    for (auto b : {BoundaryPreset::DTBC, BoundaryPreset::SDTBC, BoundaryPreset::ISDTBC}) {
        for (auto J : kJSweep) {
            auto cfg = benchmark_config(numerov, b, J, 6000);
            cfg.preset = "table1-" + to_string(b) + "-J" + std::to_string(J);
            r.push_back({cfg.preset, "single run of the J sweep (theta = 1/12, M = 6000)", cfg});
        }
    }
    for (auto b : {BoundaryPreset::DTBC, BoundaryPreset::SDTBC, BoundaryPreset::ISDTBC}) {
        for (auto M : kMSweep) {
            auto cfg = benchmark_config(numerov, b, 3200, M);
            cfg.preset = "table2-" + to_string(b) + "-M" + std::to_string(M);
            r.push_back({cfg.preset, "single run of the M sweep (theta = 1/12, J = 3200)", cfg});
        }
    }
    {
        auto cfg = benchmark_config(numerov, BoundaryPreset::DTBC, 800, 3000);
        cfg.preset = "fig1-norms";
        cfg.snapshots = {0};
        r.push_back({cfg.preset, "initial packet and L2/C norms over time (DTBC, J = 800, M = 3000)", cfg});
    }
    for (auto b : {BoundaryPreset::DTBC, BoundaryPreset::SDTBC}) {
        auto cfg = benchmark_config(numerov, b, 800, 3000);
        cfg.preset = "fig2-" + to_string(b);
        r.push_back({cfg.preset, "absolute and relative errors over time (theta = 1/12, J = 800, M = 3000)", cfg});
    }
    {
        KernelSpec k;
        k.theta = numerov;
        k.J = 800;
        k.M = 3000;
        r.push_back({"fig3-kernel", "|c0 R^m| for theta = 1/12 and 1/4 (J = 800, M = 3000)", k});
    }
    r.push_back({"table1", "errors and ratios against J for DTBC, SDTBC, ISDTBC (theta = 1/12, M = 6000)",
                 std::vector<TableSpec>{table1_spec()}});
    r.push_back({"table2", "errors and ratios against M for DTBC, SDTBC, ISDTBC (theta = 1/12, J = 3200)",
                 std::vector<TableSpec>{table2_spec()}});
    r.push_back({"fig4-5-theta-sweep", "max absolute/relative errors against J for theta = 0, 1/12, 1/6, 1/4 (M = 3000)",
                 theta_sweep_specs()});
    r.push_back({"bound-sweep", "kernel divergence against its bound over the J and M sweeps", BoundSpec{}});
    {
        CompareSpec c{benchmark_config(numerov, BoundaryPreset::DTBC, 3200, 6000),
                      benchmark_config(numerov, BoundaryPreset::SDTBC, 3200, 6000), kMSweep};
        r.push_back({"compare-dtbc-sdtbc", "DTBC vs SDTBC solution difference (theta = 1/12, J = 3200, M sweep)", c});
    }
    {
        CompareSpec c{benchmark_config(0.25, BoundaryPreset::DTBC, 800, 3000),
                      benchmark_config(0.25, BoundaryPreset::SDTBC, 800, 3000), {}};
        r.push_back({"compare-quarter", "theta = 1/4: DTBC and SDTBC coincide (J = 800, M = 3000)", c});
    }
    return r;
}

inline std::optional<Preset> find_preset(const std::string& name)
{
    for (auto& p : preset_registry()) {
        if (p.name == name) return p;
    }
    return std::nullopt;
}

} // namespace tbc::harness
