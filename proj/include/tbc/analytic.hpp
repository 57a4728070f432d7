#pragma once

// Gaussian wave packet reference solution and error metrics.

#include "tbc/error.hpp"
#include "tbc/meshops.hpp"
#include "tbc/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace tbc {

struct GaussianParams {
    double k = 100.0;            // wave number
    double alpha = 1.0 / 120.0;  // width parameter, > 0
    double center = 0.8;         // x^(0)

    friend bool operator==(const GaussianParams&, const GaussianParams&) = default;
};

/// Exact solution of i psi_t = -psi_xx (hbar = 1, rho = 1, B = 2, V = 0):
///
///   psi_G(x, t) = (1 + i t / alpha)^{-1/2}
///                 exp{ i k (x - x0 - k t) - (x - x0 - 2 k t)^2 / (4 (alpha + i t)) }.
///
/// For t >= 0, 1 + i t / alpha stays in the right half-plane so the principal
/// square root is the continuous branch with sqrt(1) = 1.
inline Complex gaussian_exact(double x, double t, const GaussianParams& gp)
{
    detail::require(gp.alpha > 0.0, "gaussian_exact: alpha must be positive");
    const Complex I{0.0, 1.0};
    const double shift = x - gp.center;
    const double drift = shift - 2.0 * gp.k * t;
    const Complex exponent = I * gp.k * (shift - gp.k * t) - drift * drift / (4.0 * Complex{gp.alpha, t});
    return std::exp(exponent) / std::sqrt(Complex{1.0, t / gp.alpha});
}

inline WaveField sample_gaussian(const SpaceMesh& mesh, double t, const GaussianParams& gp)
{
    return sample_nodes(mesh, [&](double x) { return gaussian_exact(x, t, gp); });
}

/// i psi_t + psi_xx at (x, t) by 7-point (sixth-order) central differences.
/// Zero for the exact solution up to truncation and rounding.
inline Complex residual_check(const GaussianParams& gp, double x, double t, double dx = 2e-4, double dt = 1e-6)
{
    // d/ds weights for offsets 1..3 and d2/ds2 weights for offsets 0..3
    constexpr std::array<double, 3> d1{3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
    constexpr std::array<double, 4> d2{-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
    Complex psi_t = 0.0;
    Complex psi_xx = d2[0] * gaussian_exact(x, t, gp);
    for (int s = 1; s <= 3; ++s) {
        psi_t += d1[s - 1] * (gaussian_exact(x, t + s * dt, gp) - gaussian_exact(x, t - s * dt, gp));
        psi_xx += d2[s] * (gaussian_exact(x + s * dx, t, gp) + gaussian_exact(x - s * dx, t, gp));
    }
    psi_t /= dt;
    psi_xx /= dx * dx;
    return Complex{0.0, 1.0} * psi_t + psi_xx;
}

struct LevelError {
    std::size_t level = 0;
    double time = 0.0;
    double l2 = 0.0;
    double c = 0.0;
    double exact_l2 = 0.0;
    double exact_c = 0.0;
    double l2_rel = 0.0;
    double c_rel = 0.0;
};

/// Maximum-in-time errors over levels m = 1..M.
struct ErrorReport {
    double l2 = 0.0;
    double c = 0.0;
    double l2_rel = 0.0;
    double c_rel = 0.0;
    std::vector<LevelError> series;
    std::vector<std::size_t> excluded_levels; // exact norm 0: relative error undefined
};

/// Streams numerical levels against the exact solution.
class ErrorAccumulator {
public:
    ErrorAccumulator(const SpaceMesh& mesh, const TimeGrid& grid, const GaussianParams& gp)
        : mesh_(mesh), grid_(grid), gp_(gp)
    {
    }

    void add(std::size_t level, const WaveField& field)
    {
        if (level == 0) return;
        detail::require(field.size() == mesh_.node_count(), "error_report: field size does not match mesh");
        const double t = grid_.time(level);
        WaveField err(field.size());
        WaveField exact(field.size());
        for (std::size_t j = 0; j < field.size(); ++j) {
            exact[j] = gaussian_exact(mesh_.node(j), t, gp_);
            err[j] = field[j] - exact[j];
        }
        LevelError e;
        e.level = level;
        e.time = t;
        e.l2 = l2_norm(err, mesh_);
        e.c = c_norm(err);
        e.exact_l2 = l2_norm(exact, mesh_);
        e.exact_c = c_norm(exact);
        report_.l2 = std::max(report_.l2, e.l2);
        report_.c = std::max(report_.c, e.c);
        if (e.exact_l2 > 0.0 && e.exact_c > 0.0) {
            e.l2_rel = e.l2 / e.exact_l2;
            e.c_rel = e.c / e.exact_c;
            report_.l2_rel = std::max(report_.l2_rel, e.l2_rel);
            report_.c_rel = std::max(report_.c_rel, e.c_rel);
        } else {
            report_.excluded_levels.push_back(level);
        }
        report_.series.push_back(e);
    }

    LevelObserver observer()
    {
        return [this](std::size_t m, double, const WaveField& w) { add(m, w); };
    }

    const ErrorReport& report() const { return report_; }

private:
    SpaceMesh mesh_;
    TimeGrid grid_;
    GaussianParams gp_;
    ErrorReport report_;
};

/// Needs fields at every level 1..M (RunOptions::store_all).
inline ErrorReport error_report(const Trajectory& traj, const GaussianParams& gp, const SpaceMesh& mesh,
                                const TimeGrid& grid)
{
    ErrorAccumulator acc(mesh, grid, gp);
    for (std::size_t m = 1; m <= grid.levels(); ++m) {
        auto it = traj.snapshots.find(m);
        if (it == traj.snapshots.end()) {
            throw ValidationError("error_report: trajectory lacks the field at level " + std::to_string(m));
        }
        acc.add(m, it->second);
    }
    return acc.report();
}

/// E(previous) / E(current) for each error kind; absent on the first row.
struct RatioRow {
    std::optional<double> l2;
    std::optional<double> c;
    std::optional<double> l2_rel;
    std::optional<double> c_rel;
};

inline std::vector<RatioRow> convergence_ratios(const std::vector<ErrorReport>& reports)
{
    detail::require(!reports.empty(), "convergence_ratios: need at least one report");
    auto ratio = [](double prev, double cur) -> double {
        if (cur == 0.0) throw NumericalError("convergence_ratios: zero error in denominator");
        return prev / cur;
    };
    std::vector<RatioRow> rows(reports.size());
    for (std::size_t n = 1; n < reports.size(); ++n) {
        const auto& p = reports[n - 1];
        const auto& c = reports[n];
        rows[n] = {ratio(p.l2, c.l2), ratio(p.c, c.c), ratio(p.l2_rel, c.l2_rel), ratio(p.c_rel, c.c_rel)};
    }
    return rows;
}

} // namespace tbc
