#pragma once

// Two-level symmetric (Crank-Nicolson type) theta-family scheme on [0, X]
// closed at x_J = X by a transparent boundary row.
//
// Interior rows, j = 1..J-1 (U = new level, W = old level):
//
//   (i hbar / tau) C_theta[rho](U - W) + (hbar^2 / 4) F(U + W) - (1/2) C_theta[V](U + W) = 0,
//
// with F the flux operator d^_x(B d-_x .). Row 0 is the Dirichlet condition
// U_0 = 0. Row J, with G_j = i hbar rho_inf (U_j - W_j) / tau - V_inf (U_j + W_j) / 2
// and K = hbar^2 B_inf / 2:
//
//   K [(U_J + W_J) - (U_{J-1} + W_{J-1})] / (2h) - h [theta_f G_{J-1} + (1/2 - theta_f) G_J]
//     = K c0 sum_{l=0}^{m-1} R^l Psi_J^{m-l}.
//
// The l = 0 term K c0 U_J goes to the matrix; the rest is history.

#include "tbc/error.hpp"
#include "tbc/kernels.hpp"
#include "tbc/meshops.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace tbc {

enum class KernelKind { DiscreteTheta, SemiDiscrete };

/// Which kernel feeds the boundary convolution.
struct KernelChoice {
    KernelKind kind = KernelKind::DiscreteTheta;
    double theta = 0.0; // used for DiscreteTheta only

    friend bool operator==(const KernelChoice&, const KernelChoice&) = default;
};

/// Flux averaging parameter of the boundary row plus the kernel choice.
struct BoundaryConfig {
    double theta_flux = 0.0;
    KernelChoice kernel;

    /// Discrete TBC of the theta-scheme.
    static BoundaryConfig dtbc(double theta) { return {theta, {KernelKind::DiscreteTheta, theta}}; }
    /// Semi-discrete kernel with the theta flux.
    static BoundaryConfig sdtbc(double theta) { return {theta, {KernelKind::SemiDiscrete, 0.25}}; }
    /// theta = 1/6 flux with the semi-discrete kernel.
    static BoundaryConfig isdtbc() { return {1.0 / 6.0, {KernelKind::SemiDiscrete, 0.25}}; }

    void validate() const
    {
        detail::require(theta_flux <= 0.25, "BoundaryConfig: theta_flux must not exceed 1/4");
        if (kernel.kind == KernelKind::DiscreteTheta)
            detail::require(kernel.theta <= 0.25, "BoundaryConfig: kernel theta must not exceed 1/4");
    }

    friend bool operator==(const BoundaryConfig&, const BoundaryConfig&) = default;
};

struct SchemeConfig {
    double theta = 0.0;
    BoundaryConfig boundary;
    SpaceMesh mesh;
    TimeGrid grid;
    PhysicalParams phys;

    void validate() const
    {
        detail::require(theta <= 0.25, "SchemeConfig: theta must not exceed 1/4");
        boundary.validate();
        phys.validate(mesh);
    }
};

inline KernelParams boundary_kernel_params(const SchemeConfig& config)
{
    const auto tail = TailConstants::of(config.phys);
    const double tau = config.grid.step();
    if (config.boundary.kernel.kind == KernelKind::SemiDiscrete) return sdtbc_parameters(tau, tail);
    return dtbc_parameters(config.boundary.kernel.theta, config.mesh.tail_step(), tau, tail);
}

inline std::shared_ptr<const KernelTable> boundary_kernel(const SchemeConfig& config)
{
    return std::make_shared<const KernelTable>(boundary_kernel_params(config), config.grid.levels());
}

/// Rows i = 0..n-1: lower[i] U_{i-1} + diag[i] U_i + upper[i] U_{i+1} = rhs[i].
/// lower[0] and upper[n-1] are ignored.
struct TridiagonalSystem {
    std::vector<Complex> lower;
    std::vector<Complex> diag;
    std::vector<Complex> upper;
    std::vector<Complex> rhs;

    explicit TridiagonalSystem(std::size_t n) : lower(n), diag(n), upper(n), rhs(n) {}
    std::size_t size() const { return diag.size(); }

    /// (A u)_i.
    Complex apply_row(std::span<const Complex> u, std::size_t i) const
    {
        Complex r = diag[i] * u[i];
        if (i > 0) r += lower[i] * u[i - 1];
        if (i + 1 < size()) r += upper[i] * u[i + 1];
        return r;
    }
};

struct SolveResult {
    WaveField solution;
    double residual = 0.0; // ||A u - b||_inf / ||b||_inf (absolute when b = 0)
};

inline double relative_residual(const TridiagonalSystem& sys, std::span<const Complex> u)
{
    double res = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        res = std::max(res, std::abs(sys.apply_row(u, i) - sys.rhs[i]));
        scale = std::max(scale, std::abs(sys.rhs[i]));
    }
    return scale > 0.0 ? res / scale : res;
}

/// Thomas algorithm; no pivoting.
inline SolveResult thomas_solve(const TridiagonalSystem& sys)
{
    const std::size_t n = sys.size();
    detail::require(n >= 2, "thomas_solve: system must have at least 2 rows");
    detail::require(sys.lower.size() == n && sys.upper.size() == n && sys.rhs.size() == n,
                    "thomas_solve: inconsistent band sizes");
    std::vector<Complex> c(n);
    std::vector<Complex> d(n);
    Complex pivot = sys.diag[0];
    for (std::size_t i = 0;; ++i) {
        if (pivot == Complex{}) throw NumericalError("thomas_solve: zero pivot at row " + std::to_string(i));
        c[i] = sys.upper[i] / pivot;
        d[i] = (sys.rhs[i] - (i > 0 ? sys.lower[i] * d[i - 1] : Complex{})) / pivot;
        if (i + 1 == n) break;
        pivot = sys.diag[i + 1] - sys.lower[i + 1] * c[i];
    }
    SolveResult out{WaveField(n), 0.0};
    out.solution[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) out.solution[i] = d[i] - c[i] * out.solution[i + 1];
    out.residual = relative_residual(sys, out.solution.values());
    return out;
}

/// Time-independent coefficients of one step: the matrix acting on U and the
/// stencil acting on W. Only the boundary history changes between levels.
struct StepOperator {
    TridiagonalSystem lhs{0};
    std::vector<Complex> w_lower, w_diag, w_upper;
    Complex history_scale; // rhs_J += history_scale * sum_{l>=1} R^l Psi_J^{m-l}

    explicit StepOperator(const SchemeConfig& config, Complex c0)
    {
        const auto& mesh = config.mesh;
        const auto& phys = config.phys;
        const std::size_t J = mesh.intervals();
        const std::size_t n = J + 1;
        const double hbar = phys.hbar;
        const double tau = config.grid.step();
        const Complex time_coef{0.0, hbar / tau};

        lhs = TridiagonalSystem(n);
        w_lower.assign(n, 0.0);
        w_diag.assign(n, 0.0);
        w_upper.assign(n, 0.0);

        lhs.diag[0] = 1.0;

        for (std::size_t j = 1; j < J; ++j) {
            const auto r = c_theta_weights(mesh, phys.rho, config.theta, j);
            const auto v = c_theta_weights(mesh, phys.V, config.theta, j);
            const auto f = flux_weights(mesh, phys.B, j);
            const double fq = 0.25 * hbar * hbar;
            lhs.lower[j] = time_coef * r.left + fq * f.left - 0.5 * v.left;
            lhs.diag[j] = time_coef * r.centre + fq * f.centre - 0.5 * v.centre;
            lhs.upper[j] = time_coef * r.right + fq * f.right - 0.5 * v.right;
            w_lower[j] = time_coef * r.left - fq * f.left + 0.5 * v.left;
            w_diag[j] = time_coef * r.centre - fq * f.centre + 0.5 * v.centre;
            w_upper[j] = time_coef * r.right - fq * f.right + 0.5 * v.right;
        }

        const double h = mesh.tail_step();
        const double tf = config.boundary.theta_flux;
        const double K = 0.5 * hbar * hbar * phys.B_inf;
        const Complex g_new = Complex{-0.5 * phys.V_inf, hbar * phys.rho_inf / tau};
        const Complex g_old = Complex{0.5 * phys.V_inf, hbar * phys.rho_inf / tau};
        lhs.lower[J] = -K / (2.0 * h) - h * tf * g_new;
        lhs.diag[J] = K / (2.0 * h) - h * (0.5 - tf) * g_new - K * c0;
        // move the W terms to the right-hand side
        w_lower[J] = K / (2.0 * h) - h * tf * g_old;
        w_diag[J] = -K / (2.0 * h) - h * (0.5 - tf) * g_old;
        history_scale = K * c0;
    }

    /// Fills lhs.rhs for old level w and history sum S = sum_{l>=1} R^l Psi_J^{m-l}.
    TridiagonalSystem assemble(const WaveField& w, Complex history_sum) const
    {
        TridiagonalSystem sys = lhs;
        const std::size_t n = sys.size();
        sys.rhs[0] = 0.0;
        for (std::size_t j = 1; j < n; ++j) {
            Complex r = w_lower[j] * w[j - 1] + w_diag[j] * w[j];
            if (j + 1 < n) r += w_upper[j] * w[j + 1];
            sys.rhs[j] = r;
        }
        sys.rhs[n - 1] += history_scale * history_sum;
        return sys;
    }
};

struct SolverState {
    std::size_t level = 0;
    WaveField field;
    std::vector<Complex> boundary_history; // Psi_J^1..Psi_J^level
    std::shared_ptr<const KernelTable> kernel;
};

inline SolverState initial_state(const SchemeConfig& config, WaveField initial,
                                 std::shared_ptr<const KernelTable> kernel = nullptr)
{
    detail::require(initial.size() == config.mesh.node_count(), "initial field must have J+1 entries");
    detail::require(initial.all_finite(), "initial field must be finite");
    if (!kernel) kernel = boundary_kernel(config);
    detail::require(kernel->last() >= config.grid.levels(), "kernel table shorter than M");
    SolverState s;
    s.field = std::move(initial);
    s.kernel = std::move(kernel);
    s.boundary_history.reserve(config.grid.levels());
    return s;
}

/// System for advancing `state` (level m-1) to level m.
inline TridiagonalSystem assemble_step(const SolverState& state, const SchemeConfig& config)
{
    detail::require(state.kernel && state.kernel->last() >= state.level + 1, "assemble_step: kernel table too short");
    const StepOperator op(config, state.kernel->c0());
    return op.assemble(state.field, convolution_tail(*state.kernel, state.boundary_history));
}

inline constexpr double kResidualTolerance = 1e-10;

/// Advances a state by one level with a prebuilt operator.
inline void advance(SolverState& state, const StepOperator& op, std::size_t max_level)
{
    if (state.level >= max_level) throw ValidationError("step: already at the final level");
    const auto sys = op.assemble(state.field, convolution_tail(*state.kernel, state.boundary_history));
    auto result = thomas_solve(sys);
    if (!(result.residual <= kResidualTolerance)) {
        throw NumericalError("step " + std::to_string(state.level + 1) + ": tridiagonal residual " +
                             std::to_string(result.residual) + " exceeds tolerance");
    }
    if (!result.solution.all_finite()) throw NumericalError("step: non-finite solution");
    result.solution[0] = 0.0;
    state.field = std::move(result.solution);
    state.boundary_history.push_back(state.field[state.field.size() - 1]);
    ++state.level;
}

inline SolverState step(SolverState state, const SchemeConfig& config)
{
    const StepOperator op(config, state.kernel->c0());
    advance(state, op, config.grid.levels());
    return state;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<double> l2;
    std::vector<double> c;
    std::vector<Complex> boundary; // Psi_J^m
    std::map<std::size_t, WaveField> snapshots;

    std::size_t level_count() const { return times.size(); }
};

/// Called with (m, t_m, field) for every level m = 0..M.
using LevelObserver = std::function<void(std::size_t, double, const WaveField&)>;

struct RunOptions {
    std::set<std::size_t> snapshot_levels;
    bool store_all = false;
    LevelObserver observer;
    std::shared_ptr<const KernelTable> kernel; // built from config when empty
};

/// Drives one SolverState through all M levels.
class CrankNicolsonSolver {
public:
    CrankNicolsonSolver(const SchemeConfig& config, WaveField initial,
                        std::shared_ptr<const KernelTable> kernel = nullptr)
        : config_(config)
    {
        config_.validate();
        state_ = initial_state(config_, std::move(initial), std::move(kernel));
        op_ = std::make_unique<StepOperator>(config_, state_.kernel->c0());
    }

    const SolverState& state() const { return state_; }
    const SchemeConfig& config() const { return config_; }
    bool done() const { return state_.level >= config_.grid.levels(); }

    const WaveField& step()
    {
        advance(state_, *op_, config_.grid.levels());
        return state_.field;
    }

private:
    SchemeConfig config_;
    SolverState state_;
    std::unique_ptr<StepOperator> op_;
};

inline Trajectory run(const SchemeConfig& config, const WaveField& initial, const RunOptions& options = {})
{
    CrankNicolsonSolver solver(config, initial, options.kernel);
    Trajectory traj;
    const std::size_t M = config.grid.levels();
    traj.times.reserve(M + 1);
    traj.l2.reserve(M + 1);
    traj.c.reserve(M + 1);
    traj.boundary.reserve(M + 1);
    auto record = [&](std::size_t m, const WaveField& w) {
        const double t = config.grid.time(m);
        traj.times.push_back(t);
        traj.l2.push_back(l2_norm(w, config.mesh));
        traj.c.push_back(c_norm(w));
        traj.boundary.push_back(w[w.size() - 1]);
        if (options.store_all || options.snapshot_levels.count(m)) traj.snapshots.emplace(m, w);
        if (options.observer) options.observer(m, t, w);
    };
    record(0, solver.state().field);
    while (!solver.done()) {
        const auto& w = solver.step();
        record(solver.state().level, w);
    }
    return traj;
}

} // namespace tbc
