#pragma once

// Space/time meshes, the three-point averaging and flux operators of the
// theta-family scheme, and the discrete L2 / C norms.

#include "tbc/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tbc {

using Complex = std::complex<double>;

/// Nodes 0 = x_0 < x_1 < ... < x_J = X on the truncated half-axis.
///
/// Steps are h_j = x_j - x_{j-1} for j = 1..J. The last two steps must
/// coincide: the transparent boundary row lives on a uniform tail.
class SpaceMesh {
public:
    explicit SpaceMesh(std::vector<double> nodes) : nodes_(std::move(nodes))
    {
        detail::require(nodes_.size() >= 4, "SpaceMesh: need J >= 3 intervals");
        detail::require(nodes_.front() == 0.0, "SpaceMesh: x_0 must be 0");
        for (std::size_t j = 1; j < nodes_.size(); ++j) {
            detail::require(std::isfinite(nodes_[j]) && nodes_[j] > nodes_[j - 1],
                            "SpaceMesh: nodes must be finite and strictly increasing");
        }
        const double tail = step(intervals());
        detail::require(std::abs(step(intervals() - 1) - tail) <= 1e-12 * tail,
                        "SpaceMesh: last two steps must be equal");
    }

    /// x_j = j X / J.
    static SpaceMesh uniform(double endpoint, std::size_t intervals)
    {
        detail::require(endpoint > 0.0 && std::isfinite(endpoint), "SpaceMesh: X must be positive");
        detail::require(intervals >= 3, "SpaceMesh: need J >= 3 intervals");
        const double h = endpoint / static_cast<double>(intervals);
        std::vector<double> x(intervals + 1);
        for (std::size_t j = 0; j < intervals; ++j) x[j] = static_cast<double>(j) * h;
        x[intervals] = endpoint;
        auto mesh = SpaceMesh(std::move(x), Unchecked{});
        mesh.uniform_step_ = h;
        return mesh;
    }

    std::size_t intervals() const { return nodes_.size() - 1; }
    std::size_t node_count() const { return nodes_.size(); }
    double node(std::size_t j) const { return nodes_[j]; }
    std::span<const double> nodes() const { return nodes_; }
    double endpoint() const { return nodes_.back(); }

    /// h_j for 1 <= j <= J.
    double step(std::size_t j) const
    {
        if (uniform_step_ > 0.0) return uniform_step_;
        return nodes_[j] - nodes_[j - 1];
    }

    /// h_{j+1/2} = (h_j + h_{j+1}) / 2 for 1 <= j <= J-1.
    double half_step(std::size_t j) const { return 0.5 * (step(j) + step(j + 1)); }

    /// h = h_J.
    double tail_step() const { return step(intervals()); }

    /// Midpoint x_{j-1/2} of interval j.
    double midpoint(std::size_t j) const { return 0.5 * (nodes_[j - 1] + nodes_[j]); }

private:
    struct Unchecked {};
    SpaceMesh(std::vector<double> nodes, Unchecked) : nodes_(std::move(nodes)) {}

    std::vector<double> nodes_;
    double uniform_step_ = 0.0;
};

/// Uniform time levels t_m = m tau, m = 0..M.
class TimeGrid {
public:
    TimeGrid(double step, std::size_t levels) : tau_(step), levels_(levels)
    {
        detail::require(step > 0.0 && std::isfinite(step), "TimeGrid: tau must be positive");
    }

    /// tau = T / M; M = 0 gives a degenerate grid holding only t_0.
    static TimeGrid from_horizon(double horizon, std::size_t levels)
    {
        detail::require(horizon > 0.0 && std::isfinite(horizon), "TimeGrid: T must be positive");
        if (levels == 0) return TimeGrid(horizon, 0);
        return TimeGrid(horizon / static_cast<double>(levels), levels);
    }

    double step() const { return tau_; }
    std::size_t levels() const { return levels_; }
    double horizon() const { return tau_ * static_cast<double>(levels_); }
    double time(std::size_t m) const { return tau_ * static_cast<double>(m); }

private:
    double tau_;
    std::size_t levels_;
};

/// Coefficients rho, B, V as interval samples (index j-1 holds interval j)
/// together with their constant values beyond the tail start X0.
struct PhysicalParams {
    double hbar = 1.0;
    std::vector<double> rho;
    std::vector<double> B;
    std::vector<double> V;
    double rho_inf = 1.0;
    double B_inf = 1.0;
    double V_inf = 0.0;
    double tail_start = 0.0;

    /// rho(x) = rho_inf etc. on the whole mesh.
    static PhysicalParams constant(const SpaceMesh& mesh, double hbar, double rho, double B, double V,
                                   double tail_start)
    {
        PhysicalParams p;
        p.hbar = hbar;
        p.rho.assign(mesh.intervals(), rho);
        p.B.assign(mesh.intervals(), B);
        p.V.assign(mesh.intervals(), V);
        p.rho_inf = rho;
        p.B_inf = B;
        p.V_inf = V;
        p.tail_start = tail_start;
        p.validate(mesh);
        return p;
    }

    /// Samples each coefficient at the interval midpoints x_{j-1/2}.
    static PhysicalParams sampled(const SpaceMesh& mesh, double hbar,
                                  const std::function<double(double)>& rho_fn,
                                  const std::function<double(double)>& B_fn,
                                  const std::function<double(double)>& V_fn, double tail_start)
    {
        PhysicalParams p;
        p.hbar = hbar;
        const std::size_t J = mesh.intervals();
        p.rho.resize(J);
        p.B.resize(J);
        p.V.resize(J);
        for (std::size_t j = 1; j <= J; ++j) {
            const double x = mesh.midpoint(j);
            p.rho[j - 1] = rho_fn(x);
            p.B[j - 1] = B_fn(x);
            p.V[j - 1] = V_fn(x);
        }
        p.rho_inf = rho_fn(mesh.endpoint());
        p.B_inf = B_fn(mesh.endpoint());
        p.V_inf = V_fn(mesh.endpoint());
        p.tail_start = tail_start;
        p.validate(mesh);
        return p;
    }

    void validate(const SpaceMesh& mesh) const
    {
        const std::size_t J = mesh.intervals();
        detail::require(hbar > 0.0, "PhysicalParams: hbar must be positive");
        detail::require(rho.size() == J && B.size() == J && V.size() == J,
                        "PhysicalParams: need one sample per mesh interval");
        detail::require(rho_inf > 0.0 && B_inf > 0.0, "PhysicalParams: rho_inf and B_inf must be positive");
        detail::require(std::isfinite(V_inf), "PhysicalParams: V_inf must be finite");
        detail::require(tail_start < mesh.endpoint(), "PhysicalParams: tail start X0 must lie below X");
        detail::require(mesh.node(J - 1) >= tail_start,
                        "PhysicalParams: x_{J-1} must lie in the constant tail (x_{J-1} >= X0)");
        for (std::size_t j = 1; j <= J; ++j) {
            detail::require(rho[j - 1] > 0.0 && B[j - 1] > 0.0 && std::isfinite(V[j - 1]),
                            "PhysicalParams: rho and B samples must be positive, V finite");
            if (mesh.node(j - 1) >= tail_start) {
                detail::require(rho[j - 1] == rho_inf && B[j - 1] == B_inf && V[j - 1] == V_inf,
                                "PhysicalParams: coefficients must equal tail constants beyond X0 (interval " +
                                    std::to_string(j) + ")");
            }
        }
    }
};

/// Complex nodal values W_0..W_J.
class WaveField {
public:
    WaveField() = default;
    explicit WaveField(std::size_t size) : values_(size) {}
    explicit WaveField(std::vector<Complex> values) : values_(std::move(values)) {}
    WaveField(std::initializer_list<Complex> values) : values_(values) {}

    std::size_t size() const { return values_.size(); }
    Complex& operator[](std::size_t j) { return values_[j]; }
    const Complex& operator[](std::size_t j) const { return values_[j]; }
    std::span<Complex> values() { return values_; }
    std::span<const Complex> values() const { return values_; }
    auto begin() { return values_.begin(); }
    auto end() { return values_.end(); }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    bool all_finite() const
    {
        return std::all_of(values_.begin(), values_.end(),
                           [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
    }

    friend bool operator==(const WaveField&, const WaveField&) = default;

private:
    std::vector<Complex> values_;
};

/// Samples f at every node x_0..x_J.
template <typename F>
WaveField sample_nodes(const SpaceMesh& mesh, F&& f)
{
    WaveField w(mesh.node_count());
    for (std::size_t j = 0; j < mesh.node_count(); ++j) w[j] = f(mesh.node(j));
    return w;
}

namespace detail {

inline void require_interior(const SpaceMesh& mesh, std::size_t j)
{
    if (j < 1 || j + 1 > mesh.intervals()) {
        throw ValidationError("node index " + std::to_string(j) + " outside interior range 1.." +
                              std::to_string(mesh.intervals() - 1));
    }
}

} // namespace detail

/// Weights (left, centre, right) of C_theta[kappa] at node j.
struct StencilWeights {
    double left;
    double centre;
    double right;
};

inline StencilWeights c_theta_weights(const SpaceMesh& mesh, std::span<const double> samples, double theta,
                                      std::size_t j)
{
    detail::require_interior(mesh, j);
    const double hj = mesh.step(j);
    const double hn = mesh.step(j + 1);
    const double hh = mesh.half_step(j);
    const double kj = samples[j - 1];
    const double kn = samples[j];
    const double averaged = (hj * kj + hn * kn) / (2.0 * hh);
    return {theta * (hj / hh) * kj, (1.0 - 2.0 * theta) * averaged, theta * (hn / hh) * kn};
}

/// C_theta[kappa] W at interior node j.
inline Complex apply_c_theta(const SpaceMesh& mesh, std::span<const double> samples, double theta,
                             const WaveField& w, std::size_t j)
{
    const auto s = c_theta_weights(mesh, samples, theta, j);
    return s.left * w[j - 1] + s.centre * w[j] + s.right * w[j + 1];
}

/// Weights of the flux operator d^_x(B d-_x W) at node j.
inline StencilWeights flux_weights(const SpaceMesh& mesh, std::span<const double> B, std::size_t j)
{
    detail::require_interior(mesh, j);
    const double hj = mesh.step(j);
    const double hn = mesh.step(j + 1);
    const double hh = mesh.half_step(j);
    const double left = B[j - 1] / (hj * hh);
    const double right = B[j] / (hn * hh);
    return {left, -(left + right), right};
}

inline Complex second_difference_flux(const SpaceMesh& mesh, std::span<const double> B, const WaveField& w,
                                      std::size_t j)
{
    detail::require_interior(mesh, j);
    const double hj = mesh.step(j);
    const double hn = mesh.step(j + 1);
    return (B[j] * (w[j + 1] - w[j]) / hn - B[j - 1] * (w[j] - w[j - 1]) / hj) / mesh.half_step(j);
}

/// Weight of node j in the mesh L2 norm: 0 at the Dirichlet node, h_{j+1/2}
/// inside and h_J at x_J. On a uniform mesh this is h * sum_{j=1}^{J}.
inline double l2_weight(const SpaceMesh& mesh, std::size_t j)
{
    const std::size_t J = mesh.intervals();
    if (j == 0) return 0.0;
    if (j == J) return mesh.step(J);
    return mesh.half_step(j);
}

inline double l2_norm(std::span<const Complex> w, const SpaceMesh& mesh)
{
    detail::require(w.size() == mesh.node_count(), "l2_norm: field size does not match mesh");
    double sum = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) sum += l2_weight(mesh, j) * std::norm(w[j]);
    return std::sqrt(sum);
}

inline double l2_norm(const WaveField& w, const SpaceMesh& mesh) { return l2_norm(w.values(), mesh); }

inline double c_norm(std::span<const Complex> w)
{
    double best = 0.0;
    for (const Complex& z : w) best = std::max(best, std::abs(z));
    return best;
}

inline double c_norm(const WaveField& w) { return c_norm(w.values()); }

} // namespace tbc
