#pragma once

// Convolution kernels of the discrete and semi-discrete transparent boundary
// conditions.
//
// The boundary operator has the form c0 * sum_l R^l(kappa, mu) Phi^{m-l} with
//
//   R^m(kappa, mu) = -kappa^m [P_m(mu) - P_{m-2}(mu)] / (2m - 1),
//
// where P_m are Legendre polynomials (P_m = 0 for m < 0). The parameters
// (c0, kappa, mu) depend on the tail constants through
//
//   a^      = V_inf / (hbar^2 B_inf) + i 2 rho_inf / (tau hbar B_inf),
//   alpha~  = 2 + (1 - 4 theta) h^2 a^,
//   alpha^  = a^ alpha~,
//
// and on theta <= 1/4. For theta = 1/4 alpha~ = 2, so the kernel does not
// depend on h and coincides with the semi-discrete one.

#include "tbc/csv.hpp"
#include "tbc/error.hpp"
#include "tbc/meshops.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace tbc {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Argument in [0, 2pi).
inline double arg0(Complex z)
{
    double a = std::arg(z);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    return a;
}

/// The tail constants relevant for the boundary: hbar, rho_inf, B_inf, V_inf.
struct TailConstants {
    double hbar = 1.0;
    double rho_inf = 1.0;
    double B_inf = 1.0;
    double V_inf = 0.0;

    static TailConstants of(const PhysicalParams& p) { return {p.hbar, p.rho_inf, p.B_inf, p.V_inf}; }
};

struct HatA {
    double re = 0.0; // V_inf / (hbar^2 B_inf)
    double im = 0.0; // 2 rho_inf / (tau hbar B_inf) > 0

    Complex value() const { return {re, im}; }
};

inline HatA hat_a(const TailConstants& tail, double tau)
{
    detail::require(tau > 0.0 && std::isfinite(tau), "hat_a: tau must be positive");
    detail::require(tail.hbar > 0.0, "hat_a: hbar must be positive");
    detail::require(tail.rho_inf > 0.0, "hat_a: rho_inf must be positive");
    detail::require(tail.B_inf > 0.0, "hat_a: B_inf must be positive");
    return {tail.V_inf / (tail.hbar * tail.hbar * tail.B_inf), 2.0 * tail.rho_inf / (tau * tail.hbar * tail.B_inf)};
}

/// alpha~ = 2 + (1 - 4 theta) h^2 a^, alpha^ = a^ alpha~ and
/// beta^ = 2 a^_0 + (1 - 4 theta) h^2 |a^|^2.
struct AlphaDecomposition {
    Complex alpha_tilde;
    Complex alpha_hat;
    double beta_hat;
};

inline AlphaDecomposition alpha_decomposition(double theta, double h, const HatA& a)
{
    const Complex av = a.value();
    const double scale = (1.0 - 4.0 * theta) * h * h;
    const Complex tilde = 2.0 + scale * av;
    return {tilde, av * tilde, 2.0 * a.re + scale * std::norm(av)};
}

struct KernelParams {
    Complex c0;
    Complex kappa;
    double mu = 0.0;
};

namespace detail {

// Shared by the discrete (any theta <= 1/4) and semi-discrete kernels; the
// semi-discrete one is exactly this path with alpha~ = 2.
inline KernelParams kernel_parameters_from(const HatA& a, Complex alpha_tilde)
{
    const Complex av = a.value();
    const double abs_a = std::abs(av);
    const double abs_t = std::abs(alpha_tilde);
    if (abs_t == 0.0 || abs_a == 0.0) throw NumericalError("kernel parameters: alpha^ vanishes");

    // arg0 alpha^ = arg0 a^ + arg0 alpha~, never arg0 of the product
    const double arg_alpha = arg0(av) + arg0(alpha_tilde);
    KernelParams p;
    p.c0 = -0.5 * std::sqrt(abs_a * abs_t) * std::polar(1.0, -0.5 * arg_alpha);
    const Complex unit_a = av / abs_a;
    const Complex unit_t = alpha_tilde / abs_t;
    p.kappa = -(unit_a * unit_t);
    // cos(arg a^ - arg alpha~) = Re(a^ conj(alpha~)) / (|a^| |alpha~|)
    p.mu = (unit_a * std::conj(unit_t)).real();
    if (!(std::abs(p.mu) < 1.0)) throw NumericalError("kernel parameters: degenerate kernel, |mu| >= 1");
    return p;
}

} // namespace detail

inline KernelParams dtbc_parameters(double theta, double h, double tau, const TailConstants& tail)
{
    detail::require(theta <= 0.25, "dtbc_parameters: theta must not exceed 1/4");
    detail::require(h > 0.0 && std::isfinite(h), "dtbc_parameters: h must be positive");
    const HatA a = hat_a(tail, tau);
    return detail::kernel_parameters_from(a, alpha_decomposition(theta, h, a).alpha_tilde);
}

/// Semi-discrete kernel; identical to dtbc_parameters(1/4, h, ...) for every h.
inline KernelParams sdtbc_parameters(double tau, const TailConstants& tail)
{
    const HatA a = hat_a(tail, tau);
    return detail::kernel_parameters_from(a, alpha_decomposition(0.25, 1.0, a).alpha_tilde);
}

/// kappa and mu straight from alpha^ and beta^ (no decomposition). Used as
/// the second route when cross-checking dtbc_parameters.
inline KernelParams dtbc_parameters_direct(double theta, double h, double tau, const TailConstants& tail)
{
    const HatA a = hat_a(tail, tau);
    const Complex av = a.value();
    const double scale = (1.0 - 4.0 * theta) * h * h;
    const Complex alpha = 2.0 * av + scale * av * av;
    const double beta = 2.0 * a.re + scale * std::norm(av);
    KernelParams p;
    p.c0 = -0.5 * std::sqrt(std::abs(alpha)) * std::polar(1.0, -0.5 * arg0(alpha));
    p.kappa = -std::polar(1.0, std::arg(alpha));
    p.mu = beta / std::abs(alpha);
    return p;
}

namespace detail {

// Extended precision for the kernel sequences. Near the zeros of R^m the
// rounding of either evaluation route would otherwise dominate the value.
#if defined(__SIZEOF_FLOAT128__)
using WideReal = __float128;
#else
using WideReal = long double;
#endif

struct WideComplex {
    WideReal re = 0;
    WideReal im = 0;

    WideComplex() = default;
    WideComplex(WideReal r, WideReal i = 0) : re(r), im(i) {}
    explicit WideComplex(Complex z) : re(z.real()), im(z.imag()) {}

    Complex narrow() const { return {static_cast<double>(re), static_cast<double>(im)}; }

    friend WideComplex operator*(WideComplex a, WideComplex b)
    {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend WideComplex operator*(WideReal s, WideComplex a) { return {s * a.re, s * a.im}; }
    friend WideComplex operator-(WideComplex a, WideComplex b) { return {a.re - b.re, a.im - b.im}; }
    friend WideComplex operator-(WideComplex a) { return {-a.re, -a.im}; }
};

inline WideComplex wide_pow(WideComplex z, std::size_t n)
{
    WideComplex r(1);
    while (n) {
        if (n & 1u) r = r * z;
        z = z * z;
        n >>= 1u;
    }
    return r;
}

} // namespace detail

/// R^0..R^M together with the parameters that generated them.
class KernelTable {
public:
    KernelTable(const KernelParams& params, std::size_t last)
        : params_(params), values_(last + 1)
    {
        detail::require(std::abs(params.mu) < 1.0, "kernel_table: need |mu| < 1");
        using detail::WideComplex;
        using detail::WideReal;
        const WideComplex kappa(params.kappa);
        const WideComplex km = static_cast<WideReal>(params.mu) * kappa;
        const WideComplex k2 = kappa * kappa;
        WideComplex prev(1);
        WideComplex cur = -km;
        values_[0] = 1.0;
        if (last >= 1) values_[1] = cur.narrow();
        for (std::size_t m = 2; m <= last; ++m) {
            const WideReal md = static_cast<WideReal>(m);
            const WideComplex next = ((2 * md - 3) / md) * (km * cur) - ((md - 3) / md) * (k2 * prev);
            prev = cur;
            cur = next;
            values_[m] = cur.narrow();
        }
    }

    const KernelParams& params() const { return params_; }
    Complex c0() const { return params_.c0; }
    std::size_t last() const { return values_.size() - 1; }
    std::size_t size() const { return values_.size(); }
    Complex operator[](std::size_t m) const { return values_[m]; }
    std::span<const Complex> values() const { return values_; }

private:
    KernelParams params_;
    std::vector<Complex> values_;
};

inline KernelTable kernel_table(const KernelParams& params, std::size_t last) { return KernelTable(params, last); }

/// 2 / max(1, 2m - 1).
inline double kernel_envelope(std::size_t m)
{
    return 2.0 / std::max(1.0, 2.0 * static_cast<double>(m) - 1.0);
}

/// P_m(x) by the three-term recurrence in extended precision; 0 for m < 0.
inline detail::WideReal legendre_wide(long m, detail::WideReal x)
{
    using detail::WideReal;
    if (m < 0) return 0;
    if (m == 0) return 1;
    WideReal prev = 1;
    WideReal cur = x;
    for (long n = 2; n <= m; ++n) {
        const WideReal next = ((2 * WideReal(n) - 1) * x * cur - (WideReal(n) - 1) * prev) / WideReal(n);
        prev = cur;
        cur = next;
    }
    return cur;
}

inline double legendre(long m, double x) { return static_cast<double>(legendre_wide(m, x)); }

/// Closed Legendre form of R^m, independent of the recurrence in KernelTable.
inline Complex kernel_legendre_oracle(Complex kappa, double mu, std::size_t m)
{
    detail::require(mu >= -1.0 && mu <= 1.0, "kernel_legendre_oracle: mu must lie in [-1, 1]");
    using detail::WideReal;
    const long n = static_cast<long>(m);
    const WideReal diff = legendre_wide(n, mu) - legendre_wide(n - 2, mu);
    const WideReal scale = -diff / (2 * WideReal(n) - 1);
    return (scale * detail::wide_pow(detail::WideComplex(kappa), m)).narrow();
}

/// Leading term of R^m(kappa_theta, mu_theta) as m -> infinity:
///
///   (-1)^m m^{-3/2} sqrt((2/pi) sin phi) e^{i m (arg a^ + arg alpha~)} cos((m - 1/2) phi - 3pi/4),
///
/// phi = arg0 a^ - arg0 alpha~ in (0, pi). This follows from the Laplace
/// formula for P_m(cos phi); the remainder is O(m^{-5/2}).
inline Complex kernel_asymptotic(const HatA& a, Complex alpha_tilde, std::size_t m, double min_margin = 1e-3)
{
    detail::require(m >= 1, "kernel_asymptotic: m must be positive");
    const Complex av = a.value();
    const double phi = std::arg(av) - std::arg(alpha_tilde);
    const double mu = std::cos(phi);
    if (1.0 - std::abs(mu) < min_margin) {
        throw NumericalError("kernel_asymptotic: |mu| too close to 1 for the asymptotic regime");
    }
    const double md = static_cast<double>(m);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    const double amplitude = sign / std::pow(md, 1.5) * std::sqrt((2.0 / std::numbers::pi) * std::sin(phi));
    const double phase = md * (std::arg(av) + std::arg(alpha_tilde));
    const double wave = std::cos((md - 0.5) * (arg0(av) - arg0(alpha_tilde)) - 0.75 * std::numbers::pi);
    return amplitude * std::polar(1.0, phase) * wave;
}

struct AdmissibilityReport {
    double cond1 = 0.0;     // tau |V_inf| / (hbar rho_inf)
    double cond2 = 0.0;     // (1 - 4 theta) (rho_inf / (hbar B_inf)) h^2 / tau
    double mu_margin = 0.0; // 1 - |mu_theta|
    bool pass = false;
};

/// Sufficient conditions for |mu_theta| <= 1 - delta(A).
inline AdmissibilityReport admissibility(double theta, double h, double tau, const TailConstants& tail,
                                         double bound)
{
    detail::require(theta <= 0.25, "admissibility: theta must not exceed 1/4");
    detail::require(bound >= 1.0, "admissibility: A must be >= 1");
    AdmissibilityReport r;
    r.cond1 = tau * std::abs(tail.V_inf) / (tail.hbar * tail.rho_inf);
    r.cond2 = (1.0 - 4.0 * theta) * (tail.rho_inf / (tail.hbar * tail.B_inf)) * h * h / tau;
    r.mu_margin = 1.0 - std::abs(dtbc_parameters(theta, h, tau, tail).mu);
    r.pass = r.cond1 <= bound && r.cond2 <= bound;
    return r;
}

/// Delta_theta = 2 arg0(1 - 2 theta h^2 a^) - arg0 alpha^; its window fixes
/// the minus sign of c0 for theta <= 1/4.
inline double delta_theta(double theta, double h, double tau, const TailConstants& tail)
{
    detail::require(theta <= 0.25, "delta_theta: theta must not exceed 1/4");
    const HatA a = hat_a(tail, tau);
    const auto dec = alpha_decomposition(theta, h, a);
    const Complex shifted = 1.0 - 2.0 * theta * h * h * a.value();
    return 2.0 * arg0(shifted) - (arg0(a.value()) + arg0(dec.alpha_tilde));
}

/// True when Delta_theta lies in (-2pi, 0) for theta <= 0 or (2pi, 4pi) for 0 < theta <= 1/4.
inline bool delta_theta_in_window(double theta, double delta)
{
    if (theta <= 0.0) return delta > -kTwoPi && delta < 0.0;
    return delta > kTwoPi && delta < 2.0 * kTwoPi;
}

inline double checked_delta_theta(double theta, double h, double tau, const TailConstants& tail)
{
    const double d = delta_theta(theta, h, tau, tail);
    if (!delta_theta_in_window(theta, d)) {
        throw NumericalError("delta_theta: " + std::to_string(d) + " outside its window for theta = " +
                             std::to_string(theta) + "; sign/branch computation is wrong");
    }
    return d;
}

/// Upper bound on |c0_theta R^m_theta - c0_D R^m_D|.
inline double divergence_bound(double theta, double h, double tau, const TailConstants& tail, std::size_t m)
{
    detail::require(theta <= 0.25, "divergence_bound: theta must not exceed 1/4");
    const HatA a = hat_a(tail, tau);
    const double abs_t = std::abs(alpha_decomposition(theta, h, a).alpha_tilde);
    const double abs_a = std::abs(a.value());
    const double denom = std::abs(2.0 * static_cast<double>(m) - 1.0) * (std::sqrt(abs_t) + std::sqrt(2.0));
    return (3.0 * std::sqrt(2.0) / abs_t + 1.0 / denom) * (1.0 - 4.0 * theta) * h * h * std::pow(abs_a, 1.5);
}

/// c0 * sum_{l=0}^{m-1} R^l Phi^{m-l}, where history[k-1] holds Phi^k and Phi^0 = 0.
inline Complex convolve(Complex c0, const KernelTable& table, std::span<const Complex> history, std::size_t m)
{
    detail::require(history.size() >= m, "convolve: history shorter than m");
    detail::require(m <= table.size(), "convolve: m exceeds kernel table");
    Complex sum = 0.0;
    for (std::size_t l = 0; l < m; ++l) sum += table[l] * history[m - l - 1];
    return c0 * sum;
}

/// sum_{l=1}^{m-1} R^l Phi^{m-l}: the part of the convolution at level m that
/// only involves past values (history holds Phi^1..Phi^{m-1}).
inline Complex convolution_tail(const KernelTable& table, std::span<const Complex> history)
{
    const std::size_t m = history.size() + 1;
    detail::require(m <= table.size(), "convolution_tail: kernel table too short");
    Complex sum = 0.0;
    for (std::size_t l = 1; l < m; ++l) sum += table[l] * history[m - l - 1];
    return sum;
}

/// CSV rows "theta,m,re_R,im_R,abs_c0R" for m = 0..last.
inline void write_kernel_csv(std::ostream& out, double theta, const KernelTable& table, bool header = true)
{
    if (header) out << "theta,m,re_R,im_R,abs_c0R\n";
    const double abs_c0 = std::abs(table.c0());
    for (std::size_t m = 0; m < table.size(); ++m) {
        write_csv_row(out, theta, m, table[m].real(), table[m].imag(), abs_c0 * std::abs(table[m]));
    }
}

} // namespace tbc
