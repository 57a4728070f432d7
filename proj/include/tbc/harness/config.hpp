#pragma once

// Run configuration and its line-oriented `key = value` file format:
//
//   # comment
//   [scheme]
//   theta = 1/12
//   [boundary]
//   kind = dtbc            # dtbc | sdtbc | isdtbc | custom
//   theta_flux = 1/12      # custom only
//   kernel = discrete      # custom only: discrete | semidiscrete
//   kernel_theta = 1/12    # custom + discrete only
//   [mesh]
//   X = 1.5
//   J = 800
//   [time]
//   T = 0.006
//   M = 6000
//   [physics]
//   hbar = 1
//   rho = 1
//   B = 2
//   V = 0
//   X0 = 1.49625           # optional; defaults to X - 2h
//   [packet]
//   k = 100
//   alpha = 1/120
//   x0 = 0.8
//   [output]
//   dir = out
//   snapshots = 0,3000,6000
//   preset = table1-dtbc-J800 # informational label
//
// Every key is optional; missing ones keep the defaults below (the Gaussian
// packet benchmark with the Numerov scheme and its discrete TBC).

#include "tbc/analytic.hpp"
#include "tbc/csv.hpp"
#include "tbc/error.hpp"
#include "tbc/solver.hpp"

#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace tbc::harness {

enum class BoundaryPreset { DTBC, SDTBC, ISDTBC };

inline std::string to_string(BoundaryPreset p)
{
    switch (p) {
    case BoundaryPreset::DTBC: return "dtbc";
    case BoundaryPreset::SDTBC: return "sdtbc";
    case BoundaryPreset::ISDTBC: return "isdtbc";
    }
    return "?";
}

inline BoundaryConfig resolve(BoundaryPreset p, double theta)
{
    switch (p) {
    case BoundaryPreset::DTBC: return BoundaryConfig::dtbc(theta);
    case BoundaryPreset::SDTBC: return BoundaryConfig::sdtbc(theta);
    case BoundaryPreset::ISDTBC: return BoundaryConfig::isdtbc();
    }
    return {};
}

/// Name of the preset that produces `b` for interior parameter theta, if any.
inline std::optional<BoundaryPreset> match_preset(const BoundaryConfig& b, double theta)
{
    for (auto p : {BoundaryPreset::DTBC, BoundaryPreset::SDTBC, BoundaryPreset::ISDTBC}) {
        if (resolve(p, theta) == b) return p;
    }
    return std::nullopt;
}

struct RunConfig {
    double theta = 1.0 / 12.0;
    BoundaryConfig boundary = BoundaryConfig::dtbc(1.0 / 12.0);
    double X = 1.5;
    std::size_t J = 800;
    double T = 0.006;
    std::size_t M = 6000;
    double hbar = 1.0;
    double rho = 1.0;
    double B = 2.0;
    double V = 0.0;
    std::optional<double> tail_start;
    GaussianParams packet;
    std::string output_dir = "out";
    std::set<std::size_t> snapshots;
    std::string preset;

    double h() const { return X / static_cast<double>(J); }
    double tau() const { return M == 0 ? T : T / static_cast<double>(M); }
    double effective_tail_start() const { return tail_start.value_or(X - 2.0 * h()); }

    SchemeConfig scheme() const
    {
        auto mesh = SpaceMesh::uniform(X, J);
        auto grid = TimeGrid::from_horizon(T, M);
        auto phys = PhysicalParams::constant(mesh, hbar, rho, B, V, effective_tail_start());
        SchemeConfig cfg{theta, boundary, std::move(mesh), grid, std::move(phys)};
        cfg.validate();
        return cfg;
    }

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_plain_double(std::string_view s)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

} // namespace detail

/// Accepts decimals and simple fractions such as "1/12".
inline std::optional<double> parse_number(std::string_view s)
{
    s = detail::trim(s);
    if (s.empty()) return std::nullopt;
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = detail::parse_plain_double(detail::trim(s.substr(0, slash)));
        auto den = detail::parse_plain_double(detail::trim(s.substr(slash + 1)));
        if (!num || !den || *den == 0.0) return std::nullopt;
        return *num / *den;
    }
    return detail::parse_plain_double(s);
}

inline std::optional<std::size_t> parse_count(std::string_view s)
{
    s = detail::trim(s);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

/// Comma separated non-negative integers.
inline std::optional<std::set<std::size_t>> parse_levels(std::string_view s)
{
    std::set<std::size_t> out;
    s = detail::trim(s);
    if (s.empty()) return out;
    while (true) {
        const auto comma = s.find(',');
        auto v = parse_count(s.substr(0, comma));
        if (!v) return std::nullopt;
        out.insert(*v);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

inline RunConfig parse_config(std::istream& in, const std::string& source = "config")
{
    RunConfig cfg;
    std::string section;
    std::string line;
    std::size_t lineno = 0;

    std::optional<std::string> kind;
    std::optional<double> theta_flux;
    std::optional<std::string> kernel;
    std::optional<double> kernel_theta;
    std::size_t kind_line = 0;

    auto fail = [&](const std::string& msg) -> void {
        // lineno 0: a whole-file check, no single line to blame
        throw ValidationError(source + (lineno ? ":" + std::to_string(lineno) : std::string()) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = detail::trim(view);
        if (view.empty()) continue;
        if (view.front() == '[') {
            if (view.back() != ']') fail("malformed section header '" + std::string(view) + "'");
            section = std::string(detail::trim(view.substr(1, view.size() - 2)));
            static const std::set<std::string> known{"scheme", "boundary", "mesh", "time", "physics", "packet", "output"};
            if (!known.count(section)) fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) fail("expected 'key = value', got '" + std::string(view) + "'");
        const std::string key(detail::trim(view.substr(0, eq)));
        const std::string_view value = detail::trim(view.substr(eq + 1));
        if (section.empty()) fail("key '" + key + "' outside of any section");

        auto number = [&]() {
            auto v = parse_number(value);
            if (!v) fail("key '" + key + "': expected a number, got '" + std::string(value) + "'");
            return *v;
        };
        auto count = [&]() {
            auto v = parse_count(value);
            if (!v) fail("key '" + key + "': expected a non-negative integer, got '" + std::string(value) + "'");
            return *v;
        };
        auto unknown = [&]() { fail("unknown key '" + key + "' in [" + section + "]"); };

        if (section == "scheme") {
            if (key == "theta") cfg.theta = number();
            else unknown();
        } else if (section == "boundary") {
            if (key == "kind") { kind = std::string(value); kind_line = lineno; }
            else if (key == "theta_flux") theta_flux = number();
            else if (key == "kernel") kernel = std::string(value);
            else if (key == "kernel_theta") kernel_theta = number();
            else unknown();
        } else if (section == "mesh") {
            if (key == "X") cfg.X = number();
            else if (key == "J") cfg.J = count();
            else unknown();
        } else if (section == "time") {
            if (key == "T") cfg.T = number();
            else if (key == "M") cfg.M = count();
            else unknown();
        } else if (section == "physics") {
            if (key == "hbar") cfg.hbar = number();
            else if (key == "rho") cfg.rho = number();
            else if (key == "B") cfg.B = number();
            else if (key == "V") cfg.V = number();
            else if (key == "X0") cfg.tail_start = number();
            else unknown();
        } else if (section == "packet") {
            if (key == "k") cfg.packet.k = number();
            else if (key == "alpha") cfg.packet.alpha = number();
            else if (key == "x0") cfg.packet.center = number();
            else unknown();
        } else if (section == "output") {
            if (key == "dir") cfg.output_dir = std::string(value);
            else if (key == "snapshots") {
                auto v = parse_levels(value);
                if (!v) fail("key 'snapshots': expected comma separated levels, got '" + std::string(value) + "'");
                cfg.snapshots = *v;
            } else if (key == "preset") cfg.preset = std::string(value);
            else unknown();
        }
    }

    lineno = kind_line;
    const std::string k = kind.value_or("dtbc");
    if (k == "dtbc") cfg.boundary = BoundaryConfig::dtbc(cfg.theta);
    else if (k == "sdtbc") cfg.boundary = BoundaryConfig::sdtbc(cfg.theta);
    else if (k == "isdtbc") cfg.boundary = BoundaryConfig::isdtbc();
    else if (k == "custom") {
        BoundaryConfig b;
        b.theta_flux = theta_flux.value_or(cfg.theta);
        const std::string kk = kernel.value_or("discrete");
        if (kk == "discrete") b.kernel = {KernelKind::DiscreteTheta, kernel_theta.value_or(cfg.theta)};
        else if (kk == "semidiscrete") b.kernel = {KernelKind::SemiDiscrete, 0.25};
        else fail("key 'kernel': expected discrete or semidiscrete, got '" + kk + "'");
        cfg.boundary = b;
    } else {
        fail("key 'kind': expected dtbc, sdtbc, isdtbc or custom, got '" + k + "'");
    }
    if (k != "custom" && (theta_flux || kernel || kernel_theta)) {
        fail("keys 'theta_flux', 'kernel', 'kernel_theta' require kind = custom");
    }

    lineno = 0;
    if (!(cfg.theta <= 0.25)) fail("key 'theta': must not exceed 1/4");
    if (cfg.J < 3) fail("key 'J': need at least 3 intervals");
    if (!(cfg.X > 0.0)) fail("key 'X': must be positive");
    if (!(cfg.T > 0.0)) fail("key 'T': must be positive");
    if (!(cfg.hbar > 0.0) || !(cfg.rho > 0.0) || !(cfg.B > 0.0)) fail("keys 'hbar', 'rho', 'B': must be positive");
    if (!(cfg.packet.alpha > 0.0)) fail("key 'alpha': must be positive");
    try {
        cfg.boundary.validate();
    } catch (const ValidationError& e) {
        fail(e.what());
    }
    return cfg;
}

inline RunConfig parse_config_string(const std::string& text, const std::string& source = "config")
{
    std::istringstream in(text);
    return parse_config(in, source);
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

inline std::string serialize_config(const RunConfig& cfg)
{
    std::ostringstream out;
    out << "[scheme]\ntheta = " << format_double(cfg.theta) << "\n\n[boundary]\n";
    if (auto p = match_preset(cfg.boundary, cfg.theta)) {
        out << "kind = " << to_string(*p) << "\n";
    } else {
        out << "kind = custom\ntheta_flux = " << format_double(cfg.boundary.theta_flux) << "\n";
        if (cfg.boundary.kernel.kind == KernelKind::SemiDiscrete) {
            out << "kernel = semidiscrete\n";
        } else {
            out << "kernel = discrete\nkernel_theta = " << format_double(cfg.boundary.kernel.theta) << "\n";
        }
    }
    out << "\n[mesh]\nX = " << format_double(cfg.X) << "\nJ = " << cfg.J << "\n";
    out << "\n[time]\nT = " << format_double(cfg.T) << "\nM = " << cfg.M << "\n";
    out << "\n[physics]\nhbar = " << format_double(cfg.hbar) << "\nrho = " << format_double(cfg.rho)
        << "\nB = " << format_double(cfg.B) << "\nV = " << format_double(cfg.V) << "\n";
    if (cfg.tail_start) out << "X0 = " << format_double(*cfg.tail_start) << "\n";
    out << "\n[packet]\nk = " << format_double(cfg.packet.k) << "\nalpha = " << format_double(cfg.packet.alpha)
        << "\nx0 = " << format_double(cfg.packet.center) << "\n";
    out << "\n[output]\ndir = " << cfg.output_dir << "\n";
    if (!cfg.snapshots.empty()) {
        out << "snapshots = ";
        bool first = true;
        for (auto m : cfg.snapshots) {
            out << (first ? "" : ",") << m;
            first = false;
        }
        out << "\n";
    }
    if (!cfg.preset.empty()) out << "preset = " << cfg.preset << "\n";
    return out.str();
}

} // namespace tbc::harness
