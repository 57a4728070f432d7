#pragma once

// Shortest round-trip number formatting for CSV output.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <system_error>

namespace tbc {

inline std::string format_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

/// Three significant digits in scientific notation, e.g. "1.90e-04".
inline std::string format_sig3(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 2);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

/// Writes values separated by commas followed by a newline.
template <typename... Ts>
void write_csv_row(std::ostream& out, const Ts&... values)
{
    std::size_t i = 0;
    auto put = [&](const auto& v) {
        if (i++ > 0) out << ',';
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>)
            out << format_double(static_cast<double>(v));
        else
            out << v;
    };
    (put(values), ...);
    out << '\n';
}

} // namespace tbc
