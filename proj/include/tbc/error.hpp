#pragma once

#include <stdexcept>
#include <string>

namespace tbc {

/// Bad input: parameters outside their admissible range, malformed config,
/// mismatched sizes. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation that could not complete (zero pivot, residual blow-up,
/// degenerate kernel). The CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw ValidationError(what);
}

} // namespace detail
} // namespace tbc
