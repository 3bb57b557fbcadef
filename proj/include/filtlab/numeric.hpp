#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "filtlab/errors.hpp"

namespace filtlab {

// Tolerances used throughout the test suites.  Exact identities are compared
// at 1e-10 relative; one-sided inequalities get a multiplicative slack of
// 1 + 1e-9 so that float dust on a mathematically tight bound never trips.
inline constexpr double kIdentityRelTol = 1e-10;
inline constexpr double kInequalitySlack = 1e-9;

inline bool nearly_equal(double a, double b, double rtol = kIdentityRelTol) {
    const double d = std::abs(a - b);
    return d <= rtol * std::max(std::abs(a), std::abs(b)) + 1e-30;
}

/// lhs <= rhs up to relative slack, with a tiny absolute floor so that
/// "0 <= 0" survives rounding.
inline bool leq_with_slack(double lhs, double rhs, double slack = kInequalitySlack) {
    return lhs <= rhs + slack * std::abs(rhs) + 1e-15 * std::max(1.0, std::abs(rhs));
}

/// p' = p/(p-1).  Rejects p <= 1 and p within 1e-12 of 1, where the
/// conjugate exponent is meaningless or numerically explosive.
inline double conjugate_exponent(double p) {
    if (!std::isfinite(p) || p <= 1.0 || std::abs(p - 1.0) <= 1e-12)
        throw ParameterError("exponent p must be finite and greater than 1 (got " + std::to_string(p) + ")");
    return p / (p - 1.0);
}

/// Shortest exact decimal form used for CSV output and hashing.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace filtlab
