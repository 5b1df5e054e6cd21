#ifndef MWCUT_ERRORS_HPP
#define MWCUT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mwcut {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mismatched matrix/vector shapes.
struct DimensionError : Error {
    using Error::Error;
};

/// Invalid configuration or argument value.
struct ParameterError : Error {
    using Error::Error;
};

/// A partition that violates terminal pinning or label bounds.
struct InvalidPartitionError : Error {
    using Error::Error;
};

/// Non-finite value produced during iteration; `row` is the offending
/// vertex when known, -1 otherwise.
struct NumericError : Error {
    int row = -1;
    explicit NumericError(const std::string& msg, int row_ = -1)
        : Error(msg), row(row_) {}
};

/// Enumeration would exceed the configured budget.
struct BudgetError : Error {
    using Error::Error;
};

/// Coordinates outside the valid range (e.g. bounding box off-image).
struct BoundsError : Error {
    using Error::Error;
};

/// Malformed input file; `line` is 1-based when known, 0 otherwise.
struct ParseError : Error {
    int line = 0;
    explicit ParseError(const std::string& msg, int line_ = 0)
        : Error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
          line(line_) {}
};

}  // namespace mwcut

#endif  // MWCUT_ERRORS_HPP
