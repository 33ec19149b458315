#pragma once

#include <stdexcept>

namespace lrsr {

/// Invalid parameters, shapes, or violated preconditions detected up front.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file; the message carries the 1-based line number.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lrsr
