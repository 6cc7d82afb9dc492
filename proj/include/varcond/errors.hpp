#pragma once

#include <stdexcept>
#include <string>

namespace varcond {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Expression text that does not conform to the grammar, or names an
// unknown/ill-formed identifier.  `position` is a 0-based byte offset
// into the offending string.
struct ParseError : Error {
    ParseError(std::string message, std::size_t position)
        : Error(std::move(message)), position(position) {}
    std::size_t position = 0;
};

// Index or coordinate outside of a layout.
struct AddressError : Error {
    using Error::Error;
};

// Constraint / multiplier / component count mismatch.
struct ArityError : Error {
    using Error::Error;
};

// log of a non-positive value, division by zero, sqrt of a negative, ...
// `where` holds the printed offending subexpression.
struct EvalError : Error {
    EvalError(std::string message, std::string where)
        : Error(message + " in `" + where + "`"), where(std::move(where)) {}

    struct preformatted {};
    EvalError(preformatted, std::string full_message, std::string where)
        : Error(std::move(full_message)), where(std::move(where)) {}

    std::string where;
};

// Matrix handed to an operation that expects a different shape/symmetry.
struct ShapeError : Error {
    using Error::Error;
};

// Iterative numeric routine failed to converge.
struct NumericError : Error {
    using Error::Error;
};

// Bump support sticking out of the problem domain.
struct PlacementError : Error {
    using Error::Error;
};

// Problem file that cannot be loaded.  `line` is 1-based.
struct FileError : Error {
    FileError(std::string message, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                         : std::move(message)),
          line(line) {}
    int line = 0;
};

}  // namespace varcond
