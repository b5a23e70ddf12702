#pragma once

#include <stdexcept>
#include <string>

namespace hexcross {

// Malformed input: unknown domain spec, boundary condition not covering the
// exterior ring, degenerate partitions and the like.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Exhaustive enumeration refused because the domain exceeds the cap.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

// A documented precondition of a check does not hold (e.g. incomparable
// boundary conditions handed to a CBC check).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace hexcross
