#pragma once

#include <stdexcept>
#include <string>

namespace settol {

/// Caller violated a documented precondition (bad indices, overlapping sets,
/// malformed requests). Maps to CLI exit code 2.
class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input file could not be read or parsed. Maps to CLI exit code 1.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An invariant the library guarantees was observed to fail. Maps to CLI
/// exit code 3.
class internal_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A linear program with an empty feasible region. The tolerance engine only
/// builds feasible programs, so seeing this from engine code means the
/// construction upstream is broken; it is never a tolerance value.
class infeasible_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace settol
