#pragma once

#include <stdexcept>
#include <string>

namespace rdsphere {

// Input violates a documented precondition.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical routine did not reach its accuracy target.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A size cap (degree, tree leaves, table size) would be exceeded.
struct CapacityError : std::length_error {
    using std::length_error::length_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw PreconditionError(what);
}

}  // namespace rdsphere
