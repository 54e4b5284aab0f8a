#pragma once

#include <stdexcept>
#include <string>

namespace uplift {

/// Invalid or inconsistent input data (CSV parsing, invariant violations).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Model fitting failed (degenerate stage inputs, optimizer breakdown).
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace uplift
