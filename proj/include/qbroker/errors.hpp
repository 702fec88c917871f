#pragma once

#include <stdexcept>
#include <string>

namespace qbroker {

/// File-system / parse failures (CLI exit code 3).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact-oracle state budget exceeded.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qbroker
