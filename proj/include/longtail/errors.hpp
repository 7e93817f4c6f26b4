#pragma once

#include <stdexcept>
#include <string>

namespace longtail {

// Bad option values, malformed config files, invalid hyperparameters. CLI exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent data: bad CSV rows, dimension mismatches,
// degenerate classes. CLI exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem failures. CLI exit code 3.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace longtail
