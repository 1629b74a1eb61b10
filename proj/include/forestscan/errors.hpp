#pragma once

#include <stdexcept>

namespace forestscan {

// Invalid user-supplied configuration (CLI exit code 1).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable/unwritable/malformed files (CLI exit code 2).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace forestscan
