#pragma once

#include <stdexcept>
#include <string>

namespace lognls {

// Base class for all library failures.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A Field was used with a grid it was not built on.
struct grid_mismatch : error {
    using error::error;
};

// Computation requested outside the analyzed parameter regime.  The CLI maps
// this to a distinct exit code: it is a refusal, not a numerical failure.
struct regime_error : error {
    using error::error;
};

// Config file rejected; carries the offending line number (1-based, 0 = n/a).
struct config_error : error {
    int line = 0;
    config_error(const std::string& msg, int line_) : error(msg), line(line_) {}
};

} // namespace lognls
