#pragma once

#include <stdexcept>
#include <string>

namespace vch {

// Raised when a configuration or argument violates a documented precondition.
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an integration run leaves the trusted regime (blow-up detector,
// inner iteration stall) and no further state can be produced.
struct solver_abort : std::runtime_error {
    explicit solver_abort(const std::string& what) : std::runtime_error(what) {}
};

// Raised on filesystem trouble: unreadable config, unwritable output directory.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace vch
