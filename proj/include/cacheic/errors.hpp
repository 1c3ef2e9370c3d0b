#pragma once

#include <stdexcept>
#include <string>

namespace cacheic {

// Invalid parameter or out-of-domain input.  CLI exit code 2.
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Enumeration or size guard exceeded.  CLI exit code 3.
struct guard_error : std::runtime_error {
    explicit guard_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure that should not happen for sane inputs.  CLI exit code 4.
struct internal_error : std::runtime_error {
    explicit internal_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cacheic
