#pragma once

#include <stdexcept>
#include <string>

namespace dnlkpp {

// Invalid user input: parameters, configs, unsupported regimes. CLI exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation failed to converge or left its domain of validity. CLI exit code 3.
struct numerics_error : std::runtime_error {
    explicit numerics_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dnlkpp
