#pragma once

#include <stdexcept>
#include <string>

namespace corpusmap {

// Invalid arguments, malformed files, violated preconditions. CLI exit code 1.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerically undefined results and runtime failures. CLI exit code 2.
struct ComputeError : std::runtime_error {
    explicit ComputeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace corpusmap
