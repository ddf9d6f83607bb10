#pragma once

#include <stdexcept>
#include <string>

namespace nlslab {

/// Invalid mathematical input (e.g. non-positive argument of a Bernstein function).
struct domain_error : std::invalid_argument {
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid configuration (grid too coarse, degenerate sampling, bad parameter file).
struct config_error : std::invalid_argument {
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure failed to converge or left its validity regime.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nlslab
