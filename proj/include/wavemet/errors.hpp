#pragma once

#include <stdexcept>
#include <string>

namespace wavemet {

// Bad inputs: shapes, grids, parameter ranges. CLI maps this to exit 2.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// The math could not proceed (all bins singular, degenerate geometry). Exit 3.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// File-system problems. Exit 4.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wavemet
