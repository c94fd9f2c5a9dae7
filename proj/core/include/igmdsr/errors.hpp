#pragma once

#include <stdexcept>
#include <string>

namespace igmdsr {

// Error taxonomy shared by the whole library. The CLI maps these onto
// process exit codes: input 1, parameter 2, numeric 3.

struct shape_error : std::runtime_error {
    explicit shape_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct parameter_error : std::runtime_error {
    explicit parameter_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace igmdsr
