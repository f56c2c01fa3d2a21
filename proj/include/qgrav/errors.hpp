#pragma once

#include <stdexcept>
#include <string>

namespace qgrav {

struct config_error : std::runtime_error {
    explicit config_error(const std::string& m) : std::runtime_error(m) {}
};

// Exponent has mechanical content the splitter cannot factor (quadratic or
// higher in the ladder operators), or inconsistent conjugate structure.
struct unsupported_exponent : std::runtime_error {
    explicit unsupported_exponent(const std::string& m) : std::runtime_error(m) {}
};

struct order_out_of_range : std::runtime_error {
    order_out_of_range(const std::string& m, int required) : std::runtime_error(m), required_order(required) {}
    int required_order;
};

struct window_too_large : std::runtime_error {
    explicit window_too_large(const std::string& m) : std::runtime_error(m) {}
};

struct cutoff_exceeded : std::runtime_error {
    explicit cutoff_exceeded(const std::string& m) : std::runtime_error(m) {}
};

struct unknown_loop_inversion : std::runtime_error {
    explicit unknown_loop_inversion(const std::string& m) : std::runtime_error(m) {}
};

struct no_solution : std::runtime_error {
    no_solution(const std::string& m, int max_feasible) : std::runtime_error(m), max_feasible_targets(max_feasible) {}
    int max_feasible_targets;
};

struct symbolic_budget_exceeded : std::runtime_error {
    explicit symbolic_budget_exceeded(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace qgrav
