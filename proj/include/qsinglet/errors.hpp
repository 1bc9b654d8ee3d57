#pragma once

#include <stdexcept>
#include <string>

namespace qsinglet {

// Bad argument to a library operation (index out of range, dimension
// mismatch, unsupported size).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed external input (network JSON, non-unitary basis matrix).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A documented operation precondition does not hold (e.g. disconnected
// network passed to the ground-state solver).
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Iterative eigensolver ran out of iterations.
struct ConvergenceError : std::runtime_error {
    int iterations;
    ConvergenceError(const std::string& msg, int iters)
        : std::runtime_error(msg + " (after " + std::to_string(iters) + " iterations)"),
          iterations(iters) {}
};

// State vector is numerically unusable (e.g. every outcome probability
// vanished).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Perturbative comparison requested outside its regime of validity.
struct RegimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Search budget exhausted; carries the best bound established so far.
struct BudgetError : std::runtime_error {
    int best_so_far;
    BudgetError(const std::string& msg, int best)
        : std::runtime_error(msg), best_so_far(best) {}
};

}  // namespace qsinglet
