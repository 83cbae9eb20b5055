#pragma once

#include <stdexcept>
#include <string>

namespace fkcell {

// Operational failures (mesh resolution, iterative solver, quadrature,
// root bracketing). Input/validation problems use std::domain_error or
// std::invalid_argument instead; the CLI maps the two families to
// different exit codes.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoBracketError : SolverError {
    explicit NoBracketError(const std::string& msg) : SolverError(msg) {}
};

struct NonConvergenceError : SolverError {
    explicit NonConvergenceError(const std::string& msg) : SolverError(msg) {}
};

struct ResolutionError : SolverError {
    explicit ResolutionError(const std::string& msg) : SolverError(msg) {}
};

struct QuadratureError : SolverError {
    explicit QuadratureError(const std::string& msg) : SolverError(msg) {}
};

}  // namespace fkcell
