#ifndef KERR4LS_ERRORS_HPP
#define KERR4LS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kerr4ls {

// Bad run configuration (CLI exit code 2).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Physics-guard violation: Raman resonance broken, degenerate subspace,
// small perturbation denominators (CLI exit code 3).
class physics_error : public std::runtime_error {
public:
    explicit physics_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Eigensolver failure or non-Hermitian input (CLI exit code 4).
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace kerr4ls

#endif
