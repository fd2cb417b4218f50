#pragma once

#include <stdexcept>
#include <string>

namespace hemi {

/// Malformed or inadmissible input (bad parameters, domain outside a hemisphere, ...).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure failed to converge or broke down.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hemi
