/**
 * @file errors.hpp
 * @brief Exception types shared by every conespec module.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace conespec {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (config files, catalog parameters).
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical kernel could not deliver a result within its budget.
class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace conespec
