#pragma once

#include <stdexcept>
#include <string>

namespace chowcalc {

// Bad or inconsistent input data (files, mismatched rings, invalid models).
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// A configurable resource guard tripped (generator budget, step budget).
class guard_error : public std::runtime_error {
public:
    explicit guard_error(const std::string& what) : std::runtime_error(what) {}
};

// An internal invariant failed; indicates a bug or a model that violates
// a hypothesis the construction relies on.
class internal_error : public std::runtime_error {
public:
    explicit internal_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace chowcalc
