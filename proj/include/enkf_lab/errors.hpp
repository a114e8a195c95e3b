#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace enkf_lab {

/// Precondition violated by the caller (dimension mismatch, bad count, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A factorization or solve could not proceed because the matrix is singular
/// or not positive definite.
class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A propagated state became non-finite. `index` is the integrator substep,
/// ensemble member or assimilation step, depending on where it was raised.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::size_t index)
        : std::runtime_error(what + " (index " + std::to_string(index) + ")"), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace enkf_lab
