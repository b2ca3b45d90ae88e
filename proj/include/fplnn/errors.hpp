#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fplnn {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments: dimension mismatch, violated preconditions, malformed regions.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// An iterate became non-finite or exceeded the magnitude guard.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t iteration, const std::string& what)
        : Error("diverged at iteration " + std::to_string(iteration) + ": " + what),
          iteration_(iteration) {}

    [[nodiscard]] std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

/// Requested grid exceeds the evaluation budget.
class GridTooLarge : public Error {
public:
    using Error::Error;
};

/// A contraction constant does not satisfy the hypothesis of the bound being evaluated.
class HypothesisViolation : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Fixed-point candidate refinement did not reach the validation threshold.
class RefinementFailure : public Error {
public:
    RefinementFailure(std::size_t candidate, const std::string& what)
        : Error("candidate " + std::to_string(candidate) + ": " + what), candidate_(candidate) {}

    [[nodiscard]] std::size_t candidate() const noexcept { return candidate_; }

private:
    std::size_t candidate_;
};

}  // namespace fplnn
