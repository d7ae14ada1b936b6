#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace garma {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A ModelSpec, option struct or argument violates its invariants.
class InvalidSpec : public Error {
public:
    using Error::Error;
};

/// Input data is malformed (bad CSV, wrong length, missing values).
class IngestionError : public Error {
public:
    IngestionError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    explicit IngestionError(const std::string& what) : Error(what) {}

    /// 1-based line number, 0 when not tied to a line.
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

/// Values parse but fail validation (non-integer or negative counts, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Base for failures of the numerical machinery.
class NumericError : public Error {
public:
    using Error::Error;
};

/// The linear predictor exceeded the overflow guard at time index `index` (0-based).
class NumericOverflow : public NumericError {
public:
    NumericOverflow(std::size_t index, double eta)
        : NumericError("linear predictor overflow at t=" + std::to_string(index + 1) +
                       " (eta=" + std::to_string(eta) + ")"),
          index_(index) {}

    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// The conditional information matrix is not invertible.
class SingularInformation : public NumericError {
public:
    using NumericError::NumericError;
};

/// Fisher scoring kept hitting singular information matrices.
class NonIdentifiable : public NumericError {
public:
    using NumericError::NumericError;
};

/// Every forecast candidate failed to refit.
class ForecastFailure : public NumericError {
public:
    using NumericError::NumericError;
};

/// The m-step enumeration lattice would exceed the configured budget.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(std::size_t budget)
        : Error("m-step lattice exceeds budget of " + std::to_string(budget) + " tuples"),
          budget_(budget) {}

    [[nodiscard]] std::size_t budget() const noexcept { return budget_; }

private:
    std::size_t budget_;
};

}  // namespace garma
