#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace badapprox {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t a, std::size_t b)
        : Error("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

/// Exact comparison would need integers larger than the configured budget.
class ComparisonBudgetExceeded : public Error {
public:
    ComparisonBudgetExceeded() : Error("comparison budget exceeded") {}
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

/// Rationals of a host cube span the whole space; the Simplex Lemma forbids this.
class SimplexViolation : public Error {
public:
    using Error::Error;
};

class StageOutOfRange : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class SeedFailure : public Error {
public:
    using Error::Error;
};

class CoverageShortfall : public Error {
public:
    CoverageShortfall(std::string g, double ratio, std::string detail)
        : Error("coverage shortfall at G=" + g + " (achieved ratio " + std::to_string(ratio) + "): " + detail),
          achieved_ratio(ratio) {}
    double achieved_ratio;
};

class NestingFailure : public Error {
public:
    using Error::Error;
};

}  // namespace badapprox
