#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zipper {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration (fold count, slider, learner spec, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

class DefinitenessError : public Error {
public:
    DefinitenessError(std::size_t pivot, const std::string& what)
        : Error(what), pivot_(pivot) {}
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

// A testing fold cannot be divided into the requested zipper split.
class SplitError : public Error {
public:
    using Error::Error;
};

class SingularDesignError : public Error {
public:
    SingularDesignError(std::string column, const std::string& what)
        : Error(what), column_(std::move(column)) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class DegenerateSampleError : public Error {
public:
    using Error::Error;
};

class DegenerateVarianceError : public Error {
public:
    using Error::Error;
};

// Request exceeds what an algorithm is willing to do (e.g. exhaustive search size).
class CapabilityError : public Error {
public:
    using Error::Error;
};

class LearnerError : public Error {
public:
    LearnerError(std::size_t fold, const std::string& what)
        : Error(what), fold_(fold) {}
    std::size_t fold() const noexcept { return fold_; }

private:
    std::size_t fold_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& what)
        : Error(what), row_(row), column_(column) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

class IngestionError : public Error {
public:
    using Error::Error;
};

}  // namespace zipper
