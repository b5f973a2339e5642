#pragma once

#include <stdexcept>
#include <string>

namespace ecoswitch {

/// Error categories surfaced to the command line as distinct exit codes.
enum class ErrorCategory {
    validation = 2,
    io = 3,
    internal = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// A value is outside its documented domain (confidence > 1, negative energy, ...).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what)
        : Error(ErrorCategory::validation, what) {}
};

/// A configuration cannot be used as given (k < 1, empty model set, unknown policy, ...).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what)
        : Error(ErrorCategory::validation, what) {}
};

/// Log entries appended out of request-id order.
class OrderingError : public Error {
public:
    explicit OrderingError(const std::string& what)
        : Error(ErrorCategory::validation, what) {}
};

/// A statistic was requested over an empty window or log.
class NoDataError : public Error {
public:
    explicit NoDataError(const std::string& what)
        : Error(ErrorCategory::validation, what) {}
};

/// Malformed input file; carries the offending line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : Error(ErrorCategory::validation,
                path + ":" + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class CalibrationError : public Error {
public:
    explicit CalibrationError(const std::string& what)
        : Error(ErrorCategory::validation, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace ecoswitch
