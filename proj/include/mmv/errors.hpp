#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmv {

// Every library failure derives from Error; the C API maps the kind onto
// mmv_status codes.
enum class ErrorKind {
    usage,
    parse,
    domain,
    resource,
    promise,
    validation,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

struct ResourceError : Error {
    explicit ResourceError(const std::string& what) : Error(ErrorKind::resource, what) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

struct InternalError : Error {
    explicit InternalError(const std::string& what) : Error(ErrorKind::internal, what) {}
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Raised when more nonzero entries are found than the caller's budget t allows.
class PromiseViolation : public Error {
public:
    PromiseViolation(std::size_t row, std::size_t col, std::size_t count)
        : Error(ErrorKind::promise,
                "promise violated: correction #" + std::to_string(count) + " at (" +
                    std::to_string(row + 1) + "," + std::to_string(col + 1) + ") exceeds the error budget"),
          row_(row), col_(col), count_(count), has_position_(true) {}
    /// Violation noticed without a concrete offending position.
    explicit PromiseViolation(std::size_t count)
        : Error(ErrorKind::promise, "promise violated: differences remain after " + std::to_string(count - 1) +
                                        " corrections"),
          row_(0), col_(0), count_(count), has_position_(false) {}
    bool has_position() const noexcept { return has_position_; }
    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }
    /// Number of corrections attempted including the offending one (t + 1).
    std::size_t count() const noexcept { return count_; }

private:
    std::size_t row_;
    std::size_t col_;
    std::size_t count_;
    bool has_position_;
};

} // namespace mmv
