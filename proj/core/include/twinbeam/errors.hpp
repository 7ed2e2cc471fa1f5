#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace twinbeam {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A value violates a documented precondition or invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A mode label (or pixel) is not present where it was expected.
class LookupError : public Error {
public:
    using Error::Error;
};

// Malformed text input. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& what);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// Rejected scenario configuration; key_path is a dotted path such as "detection.efficiency".
class ConfigError : public Error {
public:
    ConfigError(const std::string& key_path, const std::string& what);

    const std::string& key_path() const { return key_path_; }

private:
    std::string key_path_;
};

// A computation would exceed a configured resource budget.
class ResourceError : public Error {
public:
    using Error::Error;
};

// An intensity measurement was requested on beams with no mean photons.
class MeasurementUndefined : public Error {
public:
    using Error::Error;
};

// A file manifest does not match what is on disk.
class IntegrityError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace twinbeam
