#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcfit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or invalid file content. Line and column are 1-based; column 0
// means the whole line.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) +
                (column ? ", column " + std::to_string(column) : std::string()) + ": " +
                message),
          line_(line),
          column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// An operation was called outside of its domain (non-Robinsonian matrix,
// non-hierarchy family, label collision, ...). The message names the offender.
class DomainError : public Error {
public:
    using Error::Error;
};

// Exhaustive ordering searches refuse inputs above their size limit.
class SearchRefusedError : public Error {
public:
    using Error::Error;
};

}  // namespace pcfit
