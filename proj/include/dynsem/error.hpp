#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dynsem {

// Base for every error the library raises. The CLI maps all of these to
// exit code 2 (input error); negative verdicts are values, never exceptions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// Arity mismatch or a symbol used with two different kinds.
class SignatureError : public Error {
public:
    using Error::Error;
};

// Use of an identifier with no enclosing declaration.
class ScopeError : public Error {
public:
    using Error::Error;
};

// A symbol the model (or state space) does not interpret.
class EvalError : public Error {
public:
    using Error::Error;
};

// A numeric bound above the configured cap.
class CapError : public Error {
public:
    using Error::Error;
};

// Structurally broken proof objects (dangling discharge, forward references).
class MalformedError : public Error {
public:
    using Error::Error;
};

}  // namespace dynsem
