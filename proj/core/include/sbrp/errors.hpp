#ifndef SBRP_ERRORS_HPP
#define SBRP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sbrp {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file; message carries line/field context.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

// Structurally valid input that violates a model invariant.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

// No feasible solution exists for the requested computation.
class InfeasibleError : public Error {
public:
    explicit InfeasibleError(const std::string& what) : Error(what) {}
};

}  // namespace sbrp

#endif
