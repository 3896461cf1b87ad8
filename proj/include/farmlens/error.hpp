#pragma once

#include <stdexcept>
#include <string>

namespace farmlens {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input data does not match the farmlens/1 schema or violates a dataset invariant.
class SchemaError : public Error {
public:
    using Error::Error;
};

// A caller-supplied argument is outside its documented domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// An iterative numerical routine failed to reach its tolerance or hit a degenerate input.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace farmlens
