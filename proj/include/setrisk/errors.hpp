#pragma once

#include <stdexcept>
#include <string>

namespace setrisk {

// Bad input: malformed data, out-of-range parameters, inconsistent config.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// File or stream failures.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The model itself is degenerate, e.g. an outer bound that is the whole plane.
class ModelingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace setrisk
