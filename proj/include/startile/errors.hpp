#pragma once

#include <stdexcept>

namespace startile {

// Malformed or inconsistent input (rule files, patches, parameters).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A request would exceed a configured size cap.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical construction failed or missed its tolerance.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace startile
