#pragma once

#include <stdexcept>
#include <string>

namespace causalfm {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad sizes, out-of-range parameters).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Input data that cannot be parsed or does not conform to the panel format.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace causalfm
