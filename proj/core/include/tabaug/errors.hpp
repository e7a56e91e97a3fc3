#pragma once

#include <stdexcept>
#include <string>

namespace tabaug {

/// Caller passed something that violates an operation's preconditions.
class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

/// Input file is missing, malformed, or fails its declared shape checks.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Training or arithmetic produced NaN/Inf or blew past the divergence guard.
class NumericFault : public std::runtime_error {
public:
    explicit NumericFault(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tabaug
