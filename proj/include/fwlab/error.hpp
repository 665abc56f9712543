#pragma once

#include <stdexcept>
#include <string>

namespace fwlab {

/// Invalid argument to an operation (out-of-range exponent, bad grid, ...).
class ParameterError : public std::invalid_argument {
public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input is structurally valid but outside the operation's domain
/// (empty measure, non-even field where evenness is required, ...).
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A configured budget (atom count, grid size, pair count) would be exceeded.
class ResourceError : public std::runtime_error {
public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// A formula was evaluated outside the parameter range of the statement it encodes.
class RangeError : public std::out_of_range {
public:
  explicit RangeError(const std::string& what) : std::out_of_range(what) {}
};

}  // namespace fwlab
