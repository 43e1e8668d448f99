#pragma once

#include <stdexcept>

namespace netmirror {

// Invalid configuration or arguments supplied by the caller.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Input outside the domain where an operation is defined.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Malformed or inconsistent external data (files, tables).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace netmirror
