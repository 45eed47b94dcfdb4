#pragma once

#include <stdexcept>
#include <string>

namespace evac {

/// Bad or inconsistent input (schema violations, broken references, bad arguments).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The problem is well-formed but no evacuation is possible (e.g. every sink burnt).
class InfeasibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace evac
