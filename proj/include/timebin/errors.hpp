#pragma once

#include <stdexcept>
#include <string>

namespace timebin {

/// Invalid experiment configuration. The message names the violated field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or insufficient input data (unsorted streams, degenerate fits,
/// bad CSV rows, ...).
class DataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Experiment spec file could not be loaded. Messages carry file:line
/// context plus the offending key.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace timebin
