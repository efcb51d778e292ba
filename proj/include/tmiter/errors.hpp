#pragma once

#include <stdexcept>

namespace tmiter {

/// Invalid or incomplete experiment configuration. The CLI maps this to
/// exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tmiter
