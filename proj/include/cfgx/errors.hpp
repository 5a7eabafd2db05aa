#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace cfgx {

// Schema violations, contract violations, bad arguments. CLI exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values, diverged optimization. CLI exit code 3.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-fatal warnings (clamped arguments, dropped duplicate edges, ...).
// Default handler writes to stderr; tests may install their own sink.
using WarnHandler = std::function<void(const std::string&)>;
void warn(const std::string& msg);
WarnHandler set_warn_handler(WarnHandler h);

}  // namespace cfgx
