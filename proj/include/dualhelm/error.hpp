// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace dualhelm {

enum class ErrorKind {
  domain,
  unsupported_order,
  range,
  config,
  shape,
  projection,
  precondition,
  degenerate_init,
  window,
  numeric,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the library; the kind tells callers (and the CLI
// exit-code mapping) what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace dualhelm
