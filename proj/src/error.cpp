// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#include "dualhelm/error.hpp"

namespace dualhelm {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain error";
    case ErrorKind::unsupported_order: return "unsupported order";
    case ErrorKind::range: return "range error";
    case ErrorKind::config: return "config error";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::projection: return "projection error";
    case ErrorKind::precondition: return "precondition error";
    case ErrorKind::degenerate_init: return "degenerate init";
    case ErrorKind::window: return "window error";
    case ErrorKind::numeric: return "numeric failure";
  }
  return "error";
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace dualhelm
