// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#include "dualhelm/format.hpp"

#include <cmath>
#include <cstdio>

namespace dualhelm {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace dualhelm
