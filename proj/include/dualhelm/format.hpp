// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace dualhelm {

// Round-trip decimal text for a double ("%.17g"); the same bits always give
// the same string, so repeated runs produce identical files.
std::string fmt(double x);

}  // namespace dualhelm
