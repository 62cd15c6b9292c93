// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace sepred {

/// Full command-line surface: gen, cv, ablate, gradcheck. args excludes
/// the program name. Exit codes: 0 success, 1 validation/contract error,
/// 2 I/O error, 3 verification failure.
int run_cli(std::vector<std::string> args);

}  // namespace sepred
