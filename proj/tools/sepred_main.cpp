// SPDX-License-Identifier: Apache-2.0
#include "sepred/cli.hpp"

int main(int argc, char** argv) {
  return sepred::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
