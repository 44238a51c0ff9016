// SPDX-License-Identifier: MIT
// Command line entry point. Subcommands are wired up in src/cli.cpp as the
// corresponding modules land.
#include <cstdio>

int main(int, char**) {
  std::puts("aclab: no subcommands registered yet");
  return 0;
}
