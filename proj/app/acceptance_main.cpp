// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion, summary.json in the output directory.
#include "vortexlab/acceptance.hpp"

#include <iostream>

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "acceptance_out";
  try {
    bool ok = false;
    vortexlab::emit_acceptance_suite(dir, {}, std::cout, &ok);
    return ok ? 0 : 1;
  } catch (const vortexlab::Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == vortexlab::ErrorCode::IoError ? 4 : 3;
  }
}
