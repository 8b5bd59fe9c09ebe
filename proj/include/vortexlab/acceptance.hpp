// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/io.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace vortexlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;   // one-line summary of the measured numbers
  Json data;            // the numbers behind the verdict
  double seconds = 0.0; // wall time; printed, never written to artifacts
  double budget = 0.0;  // seconds allowed, 0 for none
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  int sweep_grid = 513;       // criteria 7 and 10
  int compare_grid = 257;     // criterion 8
  int probe_grid = 257;       // criterion 9
  bool determinism_pass = true;  // criterion 12 reruns criteria 1-11
};

// Criteria 1-11, writing artifacts through out.
std::vector<CriterionResult> run_acceptance_criteria(ArtifactWriter& out, const AcceptanceOptions& options,
                                                     std::ostream* log);

// Runs the suite into dir/pass_1 (and dir/pass_2 for criterion 12), prints
// one line per criterion to log and writes dir/summary.json. Returns the
// results; all_passed reports whether every criterion passed.
std::vector<CriterionResult> emit_acceptance_suite(const std::string& dir, const AcceptanceOptions& options,
                                                   std::ostream& log, bool* all_passed);

std::string format_criterion_line(const CriterionResult& r);

}  // namespace vortexlab
