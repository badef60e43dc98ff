#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ergolab/harness/experiment.hpp"

namespace ergolab::harness {

struct AcceptancePart {
  std::string label;   // sub-directory for its outputs
  std::string config;  // embedded configuration text
};

struct AcceptanceCase {
  std::string id;  // AC1 ... AC10
  std::string description;
  std::vector<AcceptancePart> parts;
  double budget_s = 0;  // wall-clock budget over all parts; 0 for none
};

const std::vector<AcceptanceCase>& acceptance_cases();

struct AcceptanceOptions {
  std::string out_dir;  // empty: keep results in memory only
  unsigned threads = 1;
  bool determinism = true;         // rerun every part and compare CSVs (AC11)
  std::vector<std::string> only;   // restrict to these ids
  std::function<void(const Criterion&)> on_result;
};

// One criterion per acceptance case plus AC11; kind "accept".
ExperimentReport run_acceptance(const AcceptanceOptions& options);

}  // namespace ergolab::harness
