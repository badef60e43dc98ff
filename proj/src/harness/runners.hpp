#pragma once

// Per-kind experiment runners behind harness::run.

#include <cstdint>
#include <string>

#include "ergolab/env/environment.hpp"
#include "ergolab/env/models.hpp"
#include "ergolab/harness/config.hpp"
#include "ergolab/harness/experiment.hpp"

namespace ergolab::harness {

struct Context {
  const Config& cfg;
  unsigned threads;

  std::uint64_t master() const { return cfg.seed("seed", 0); }
  // Rejects keys nobody read; call once all parameters are parsed, before the work starts.
  void seal() const;
};

env::ModelSpec model_spec(const Config& cfg);
// Mean mass per unit volume implied by the model.
double model_intensity(const env::ModelSpec& model, int d);

void run_gen_env(const Context& ctx, ExperimentReport& report);
void run_ergodic_avg(const Context& ctx, ExperimentReport& report);
void run_maximal(const Context& ctx, ExperimentReport& report);
void run_covering(const Context& ctx, ExperimentReport& report);
void run_measure_limit(const Context& ctx, ExperimentReport& report);
void run_operator(const Context& ctx, ExperimentReport& report, bool semigroup);
void run_paths(const Context& ctx, ExperimentReport& report);
void run_effective_matrix(const Context& ctx, ExperimentReport& report);
void run_homog_convergence(const Context& ctx, ExperimentReport& report);
void run_sep_hydro(const Context& ctx, ExperimentReport& report);
void run_operator_check(const Context& ctx, ExperimentReport& report);

}  // namespace ergolab::harness
