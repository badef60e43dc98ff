#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "ergolab/core/stats.hpp"
#include "ergolab/env/environment.hpp"
#include "ergolab/env/models.hpp"

namespace ergolab::env {

// sum_y r_{x,y} |y - x|^k over stored neighbours, distances by minimal image.
double lambda_k(const Environment& env, std::size_t atom, int k);

using AtomObservable = std::function<double(const Environment&, std::size_t)>;

// Palm expectation E_{P_0}[obs]: n-weighted average over atoms and seeds
// (atom-uniform for point processes, where n = 1), jackknife error over seeds.
Estimate palm_expectation(const ModelSpec& model, int d, std::int64_t side,
                          const AtomObservable& obs, std::size_t n_seeds,
                          std::uint64_t master_seed, double kappa = 2.0);

struct IntensityEstimate {
  Estimate estimate;
  // Finite and positive as required of the intensity.
  bool assumption_ok = false;
};

// Mean mass per unit volume: average torus mass over |det V| L^d.
IntensityEstimate intensity_estimate(const ModelSpec& model, int d, std::int64_t side,
                                     std::size_t n_seeds, std::uint64_t master_seed);

}  // namespace ergolab::env
