#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ergolab/core/geometry.hpp"
#include "ergolab/core/rng.hpp"
#include "ergolab/core/stats.hpp"
#include "ergolab/env/environment.hpp"

namespace ergolab::walk {

struct Trajectory {
  std::vector<double> times;         // jump times, starting with 0
  std::vector<std::uint32_t> atoms;  // atom occupied from times[k] on
  std::vector<Point> positions;      // unwrapped eps-scaled positions
  double end_time = 0.0;

  std::uint32_t atom_at(double t) const;
  Point position_at(double t) const;
  std::size_t jumps() const { return atoms.size() - 1; }
};

// Gillespie sampler for the sped-up walk: holding rate eps^-2 r_x, then a jump
// to y with probability r_{x,y} / r_x.
class PathSampler {
 public:
  PathSampler(const env::Environment& env, double epsilon);

  Trajectory simulate(std::uint32_t start, double horizon, CounterRng& rng) const;
  // Atom occupied at time t only (no recording).
  std::uint32_t endpoint(std::uint32_t start, double t, CounterRng& rng) const;
  // Start drawn from the normalized invariant measure n_x / sum n.
  std::uint32_t stationary_start(CounterRng& rng) const;

  const env::Environment& environment() const { return env_; }
  double epsilon() const { return epsilon_; }

 private:
  std::uint32_t step(std::uint32_t x, double u, Point* displacement) const;

  const env::Environment& env_;
  double epsilon_;
  double speed_;  // eps^-2
  std::vector<double> escape_;
  std::vector<double> cumulative_;  // per neighbour slot, running sum within each atom
  std::vector<double> mass_cdf_;
};

Trajectory simulate_path(const env::Environment& env, double epsilon, std::uint32_t start,
                         double horizon, CounterRng& rng);

struct MsdEstimate {
  Estimate slope;           // mean |X_t - X_0|^2 / t
  double window_start = 0;  // times averaged over [window_start, horizon]
  std::size_t paths = 0;
};

// Mean squared displacement over t, from stationary starts, averaged over
// `window_points` times spread over the second half of [0, horizon].
MsdEstimate msd_estimate(const env::Environment& env, double epsilon, double horizon,
                         std::size_t n_paths, std::uint64_t seed, int window_points = 8);

}  // namespace ergolab::walk
