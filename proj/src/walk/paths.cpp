#include "ergolab/walk/paths.hpp"

#include <algorithm>
#include <cmath>

#include "ergolab/core/error.hpp"
#include "ergolab/core/parallel.hpp"

namespace ergolab::walk {

std::uint32_t Trajectory::atom_at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  return atoms[static_cast<std::size_t>(it - times.begin()) - 1];
}

Point Trajectory::position_at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  return positions[static_cast<std::size_t>(it - times.begin()) - 1];
}

PathSampler::PathSampler(const env::Environment& env, double epsilon)
    : env_(env), epsilon_(epsilon), speed_(1.0 / (epsilon * epsilon)) {
  if (!(epsilon > 0) || epsilon > 1) throw DomainError("path sampler needs 0 < epsilon <= 1");
  const std::size_t n = env.size();
  escape_.resize(n);
  mass_cdf_.resize(n);
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double run = 0.0;
    for (const auto& nb : env.neighbors(i)) {
      run += nb.rate;
      cumulative_.push_back(run);
    }
    escape_[i] = run;
    mass += env.multiplicity(i);
    mass_cdf_[i] = mass;
  }
}

std::uint32_t PathSampler::step(std::uint32_t x, double u, Point* displacement) const {
  const auto nbs = env_.neighbors(x);
  const std::size_t base = static_cast<std::size_t>(nbs.data() - env_.neighbors(0).data());
  const auto first = cumulative_.begin() + static_cast<std::ptrdiff_t>(base);
  const auto last = first + static_cast<std::ptrdiff_t>(nbs.size());
  auto it = std::upper_bound(first, last, u * escape_[x]);
  if (it == last) --it;
  const auto& nb = nbs[static_cast<std::size_t>(it - first)];
  if (displacement) *displacement = nb.displacement;
  return nb.atom;
}

Trajectory PathSampler::simulate(std::uint32_t start, double horizon, CounterRng& rng) const {
  if (start >= env_.size()) throw DomainError("start is not an atom");
  if (!(horizon >= 0)) throw DomainError("horizon must be non-negative");
  Trajectory tr;
  tr.end_time = horizon;
  tr.times.push_back(0.0);
  tr.atoms.push_back(start);
  const Point c = env_.torus().centred(env_.position(start));
  Point pos{epsilon_ * c[0], epsilon_ * c[1], epsilon_ * c[2]};
  tr.positions.push_back(pos);
  std::uint32_t x = start;
  double t = 0.0;
  for (;;) {
    const double rate = speed_ * escape_[x];
    if (rate <= 0) break;
    t += rng.exponential(rate);
    if (t > horizon) break;
    Point delta{};
    x = step(x, rng.uniform(), &delta);
    for (int k = 0; k < env_.dim(); ++k) pos[k] += epsilon_ * delta[k];
    tr.times.push_back(t);
    tr.atoms.push_back(x);
    tr.positions.push_back(pos);
  }
  return tr;
}

std::uint32_t PathSampler::endpoint(std::uint32_t start, double t_end, CounterRng& rng) const {
  std::uint32_t x = start;
  double t = 0.0;
  for (;;) {
    const double rate = speed_ * escape_[x];
    if (rate <= 0) return x;
    t += rng.exponential(rate);
    if (t > t_end) return x;
    x = step(x, rng.uniform(), nullptr);
  }
}

std::uint32_t PathSampler::stationary_start(CounterRng& rng) const {
  const double u = rng.uniform() * mass_cdf_.back();
  auto it = std::upper_bound(mass_cdf_.begin(), mass_cdf_.end(), u);
  if (it == mass_cdf_.end()) --it;
  return static_cast<std::uint32_t>(it - mass_cdf_.begin());
}

Trajectory simulate_path(const env::Environment& env, double epsilon, std::uint32_t start,
                         double horizon, CounterRng& rng) {
  return PathSampler(env, epsilon).simulate(start, horizon, rng);
}

MsdEstimate msd_estimate(const env::Environment& env, double epsilon, double horizon,
                         std::size_t n_paths, std::uint64_t seed, int window_points) {
  if (!(horizon > 0)) throw DomainError("msd needs a positive horizon");
  if (n_paths < 2) throw DomainError("msd needs at least two paths");
  if (window_points < 1) throw DomainError("msd needs at least one window point");
  const PathSampler sampler(env, epsilon);
  const int d = env.dim();
  std::vector<double> per_path(n_paths);
  parallel_for(n_paths, default_threads(), [&](std::size_t p) {
    CounterRng rng(seed, 1000 + p);
    const std::uint32_t start = sampler.stationary_start(rng);
    const Trajectory tr = sampler.simulate(start, horizon, rng);
    const Point& x0 = tr.positions.front();
    double acc = 0.0;
    for (int k = 0; k < window_points; ++k) {
      const double t = horizon * (0.5 + 0.5 * (k + 1) / window_points);
      const Point x = tr.position_at(t);
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) r2 += (x[i] - x0[i]) * (x[i] - x0[i]);
      acc += r2 / t;
    }
    per_path[p] = acc / window_points;
  });
  MsdEstimate out;
  out.slope = mean_estimate(per_path);
  out.window_start = 0.5 * horizon;
  out.paths = n_paths;
  return out;
}

}  // namespace ergolab::walk
