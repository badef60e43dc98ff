#include "ergolab/env/estimators.hpp"

#include <cmath>
#include <vector>

#include "ergolab/core/error.hpp"
#include "ergolab/core/parallel.hpp"
#include "ergolab/core/rng.hpp"
#include "ergolab/env/measure.hpp"

namespace ergolab::env {

double lambda_k(const Environment& env, std::size_t atom, int k) {
  if (atom >= env.size()) throw DomainError("atom index " + std::to_string(atom) + " out of range");
  if (k != 0 && k != 2) throw DomainError("lambda_k is defined for k in {0, 2}");
  double s = 0.0;
  for (const auto& nb : env.neighbors(atom)) {
    const double r = norm(nb.displacement, env.dim(), env.kappa());
    s += nb.rate * (k == 0 ? 1.0 : r * r);
  }
  return s;
}

Estimate palm_expectation(const ModelSpec& model, int d, std::int64_t side,
                          const AtomObservable& obs, std::size_t n_seeds,
                          std::uint64_t master_seed, double kappa) {
  if (n_seeds < 1) throw DomainError("palm expectation needs at least one seed");
  if (model.family == ModelSpec::Family::triangular_nn)
    throw DomainError("palm estimation is restricted to V = identity");
  std::vector<double> num(n_seeds), den(n_seeds);
  parallel_for(n_seeds, default_threads(), [&](std::size_t s) {
    const Environment env = generate_environment(model, d, side, replica_seed(master_seed, s), kappa);
    if (env.size() == 0) throw DomainError("palm expectation on an empty sample");
    double a = 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < env.size(); ++i) {
      a += env.multiplicity(i) * obs(env, i);
      b += env.multiplicity(i);
    }
    num[s] = a;
    den[s] = b;
  });
  return jackknife_ratio(num, den);
}

IntensityEstimate intensity_estimate(const ModelSpec& model, int d, std::int64_t side,
                                     std::size_t n_seeds, std::uint64_t master_seed) {
  if (n_seeds < 2) throw DomainError("intensity estimate needs at least two seeds");
  std::vector<double> density(n_seeds);
  parallel_for(n_seeds, default_threads(), [&](std::size_t s) {
    const AtomicMeasure mu = sample_measure(model, d, side, replica_seed(master_seed, s));
    density[s] = mu.total_mass() / mu.box().volume();
  });
  IntensityEstimate out;
  out.estimate = mean_estimate(density);
  out.assumption_ok = std::isfinite(out.estimate.value) && out.estimate.value > 0;
  return out;
}

}  // namespace ergolab::env
