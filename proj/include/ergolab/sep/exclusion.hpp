#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergolab/core/rng.hpp"
#include "ergolab/env/environment.hpp"
#include "ergolab/env/models.hpp"
#include "ergolab/refpde/heat.hpp"

namespace ergolab::sep {

using Occupation = std::vector<std::uint8_t>;

struct ExclusionState {
  Occupation eta;
  double time = 0.0;  // diffusive time T; physical time is eps^-2 T
  std::size_t particles() const;
};

// Symmetric exclusion by stirring: every bond (x, y) swaps the occupations at x
// and y at rate r_{x,y}. Needs n = 1 and r_{x,y} == r_{y,x} bit-exactly.
class StirringProcess {
 public:
  explicit StirringProcess(const env::Environment& env);

  std::size_t size() const { return size_; }
  double total_rate() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  using Observer = std::function<void(std::uint32_t x, std::uint32_t y, double physical_time)>;

  // Applies one shared sequence of exchange events, up to physical time
  // eps^-2 T, to every configuration (exact monotone coupling). Returns the
  // number of events. Throws if a configuration changes its particle count.
  std::size_t run(std::span<Occupation* const> etas, double T, double epsilon, CounterRng& rng,
                  const Observer& observer = {}) const;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint32_t> from_, to_;
  std::vector<double> cumulative_;
};

ExclusionState sep_run(const env::Environment& env, Occupation eta0, double T, double epsilon,
                       CounterRng& rng);

// eps^d sum_x eta(x) phi(eps x), positions in [0, L)^d scaled by eps.
double empirical_profile(const ExclusionState& state, const env::Environment& env, double epsilon,
                         const refpde::Function& phi);

struct NamedFunction {
  std::string id;
  refpde::Function f;
};

struct HydroSpec {
  env::ModelSpec model;
  int d = 1;
  std::int64_t side = 256;
  double epsilon = 1.0 / 256;  // must equal 1 / side: the box is the unit torus
  refpde::Function rho0;
  std::vector<double> times;
  std::vector<NamedFunction> phis;
  std::size_t n_seeds = 20;
  std::uint64_t master_seed = 0;
  // Effective matrix; computed from the environment when absent.
  std::optional<Eigen::MatrixXd> D;
  unsigned threads = 0;
};

struct HydroRow {
  double t = 0.0;
  std::string phi_id;
  double empirical = 0.0;
  double reference = 0.0;
  double gap = 0.0;
  double std_error = 0.0;
  std::size_t seed_count = 0;
};

struct HydroReport {
  std::vector<HydroRow> rows;
  Eigen::MatrixXd D;
  double m_hat = 0.0;  // realized mass per unit volume of the quenched environment
  std::vector<std::uint64_t> seeds;

  double max_gap() const;
};

// One quenched environment (seed = master); replica k draws its Bernoulli(rho0)
// initial data and its stirring events from replica_seed(master, k). Reference:
// m_hat * int rho(t, x) phi(x) dx with rho from the spectral heat flow.
HydroReport hydro_check(const HydroSpec& spec);

}  // namespace ergolab::sep
