#include "ergolab/sep/exclusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ergolab/core/error.hpp"
#include "ergolab/core/parallel.hpp"
#include "ergolab/core/stats.hpp"
#include "ergolab/homog/effective.hpp"

namespace ergolab::sep {

std::size_t ExclusionState::particles() const {
  return static_cast<std::size_t>(std::count(eta.begin(), eta.end(), std::uint8_t{1}));
}

StirringProcess::StirringProcess(const env::Environment& env) : size_(env.size()) {
  if (!env.simple()) throw DomainError("exclusion needs multiplicities n_x = 1");
  double acc = 0.0;
  for (const auto& b : env.bonds()) {
    if (b.rate_forward != b.rate_backward) {
      std::ostringstream os;
      os << "exclusion needs symmetric rates; bond " << b.from << "-" << b.to << " has "
         << b.rate_forward << " vs " << b.rate_backward;
      throw DomainError(os.str());
    }
    if (b.rate_forward <= 0 || b.from == b.to) continue;
    from_.push_back(b.from);
    to_.push_back(b.to);
    acc += b.rate_forward;
    cumulative_.push_back(acc);
  }
}

std::size_t StirringProcess::run(std::span<Occupation* const> etas, double T, double epsilon,
                                 CounterRng& rng, const Observer& observer) const {
  if (!(T >= 0)) throw DomainError("exclusion run needs T >= 0");
  if (!(epsilon > 0) || epsilon > 1) throw DomainError("exclusion run needs 0 < epsilon <= 1");
  std::vector<std::size_t> counts;
  for (const Occupation* eta : etas) {
    if (eta->size() != size_) throw DomainError("occupation vector has the wrong length");
    counts.push_back(static_cast<std::size_t>(std::count(eta->begin(), eta->end(), std::uint8_t{1})));
  }
  const double horizon = T / (epsilon * epsilon);
  const double total = total_rate();
  std::size_t events = 0;
  if (total > 0) {
    double time = rng.exponential(total);
    while (time <= horizon) {
      const double u = rng.uniform() * total;
      auto k = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                                        cumulative_.begin());
      k = std::min(k, cumulative_.size() - 1);
      const std::uint32_t x = from_[k], y = to_[k];
      for (Occupation* eta : etas) std::swap((*eta)[x], (*eta)[y]);
      if (observer) observer(x, y, time);
      ++events;
      time += rng.exponential(total);
    }
  }
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const auto n = static_cast<std::size_t>(std::count(etas[i]->begin(), etas[i]->end(), std::uint8_t{1}));
    if (n != counts[i]) throw std::logic_error("exclusion dynamics changed the particle count");
  }
  return events;
}

ExclusionState sep_run(const env::Environment& env, Occupation eta0, double T, double epsilon,
                       CounterRng& rng) {
  StirringProcess process(env);
  ExclusionState state{std::move(eta0), T};
  Occupation* one[] = {&state.eta};
  process.run(one, T, epsilon, rng);
  return state;
}

double empirical_profile(const ExclusionState& state, const env::Environment& env, double epsilon,
                         const refpde::Function& phi) {
  if (state.eta.size() != env.size()) throw DomainError("occupation vector has the wrong length");
  const int d = env.dim();
  CompensatedSum s;
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (!state.eta[i]) continue;
    Point x = env.position(i);
    for (int a = 0; a < d; ++a) x[a] *= epsilon;
    s.add(phi(x));
  }
  return std::pow(epsilon, d) * s.value();
}

double HydroReport::max_gap() const {
  double g = 0.0;
  for (const auto& r : rows) g = std::max(g, r.gap);
  return g;
}

namespace {

// Points k / n of the unit torus, last axis fastest.
std::vector<Point> unit_grid(int d, int n) {
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(n);
  std::vector<Point> pts(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    Point x{};
    for (int a = d - 1; a >= 0; --a) {
      x[a] = static_cast<double>(rest % static_cast<std::size_t>(n)) / n;
      rest /= static_cast<std::size_t>(n);
    }
    pts[idx] = x;
  }
  return pts;
}

int reference_grid(int d) { return d == 1 ? 512 : d == 2 ? 128 : 32; }

}  // namespace

HydroReport hydro_check(const HydroSpec& spec) {
  if (spec.model.family == env::ModelSpec::Family::triangular_nn)
    throw DomainError("hydrodynamic check needs an identity lattice map");
  if (std::abs(spec.epsilon * static_cast<double>(spec.side) - 1.0) > 1e-12)
    throw DomainError("hydrodynamic check needs epsilon * L = 1 (unit torus)");
  if (spec.n_seeds < 2) throw DomainError("hydrodynamic check needs at least two seeds");
  if (spec.times.empty()) throw DomainError("hydrodynamic check needs at least one time");
  if (spec.phis.empty()) throw DomainError("hydrodynamic check needs at least one test function");
  if (!spec.rho0) throw DomainError("hydrodynamic check needs an initial profile");
  for (double t : spec.times)
    if (!(t >= 0)) throw DomainError("times must be nonnegative");

  const auto env = env::generate_environment(spec.model, spec.d, spec.side, spec.master_seed);
  const StirringProcess process(env);
  HydroReport report;
  report.D = spec.D ? *spec.D : homog::effective_matrix(env).D;
  report.m_hat = env.total_mass() / env.torus().volume();

  std::vector<double> times = spec.times;
  std::sort(times.begin(), times.end());
  const std::size_t nt = times.size(), nphi = spec.phis.size();
  // samples[k][ti * nphi + p]
  std::vector<std::vector<double>> samples(spec.n_seeds, std::vector<double>(nt * nphi));
  for (std::size_t k = 0; k < spec.n_seeds; ++k) report.seeds.push_back(replica_seed(spec.master_seed, k));

  parallel_for(spec.n_seeds, spec.threads ? spec.threads : default_threads(), [&](std::size_t k) {
    CounterRng init(report.seeds[k], 0), dynamics(report.seeds[k], 1);
    ExclusionState state;
    state.eta.resize(env.size());
    for (std::size_t i = 0; i < env.size(); ++i) {
      Point x = env.position(i);
      for (int a = 0; a < spec.d; ++a) x[a] *= spec.epsilon;
      const double p = spec.rho0(x);
      if (!(p >= 0 && p <= 1)) throw DomainError("initial profile must take values in [0, 1]");
      state.eta[i] = init.uniform() < p ? 1 : 0;
    }
    Occupation* one[] = {&state.eta};
    double clock = 0.0;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      process.run(one, times[ti] - clock, spec.epsilon, dynamics);
      clock = times[ti];
      state.time = clock;
      for (std::size_t p = 0; p < nphi; ++p)
        samples[k][ti * nphi + p] = empirical_profile(state, env, spec.epsilon, spec.phis[p].f);
    }
  });

  const int n = reference_grid(spec.d);
  const auto grid = unit_grid(spec.d, n);
  std::vector<double> rho0(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) rho0[i] = spec.rho0(grid[i]);
  const double cell = std::pow(1.0 / n, spec.d);
  std::vector<double> column(spec.n_seeds);
  for (std::size_t ti = 0; ti < nt; ++ti) {
    const auto rho = refpde::heat_pde_torus(report.D, rho0, n, times[ti]);
    for (std::size_t p = 0; p < nphi; ++p) {
      double integral = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) integral += rho[i] * spec.phis[p].f(grid[i]);
      for (std::size_t k = 0; k < spec.n_seeds; ++k) column[k] = samples[k][ti * nphi + p];
      const Estimate est = mean_estimate(column);
      HydroRow row;
      row.t = times[ti];
      row.phi_id = spec.phis[p].id;
      row.empirical = est.value;
      row.reference = report.m_hat * integral * cell;
      row.gap = std::abs(row.empirical - row.reference);
      row.std_error = est.std_error;
      row.seed_count = spec.n_seeds;
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace ergolab::sep
