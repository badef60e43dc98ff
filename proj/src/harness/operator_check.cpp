// Operator identities on random small chains, against dense and closed-form oracles.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ergolab/core/error.hpp"
#include "ergolab/core/parallel.hpp"
#include "ergolab/core/quadrature.hpp"
#include "ergolab/core/rng.hpp"
#include "ergolab/core/stats.hpp"
#include "ergolab/walk/generator.hpp"
#include "ergolab/walk/paths.hpp"
#include "ergolab/walk/solvers.hpp"
#include "runners.hpp"

namespace ergolab::harness {

namespace {

using env::Bond;
using env::Environment;

// Ring of `states` atoms plus random chords; multiplicities in {1, 2, 4} keep
// detailed balance exact.
Environment random_chain(std::uint64_t seed, std::size_t states) {
  CounterRng rng(seed, 5);
  std::vector<Point> pos(states);
  std::vector<double> mult(states);
  for (std::size_t i = 0; i < states; ++i) {
    pos[i] = {static_cast<double>(i), 0, 0};
    mult[i] = std::ldexp(1.0, static_cast<int>(rng() % 3));
  }
  std::vector<Bond> bonds;
  auto link = [&](std::size_t a, std::size_t b) {
    const double c = 0.2 + 2.0 * rng.uniform();
    Point delta{static_cast<double>(b) - static_cast<double>(a), 0, 0};
    bonds.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), c / mult[a], c / mult[b], delta});
  };
  for (std::size_t i = 0; i + 1 < states; ++i) link(i, i + 1);
  for (std::size_t k = 0; k < states / 2; ++k) {
    const std::size_t a = rng() % states, b = rng() % states;
    if (a != b) link(a, b);
  }
  return Environment(Torus(1, static_cast<std::int64_t>(4 * states), LatticeMap::identity(1)), 2.0, seed,
                     "random_chain", pos, mult, bonds);
}

// Two atoms, L_01 = a, L_10 = b with n_0 a = n_1 b.
Environment two_state(double a, double n1) {
  const double b = a / n1;
  std::vector<Bond> bond{{0, 1, a, b, {1, 0, 0}}};
  return Environment(Torus(1, 4, LatticeMap::identity(1)), 2.0, 0, "two_state", {{0, 0, 0}, {1, 0, 0}},
                     {1.0, n1}, bond);
}

std::vector<double> weighted_residual(const walk::SparseGenerator& g, double lambda, const std::vector<double>& u,
                                      const std::vector<double>& f) {
  std::vector<double> lu(u.size()), r(u.size());
  g.apply(u, lu);
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = f[i] - (lambda * u[i] - lu[i]);
  return r;
}

// lambda R f = int_0^inf e^-s P_{s / lambda} f ds, composite Gauss-Legendre on geometric panels.
std::vector<double> laplace_of_semigroup(const walk::SparseGenerator& g, double lambda, const std::vector<double>& f) {
  const auto rule = gauss_legendre(16);
  std::vector<double> acc(f.size(), 0.0);
  double a = 0.0, b = 1.0 / 64;
  while (a < 40.0) {
    const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double s = mid + half * rule.nodes[i];
      const auto p = walk::semigroup(g, s / lambda, f, 1e-13).u;
      const double w = half * rule.weights[i] * std::exp(-s);
      for (std::size_t k = 0; k < f.size(); ++k) acc[k] += w * p[k];
    }
    a = b;
    b *= 2;
  }
  return acc;
}

struct Row {
  std::uint64_t seed = 0;
  std::size_t states = 0;
  double residual = 0, identity = 0, two_state = 0, laplace = 0;
  bool gillespie = false;
  double occ_hat = 0, occ_ref = 0, occ_se = 0;
};

}  // namespace

void run_operator_check(const Context& ctx, ExperimentReport& report) {
  const Config& cfg = ctx.cfg;
  const std::size_t instances = static_cast<std::size_t>(std::max<std::int64_t>(1, cfg.integer("instances", 100)));
  const auto min_states = cfg.integer("min_states", 8);
  const auto max_states = cfg.integer("max_states", 64);
  if (min_states < 2 || max_states < min_states) throw ConfigError("max_states", "need 2 <= min_states <= max_states");
  const auto gillespie = static_cast<std::size_t>(std::max<std::int64_t>(0, cfg.integer("gillespie_instances", 2)));
  const auto paths = static_cast<std::size_t>(std::max<std::int64_t>(2, cfg.integer("paths", 100000)));
  const double residual_tol = cfg.number("residual_tol", 1e-8);
  const double identity_tol = cfg.number("identity_tol", 1e-6);
  const double two_state_tol = cfg.number("two_state_tol", 1e-10);
  const double laplace_tol = cfg.number("laplace_tol", 1e-6);
  const double sigmas = cfg.number("sigmas", 3.0);
  ctx.seal();

  std::vector<Row> rows(instances);
  parallel_for(instances, ctx.threads, [&](std::size_t k) {
    Row& row = rows[k];
    row.seed = replica_seed(ctx.master(), k);
    CounterRng rng(row.seed, 1);
    row.states = static_cast<std::size_t>(min_states) + rng() % static_cast<std::uint64_t>(max_states - min_states + 1);
    const auto e = random_chain(row.seed, row.states);
    const auto g = walk::build_generator(e, 1.0);
    std::vector<double> f(row.states);
    for (auto& x : f) x = 2 * rng.uniform() - 1;
    const double lambda = 0.5 + 3.5 * rng.uniform(), nu = 0.5 + 3.5 * rng.uniform();

    const auto rl = walk::resolvent(g, lambda, f, 1e-12).u;
    row.residual = g.norm(weighted_residual(g, lambda, rl, f)) / g.norm(f);
    const auto rn = walk::resolvent(g, nu, f, 1e-12).u;
    const auto rlrn = walk::resolvent(g, lambda, rn, 1e-12).u;
    for (std::size_t i = 0; i < f.size(); ++i)
      row.identity = std::max(row.identity, std::abs(rl[i] - rn[i] - (nu - lambda) * rlrn[i]));

    const auto lap = laplace_of_semigroup(g, lambda, f);
    for (std::size_t i = 0; i < f.size(); ++i) row.laplace = std::max(row.laplace, std::abs(lap[i] - lambda * rl[i]));

    // P_t 1_{0}: closed form for the two-state chain.
    const double a = 0.2 + 3 * rng.uniform();
    const double n1 = std::ldexp(1.0, static_cast<int>(rng() % 3));
    const double b = a / n1, t = 0.05 + 3 * rng.uniform();
    const auto two = walk::build_generator(two_state(a, n1), 1.0);
    const auto u = walk::semigroup(two, t, std::vector<double>{1.0, 0.0}).u;
    const double decay = std::exp(-(a + b) * t);
    row.two_state = std::max(std::abs(u[0] - (b / (a + b) + a / (a + b) * decay)),
                             std::abs(u[1] - (b / (a + b) - b / (a + b) * decay)));

    if (k < gillespie) {
      // Return probability to the start atom.
      row.gillespie = true;
      const double horizon = 0.5;
      std::vector<double> ind(row.states, 0.0);
      ind[0] = 1.0;
      row.occ_ref = walk::semigroup(g, horizon, ind, 1e-13).u[0];
      walk::PathSampler sampler(e, 1.0);
      std::vector<double> hit(paths);
      for (std::size_t p = 0; p < paths; ++p) {
        CounterRng r(row.seed, 100 + p);
        hit[p] = sampler.endpoint(0, horizon, r) == 0 ? 1.0 : 0.0;
      }
      const auto est = mean_estimate(hit);
      row.occ_hat = est.value;
      row.occ_se = est.std_error;
    }
  });

  Table t{"operator", {"instance", "seed", "states", "resolvent_residual", "identity_defect", "two_state_error",
                       "laplace_defect", "occupancy_hat", "occupancy_ref", "occupancy_stderr"}};
  double w_res = 0, w_id = 0, w_two = 0, w_lap = 0, w_z = 0;
  for (std::size_t k = 0; k < instances; ++k) {
    const auto& r = rows[k];
    if (r.gillespie)
      t.add({k, r.seed, r.states, r.residual, r.identity, r.two_state, r.laplace, r.occ_hat, r.occ_ref, r.occ_se});
    else
      t.add({k, r.seed, r.states, r.residual, r.identity, r.two_state, r.laplace, "", "", ""});
    w_res = std::max(w_res, r.residual);
    w_id = std::max(w_id, r.identity);
    w_two = std::max(w_two, r.two_state);
    w_lap = std::max(w_lap, r.laplace);
    if (r.gillespie) w_z = std::max(w_z, std::abs(r.occ_hat - r.occ_ref) / r.occ_se);
  }
  report.tables.push_back(std::move(t));
  const auto fmt = [](double x) { return format_double(x); };
  report.check("resolvent_residual", "||f - (lambda - L) R f|| / ||f||", w_res <= residual_tol,
               fmt(w_res) + " <= " + fmt(residual_tol));
  report.check("resolvent_identity", "R_l - R_n = (n - l) R_l R_n", w_id <= identity_tol,
               fmt(w_id) + " <= " + fmt(identity_tol));
  report.check("two_state", "semigroup against the two-state closed form", w_two <= two_state_tol,
               fmt(w_two) + " <= " + fmt(two_state_tol));
  report.check("laplace", "lambda R f against the Laplace transform of P_t f", w_lap <= laplace_tol,
               fmt(w_lap) + " <= " + fmt(laplace_tol));
  if (gillespie > 0)
    report.check("gillespie", "Gillespie return frequency against uniformization", w_z <= sigmas,
                 "max |z| " + fmt(w_z) + " <= " + fmt(sigmas) + " over " + std::to_string(std::min(gillespie, instances)) +
                     " instances of " + std::to_string(paths) + " paths");
}

}  // namespace ergolab::harness
