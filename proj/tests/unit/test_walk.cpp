#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "ergolab/core/error.hpp"
#include "ergolab/core/quadrature.hpp"
#include "ergolab/core/rng.hpp"
#include "ergolab/core/stats.hpp"
#include "ergolab/env/models.hpp"
#include "ergolab/walk/generator.hpp"
#include "ergolab/walk/paths.hpp"
#include "ergolab/walk/solvers.hpp"

using namespace ergolab;
using namespace ergolab::walk;
using env::Bond;
using env::Environment;

namespace {

// Connected random instance on a ring of `states` atoms plus random chords,
// multiplicities in {1, 2, 4}.
Environment random_instance(std::uint64_t seed, std::size_t states) {
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
    bonds.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), c / mult[a],
                     c / mult[b], delta});
  };
  for (std::size_t i = 0; i + 1 < states; ++i) link(i, i + 1);
  const std::size_t chords = states / 2;
  for (std::size_t k = 0; k < chords; ++k) {
    const std::size_t a = rng() % states, b = rng() % states;
    if (a != b) link(a, b);
  }
  const auto side = static_cast<std::int64_t>(4 * states);
  return Environment(Torus(1, side, LatticeMap::identity(1)), 2.0, seed, "random", pos, mult, bonds);
}

Eigen::MatrixXd dense(const SparseGenerator& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    m(i, i) = g.diagonal(i);
    auto c = g.columns(i);
    auto v = g.values(i);
    for (std::size_t k = 0; k < c.size(); ++k) m(i, c[k]) += v[k];
  }
  return m;
}

// Spectral oracle: exp(tL) f and (lambda - L)^-1 f through the symmetrized matrix.
struct Spectral {
  Eigen::VectorXd sq, isq, mu;
  Eigen::MatrixXd q;
  explicit Spectral(const SparseGenerator& g) {
    const auto n = static_cast<Eigen::Index>(g.size());
    sq.resize(n);
    isq.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      sq(i) = std::sqrt(g.mass(i));
      isq(i) = 1 / sq(i);
    }
    Eigen::MatrixXd s = sq.asDiagonal() * dense(g) * isq.asDiagonal();
    s = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    mu = es.eigenvalues();
    q = es.eigenvectors();
  }
  template <class F>
  std::vector<double> apply(const std::vector<double>& f, F&& fn) const {
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    Eigen::VectorXd c = q.transpose() * (sq.asDiagonal() * x);
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= fn(mu(k));
    Eigen::VectorXd y = isq.asDiagonal() * (q * c);
    return {y.data(), y.data() + y.size()};
  }
};

std::vector<double> random_vector(CounterRng& rng, std::size_t n, double lo = -1, double hi = 1) {
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * rng.uniform();
  return v;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> difference(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

Environment two_state() {
  return env::generate_environment(env::ModelSpec::nearest_neighbour(Law::constant(1)), 1, 2, 1);
}

}  // namespace

TEST_CASE("generator assembly") {
  auto g = build_generator(two_state(), 1.0);
  CHECK(g.entry(0, 1) == 2.0);
  CHECK(g.entry(1, 0) == 2.0);
  CHECK(g.diagonal(0) == -2.0);
  CHECK(g.diagonal(1) == -2.0);

  auto m = env::ModelSpec::nearest_neighbour(Law::uniform(1, 2));
  m.multiplicity = Law::two_point(1, 2);
  auto e = env::generate_environment(m, 2, 16, 3);
  auto g4 = build_generator(e, 0.25), g8 = build_generator(e, 0.125);
  std::vector<double> ones(e.size(), 3.5), out(e.size());
  g8.apply(ones, out);
  for (double v : out) CHECK(v == 0.0);
  for (std::size_t i = 0; i < e.size(); ++i) {
    CHECK(g8.diagonal(i) == 4 * g4.diagonal(i));
    auto c = g4.columns(i);
    for (std::size_t k = 0; k < c.size(); ++k) {
      CHECK(g8.values(i)[k] == 4 * g4.values(i)[k]);
      CHECK(g4.values(i)[k] >= 0);
      CHECK(g8.mass(i) * g8.entry(i, c[k]) == g8.mass(c[k]) * g8.entry(c[k], i));
    }
  }
  std::vector<Bond> none;
  Environment split(Torus(1, 4, LatticeMap::identity(1)), 2.0, 0, "x", {{0, 0, 0}, {1, 0, 0}},
                    {1.0, 1.0}, none);
  CHECK_THROWS_AS(build_generator(split, 1.0), DomainError);
}

TEST_CASE("resolvent oracles") {
  auto g = build_generator(two_state(), 1.0);
  std::vector<double> c(2, 3.0);
  auto rc = resolvent(g, 2.0, c);
  CHECK(rc.u[0] == doctest::Approx(1.5).epsilon(1e-12));
  for (double lambda : {0.5, 1.0, 3.0}) {
    std::vector<double> f{1.0, 0.0};
    auto r = resolvent(g, lambda, f, 1e-12);
    const double det = lambda * (lambda + 4);
    CHECK(std::abs(r.u[0] - (lambda + 2) / det) < 1e-10);
    CHECK(std::abs(r.u[1] - 2 / det) < 1e-10);
  }
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto e = random_instance(s, 16 + s % 40);
    auto gen = build_generator(e, 1.0);
    Spectral sp(gen);
    CounterRng rng(s, 1);
    auto f = random_vector(rng, gen.size());
    const double lambda = 0.5 + 3.5 * rng.uniform();
    auto r = resolvent(gen, lambda, f, 1e-10);
    CHECK(r.relative_residual <= 1e-10);
    auto ref = sp.apply(f, [&](double mu) { return 1 / (lambda - mu); });
    CHECK(max_diff(r.u, ref) < 1e-7);
  }
  CHECK_THROWS_AS(resolvent(g, 0.0, c), DomainError);
  std::vector<double> f{1.0, 0.0};
  CHECK_THROWS_AS(resolvent(g, 1.0, f, 1e-14, 0), SolverError);
}

TEST_CASE("semigroup oracles") {
  auto e = two_state();
  auto g = build_generator(e, 1.0);
  std::vector<double> f{1.0, 0.0};
  CHECK(semigroup(g, 0.0, f).u == f);
  std::vector<double> c(2, -2.5);
  for (double v : semigroup(g, 3.0, c).u) CHECK(v == doctest::Approx(-2.5).epsilon(1e-14));
  // Asymmetric two-state chain: a = L_01, b = L_10.
  std::vector<Bond> bond{{0, 1, 3.0, 1.5, {1, 0, 0}}};
  Environment asym(Torus(1, 4, LatticeMap::identity(1)), 2.0, 0, "two", {{0, 0, 0}, {1, 0, 0}},
                   {1.0, 2.0}, bond);
  auto ga = build_generator(asym, 1.0);
  const double a = 3.0, b = 1.5;
  for (double t : {0.01, 0.3, 1.0, 5.0, 40.0}) {
    auto u = semigroup(ga, t, f).u;
    const double decay = std::exp(-(a + b) * t);
    CHECK(std::abs(u[0] - (b / (a + b) + a / (a + b) * decay)) < 1e-10);
    CHECK(std::abs(u[1] - (b / (a + b) - b / (a + b) * decay)) < 1e-10);
  }
  // Long times split into pieces.
  auto big = semigroup(ga, 500.0, f);
  CHECK(big.split_levels > 0);
  CHECK(std::abs(big.u[0] - b / (a + b)) < 1e-10);
  CHECK_THROWS_AS(semigroup(ga, 1e9, f), SolverError);
}

TEST_CASE("semigroup properties on random instances") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto e = random_instance(100 + s, 8 + (s * 7) % 57);
    auto gen = build_generator(e, 1.0);
    Spectral sp(gen);
    CounterRng rng(s, 2);
    auto f = random_vector(rng, gen.size());
    auto h = random_vector(rng, gen.size());
    const double t = 0.1 + 2 * rng.uniform(), r = 0.1 + rng.uniform();
    const double tol = 1e-12;
    auto pt = semigroup(gen, t, f, tol).u;
    auto ref = sp.apply(f, [&](double mu) { return std::exp(t * mu); });
    CHECK(max_diff(pt, ref) < 1e-9);
    auto ptr = semigroup(gen, t + r, f, tol).u;
    auto pr = semigroup(gen, r, f, tol).u;
    auto composed = semigroup(gen, t, pr, tol).u;
    CHECK(gen.norm(difference(ptr, composed)) <= 10 * tol * gen.norm(f) + 1e-13);
    auto pth = semigroup(gen, t, h, tol).u;
    CHECK(std::abs(gen.inner(pt, h) - gen.inner(f, pth)) <= 10 * tol * gen.norm(f) * gen.norm(h) + 1e-13);
    CHECK(gen.norm(pt) <= gen.norm(f) * (1 + 1e-12));
    const double lambda = 0.5 + 3.5 * rng.uniform();
    auto rl = resolvent(gen, lambda, f, 1e-10).u;
    std::vector<double> lr(rl.size());
    for (std::size_t i = 0; i < rl.size(); ++i) lr[i] = lambda * rl[i];
    CHECK(gen.norm(lr) <= gen.norm(f) * (1 + 1e-8));
    auto pos = random_vector(rng, gen.size(), 0, 1);
    for (double v : semigroup(gen, t, pos).u) CHECK(v >= 0);
    for (double v : resolvent(gen, lambda, pos, 1e-12).u) CHECK(v >= -1e-12);
    const double fmin = *std::min_element(f.begin(), f.end());
    const double fmax = *std::max_element(f.begin(), f.end());
    for (double v : pt) {
      CHECK(v >= fmin - 1e-12);
      CHECK(v <= fmax + 1e-12);
    }
  }
}

TEST_CASE("resolvent identity and laplace consistency") {
  auto rule = gauss_legendre(16);
  for (std::uint64_t s = 0; s < 6; ++s) {
    auto e = random_instance(200 + s, 16 + 8 * s);
    auto gen = build_generator(e, 1.0);
    CounterRng rng(s, 3);
    auto f = random_vector(rng, gen.size());
    const double lambda = 0.5 + 3.5 * rng.uniform(), nu = 0.5 + 3.5 * rng.uniform();
    auto rl = resolvent(gen, lambda, f, 1e-12).u;
    auto rn = resolvent(gen, nu, f, 1e-12).u;
    auto rlrn = resolvent(gen, lambda, rn, 1e-12).u;
    double worst = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
      worst = std::max(worst, std::abs(rl[i] - rn[i] - (nu - lambda) * rlrn[i]));
    CHECK(worst <= 1e-6);
    // lambda R f = int_0^inf e^-s P_{s/lambda} f ds, componentwise.
    for (std::size_t i : {std::size_t{0}, f.size() / 2}) {
      const double q = exp_weighted_integral(
          rule, [&](double sv) { return semigroup(gen, sv / lambda, f, 1e-13).u[i]; }, 1.0 / 64, 40.0);
      CHECK(std::abs(q - lambda * rl[i]) <= 1e-6);
    }
  }
}

TEST_CASE("gillespie paths") {
  auto e = two_state();
  CounterRng rng(1, 0);
  auto tr = simulate_path(e, 1.0, 0, 0.0, rng);
  CHECK(tr.times.size() == 1);
  CHECK(tr.atoms[0] == 0);

  // Occupancy of the other state versus uniformization.
  std::vector<Bond> bond{{0, 1, 3.0, 1.5, {1, 0, 0}}};
  Environment asym(Torus(1, 4, LatticeMap::identity(1)), 2.0, 0, "two", {{0, 0, 0}, {1, 0, 0}},
                   {1.0, 2.0}, bond);
  PathSampler sampler(asym, 1.0);
  const double t = 0.2;
  const std::size_t paths = 100000;
  std::vector<double> hit(paths);
  for (std::size_t p = 0; p < paths; ++p) {
    CounterRng r(77, p);
    hit[p] = sampler.endpoint(0, t, r) == 1 ? 1.0 : 0.0;
  }
  auto est = mean_estimate(hit);
  std::vector<double> ind{0.0, 1.0};
  const double ref = semigroup(build_generator(asym, 1.0), t, ind).u[0];
  CHECK(std::abs(est.value - ref) <= 3 * est.std_error);

  // Jump counts: constant rate ring, eps = 1/2.
  auto ring = env::generate_environment(env::ModelSpec::nearest_neighbour(Law::constant(0.5)), 1, 16, 2);
  PathSampler rs(ring, 0.5);
  std::vector<double> jumps;
  for (std::size_t p = 0; p < 4000; ++p) {
    CounterRng r(78, p);
    auto path = rs.simulate(3, 2.0, r);
    for (std::size_t k = 1; k < path.times.size(); ++k) CHECK(path.times[k] > path.times[k - 1]);
    jumps.push_back(static_cast<double>(path.jumps()));
  }
  auto je = mean_estimate(jumps);
  CHECK(std::abs(je.value - 4.0 * 1.0 * 2.0) <= 3 * je.std_error);
}

TEST_CASE("mean squared displacement") {
  auto line = env::generate_environment(env::ModelSpec::nearest_neighbour(Law::constant(1)), 1, 1024, 1);
  auto m = msd_estimate(line, 1.0, 20.0, 4000, 9);
  CHECK(std::abs(m.slope.value - 2.0) <= 3 * m.slope.std_error);
  auto sq = env::generate_environment(env::ModelSpec::nearest_neighbour(Law::constant(1)), 2, 32, 1);
  auto s = msd_estimate(sq, 1.0, 0.01, 40000, 10);
  CHECK(std::abs(s.slope.value - 4.0) <= 3 * s.slope.std_error);
}
