#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "doctest.h"
#include "ergolab/core/error.hpp"
#include "ergolab/core/rng.hpp"
#include "ergolab/env/estimators.hpp"
#include "ergolab/env/field.hpp"
#include "ergolab/env/io.hpp"
#include "ergolab/env/measure.hpp"
#include "ergolab/env/models.hpp"

using namespace ergolab;
using namespace ergolab::env;

namespace {

using BondKey = std::tuple<std::size_t, std::size_t, long, long, long>;

std::map<BondKey, double> bond_map(const Environment& e) {
  std::map<BondKey, double> m;
  for (const auto& b : e.bonds()) {
    BondKey k{b.from, b.to, std::lround(b.displacement[0]), std::lround(b.displacement[1]),
              std::lround(b.displacement[2])};
    m[k] += b.rate_forward;
  }
  return m;
}

std::size_t site_index(const Site& s, int d, std::int64_t side) {
  std::size_t k = 0;
  for (int i = 0; i < d; ++i) k = k * side + static_cast<std::size_t>(wrap_index(s[i], side));
  return k;
}

Site site_of(std::size_t k, int d, std::int64_t side) {
  Site s{0, 0, 0};
  for (int i = d - 1; i >= 0; --i) {
    s[i] = static_cast<std::int64_t>(k % side);
    k /= side;
  }
  return s;
}

bool same(const Environment& a, const Environment& b) {
  if (a.size() != b.size() || a.bonds().size() != b.bonds().size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.position(i) != b.position(i) || a.multiplicity(i) != b.multiplicity(i)) return false;
  for (std::size_t k = 0; k < a.bonds().size(); ++k) {
    const auto &x = a.bonds()[k], &y = b.bonds()[k];
    if (x.from != y.from || x.to != y.to || x.rate_forward != y.rate_forward ||
        x.rate_backward != y.rate_backward || x.displacement != y.displacement)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("constant nearest-neighbour environment") {
  auto env = generate_environment(ModelSpec::nearest_neighbour(Law::constant(1)), 2, 4, 1);
  CHECK(env.size() == 16);
  for (std::size_t i = 0; i < env.size(); ++i) {
    CHECK(env.multiplicity(i) == 1.0);
    CHECK(env.neighbors(i).size() == 4);
    for (const auto& nb : env.neighbors(i)) CHECK(nb.rate == 1.0);
  }
  CHECK(env.connected());
}

TEST_CASE("uniform conductances in d = 1") {
  auto env = generate_environment(ModelSpec::nearest_neighbour(Law::uniform(1, 2)), 1, 8, 7);
  CHECK(env.size() == 8);
  CHECK(env.bonds().size() == 8);
  for (const auto& b : env.bonds()) {
    CHECK(b.rate_forward >= 1.0);
    CHECK(b.rate_forward <= 2.0);
  }
  CHECK(env.detailed_balance_exact());
  CHECK(same(env, generate_environment(ModelSpec::nearest_neighbour(Law::uniform(1, 2)), 1, 8, 7)));
}

TEST_CASE("random multiplicities keep detailed balance bit-exact") {
  auto m = ModelSpec::nearest_neighbour(Law::uniform(0.3, 3.7));
  m.multiplicity = Law::two_point(1, 2);
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto env = generate_environment(m, 2, 8, s);
    CHECK(env.detailed_balance_exact());
    for (const auto& b : env.bonds())
      CHECK(env.multiplicity(b.from) * b.rate_forward == env.multiplicity(b.to) * b.rate_backward);
  }
  m.multiplicity = Law::two_point(1, 3);
  CHECK_THROWS_AS(generate_environment(m, 2, 8, 1), DomainError);
}

TEST_CASE("poisson atom counts") {
  std::vector<double> counts;
  for (std::uint64_t s = 0; s < 1000; ++s)
    counts.push_back(static_cast<double>(sample_poisson_points(2.0, 2, 8, replica_seed(5, s)).size()));
  auto est = mean_estimate(counts);
  CHECK(std::abs(est.value - 128.0) <= 3 * est.std_error);
  auto env = generate_environment(ModelSpec::poisson(2.0), 2, 8, 3);
  CHECK(env.detailed_balance_exact());
  CHECK(env.connected());
  for (const auto& b : env.bonds()) CHECK(norm(b.displacement, 2, 2.0) < 4.0);
}

TEST_CASE("model preconditions") {
  CHECK_THROWS_AS(generate_environment(ModelSpec::long_range(Law::constant(1), 4.0), 2, 8, 1),
                  DomainError);
  auto sparse = ModelSpec::poisson(0.05);
  sparse.range = 0.5;
  sparse.max_retries = 2;
  CHECK_THROWS_WITH_AS(generate_environment(sparse, 2, 16, 1), doctest::Contains("disconnected"),
                       DomainError);
  CHECK_THROWS_AS(generate_environment(ModelSpec::triangular(Law::constant(1)), 1, 8, 1), DomainError);
}

TEST_CASE("torus edge convention at L = 2") {
  auto env = generate_environment(ModelSpec::nearest_neighbour(Law::constant(1)), 1, 2, 1);
  CHECK(env.bonds().size() == 2);
  CHECK(env.escape_rate(0) == 2.0);
  CHECK(env.escape_rate(1) == 2.0);
}

TEST_CASE("lambda_k") {
  for (int d = 1; d <= 3; ++d) {
    auto env = generate_environment(ModelSpec::nearest_neighbour(Law::constant(0.75)), d, 4, 1);
    CHECK(lambda_k(env, 0, 0) == doctest::Approx(2 * d * 0.75));
    CHECK(lambda_k(env, 3, 2) == doctest::Approx(2 * d * 0.75));
  }
  auto lr = ModelSpec::long_range(Law::uniform(0.5, 1.5), 5.0);
  auto env = generate_environment(lr, 2, 12, 4);
  for (std::size_t x : {0ul, 17ul, 100ul}) {
    double brute = 0;
    for (const auto& b : env.bonds()) {
      const double r = norm(b.displacement, 2, 2.0);
      if (b.from == x) brute += b.rate_forward * r * r;
      if (b.to == x) brute += b.rate_backward * r * r;
    }
    CHECK(lambda_k(env, x, 2) == doctest::Approx(brute).epsilon(1e-12));
  }
  CHECK(env.lambda2_truncation_bound() > 0);
  CHECK(std::isfinite(env.lambda2_truncation_bound()));
  CHECK_THROWS_AS(lambda_k(env, env.size(), 0), DomainError);
}

TEST_CASE("hash-field translation covariance") {
  const std::int64_t side = 6;
  std::vector<ModelSpec> models{ModelSpec::nearest_neighbour(Law::uniform(1, 2)),
                                ModelSpec::long_range(Law::uniform(0.5, 1.5), 5.0)};
  models[0].multiplicity = Law::two_point(1, 2);
  for (const auto& model : models) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto base = bond_map(generate_environment(model, 2, side, seed));
      const auto base_env = generate_environment(model, 2, side, seed);
      CounterRng rng(seed, 99);
      for (int trial = 0; trial < (model.family == ModelSpec::Family::zd_nn ? 100 : 10); ++trial) {
        Site g{static_cast<std::int64_t>(rng() % 40) - 20, static_cast<std::int64_t>(rng() % 40) - 20, 0};
        const auto moved = generate_environment(model, 2, side, seed, 2.0, g);
        bool ok = true;
        for (std::size_t k = 0; k < moved.size(); ++k) {
          Site s = site_of(k, 2, side);
          const std::size_t t = site_index({s[0] + g[0], s[1] + g[1], 0}, 2, side);
          ok = ok && moved.multiplicity(k) == base_env.multiplicity(t);
        }
        for (const auto& [key, rate] : bond_map(moved)) {
          auto [from, to, dx, dy, dz] = key;
          Site sf = site_of(from, 2, side), st = site_of(to, 2, side);
          BondKey shifted{site_index({sf[0] + g[0], sf[1] + g[1], 0}, 2, side),
                          site_index({st[0] + g[0], st[1] + g[1], 0}, 2, side), dx, dy, dz};
          auto it = base.find(shifted);
          ok = ok && it != base.end() && it->second == rate;
        }
        CHECK(ok);
      }
    }
  }
}

TEST_CASE("palm expectations") {
  auto m = ModelSpec::nearest_neighbour(Law::uniform(1, 2));
  auto one = palm_expectation(m, 2, 8, [](const Environment&, std::size_t) { return 1.0; }, 10, 1);
  CHECK(one.value == 1.0);
  auto lam = palm_expectation(
      m, 2, 16, [](const Environment& e, std::size_t x) { return lambda_k(e, x, 0); }, 40, 2);
  CHECK(std::abs(lam.value - 6.0) <= 3 * lam.std_error);
  auto mult = ModelSpec::nearest_neighbour(Law::constant(1));
  mult.multiplicity = Law::two_point(1, 2);
  auto n0 = palm_expectation(
      mult, 2, 16, [](const Environment& e, std::size_t x) { return e.multiplicity(x); }, 40, 3);
  CHECK(std::abs(n0.value - 5.0 / 3.0) <= 3 * n0.std_error);
  CHECK_THROWS_AS(palm_expectation(ModelSpec::triangular(Law::constant(1)), 2, 8,
                                   [](const Environment&, std::size_t) { return 1.0; }, 2, 1),
                  DomainError);
}

TEST_CASE("rescale and integrate") {
  AtomicMeasure single(1, {{2, 0, 0}}, {3.0});
  CHECK(integrate(rescale(single, 1.0), [](const Point& x) { return x[0]; }) == 6.0);
  auto half = rescale(single, 0.5);
  CHECK(half.position(0)[0] == 1.0);
  CHECK(half.mass(0) == 1.5);

  auto counting = sample_measure(ModelSpec::nearest_neighbour(Law::constant(1)), 1, 8, 0);
  auto eighth = rescale(counting, 1.0 / 8);
  CHECK(eighth.size() == 8);
  CHECK(eighth.total_mass() == 1.0);
  for (std::size_t i = 0; i < 8; ++i) CHECK(eighth.mass(i) == 0.125);

  auto big = sample_measure(ModelSpec::nearest_neighbour(Law::constant(1)), 1, 2 * 256 * 8, 0);
  auto riemann = rescale(big, 1.0 / 256);
  const double v = integrate(riemann, [](const Point& x) { return std::exp(-std::numbers::pi * x[0] * x[0]); });
  CHECK(std::abs(v - 1.0) <= 1e-2);

  // mu^eps(phi) = eps^d mu(phi(eps .)) bit for bit
  auto pp = sample_measure(ModelSpec::poisson(2.0), 2, 16, 9);
  for (double eps : {0.5, 0.25, 0.125}) {
    auto phi = [](const Point& x) { return std::exp(-x[0] * x[0] - 0.5 * x[1] * x[1]); };
    const double lhs = integrate(rescale(pp, eps), phi);
    const double rhs = integrate(pp, [&](const Point& x) {
      return eps * eps * phi({eps * x[0], eps * x[1], 0.0});
    });
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
  }
}

TEST_CASE("poisson measure limit") {
  std::vector<double> vals;
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto mu = rescale(sample_measure(ModelSpec::poisson(2.0), 2, 64, replica_seed(11, s)), 1.0 / 8);
    vals.push_back(integrate(mu, [](const Point& x) {
      return std::exp(-std::numbers::pi * (x[0] * x[0] + x[1] * x[1]));
    }));
  }
  auto est = mean_estimate(vals);
  CHECK(std::abs(est.value - 2.0) <= 3 * est.std_error);
}

TEST_CASE("tail mass") {
  auto counting = sample_measure(ModelSpec::nearest_neighbour(Law::constant(1)), 1, 20000, 0);
  const double zeta4 = std::pow(std::numbers::pi, 4) / 90.0;
  const auto theta = Envelope::power(1, 4);
  CHECK(tail_mass(counting, theta, 1.0) == doctest::Approx(2 * (zeta4 - 1)).epsilon(1e-10));
  CHECK(tail_mass(counting, theta, 10001.0) == 0.0);
  double prev = tail_mass(counting, theta, 0.0);
  for (double ell : {0.5, 1.0, 3.0, 7.5, 100.0}) {
    const double t = tail_mass(counting, theta, ell);
    CHECK(t <= prev);
    prev = t;
  }
  const double a = tail_mass(counting, theta, 2.0) - tail_mass(counting, theta, 5.0);
  const double b = tail_mass(counting, theta, 5.0) - tail_mass(counting, theta, 9.0);
  CHECK(a + b == doctest::Approx(tail_mass(counting, theta, 2.0) - tail_mass(counting, theta, 9.0)));
  auto sq = sample_measure(ModelSpec::nearest_neighbour(Law::constant(1)), 2, 16, 0);
  // Compact envelope with theta = 1 up to radius 2: lattice points with 0 < |x| <= 2 in the l^2 ball.
  CHECK(tail_mass(sq, Envelope::compact(1, 2), 0.0) == 13.0);
}

TEST_CASE("intensity") {
  auto c = intensity_estimate(ModelSpec::nearest_neighbour(Law::constant(1)), 2, 8, 4, 1);
  CHECK(c.estimate.value == 1.0);
  CHECK(c.estimate.std_error == 0.0);
  CHECK(c.assumption_ok);
  auto p = intensity_estimate(ModelSpec::poisson(2.0), 2, 16, 200, 2);
  CHECK(std::abs(p.estimate.value - 2.0) <= 3 * p.estimate.std_error);
  auto m = ModelSpec::nearest_neighbour(Law::constant(1));
  m.multiplicity = Law::two_point(1, 2);
  auto q = intensity_estimate(m, 2, 16, 50, 3);
  CHECK(std::abs(q.estimate.value - 1.5) <= 3 * q.estimate.std_error);
  auto tri = intensity_estimate(ModelSpec::triangular(Law::constant(1)), 2, 8, 2, 1);
  CHECK(tri.estimate.value == doctest::Approx(2 / std::sqrt(3.0)));
}

TEST_CASE("scalar fields") {
  auto f = ScalarField::iid(2, Law::bernoulli(0.3), 77);
  auto g = f.shifted({5, -3, 0});
  for (std::int64_t i = -4; i < 4; ++i)
    for (std::int64_t j = -4; j < 4; ++j) CHECK(g({i, j, 0}) == f({i + 5, j - 3, 0}));
  auto stored = f.materialize(6);
  CHECK(stored.covers(6));
  CHECK(!stored.covers(7));
  CHECK(stored({-6, 6, 0}) == f({-6, 6, 0}));
  CHECK_THROWS_AS(stored({7, 0, 0}), DomainError);
  CHECK(!stored.shifted({1, 0, 0}).covers(6));
  int first = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto mix = ScalarField::mixture(2, Law::bernoulli(0.2), Law::bernoulli(0.8), s);
    REQUIRE(mix.component_label().has_value());
    first += *mix.component_label() == 0;
    CHECK(mix.law()->mean() == (*mix.component_label() == 0 ? 0.2 : 0.8));
  }
  CHECK(first > 70);
  CHECK(first < 130);
  CHECK(ScalarField::constant(1, 2.5)({9, 0, 0}) == 2.5);
}

TEST_CASE("environment file round trip") {
  auto m = ModelSpec::nearest_neighbour(Law::uniform(1, 2));
  m.multiplicity = Law::two_point(1, 2);
  for (int d = 1; d <= 3; ++d) {
    auto env = generate_environment(m, d, 5, 21);
    std::stringstream ss;
    write_environment(ss, env);
    auto back = read_environment(ss);
    CHECK(same(env, back));
    CHECK(back.model_tag() == env.model_tag());
    CHECK(back.seed() == 21);
  }
  auto tri = generate_environment(ModelSpec::triangular(Law::uniform(1, 2)), 2, 5, 2);
  std::stringstream ts;
  write_environment(ts, tri);
  auto tri_back = read_environment(ts);
  CHECK(tri_back.torus().lattice().det() == doctest::Approx(std::sqrt(3.0) / 2));
  for (std::size_t k = 0; k < tri.bonds().size(); ++k)
    for (int i = 0; i < 2; ++i)
      CHECK(tri_back.bonds()[k].displacement[i] ==
            doctest::Approx(tri.bonds()[k].displacement[i]));
  std::stringstream broken("2 4 2 zd_nn 1\n# atoms 1\n0 0 0\n");
  CHECK_THROWS_AS(read_environment(broken), DomainError);
}
