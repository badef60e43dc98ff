#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ergolab/core/cg.hpp"
#include "ergolab/core/envelope.hpp"
#include "ergolab/core/error.hpp"
#include "ergolab/core/geometry.hpp"
#include "ergolab/core/law.hpp"
#include "ergolab/core/parallel.hpp"
#include "ergolab/core/quadrature.hpp"
#include "ergolab/core/rng.hpp"
#include "ergolab/core/stats.hpp"

using namespace ergolab;

TEST_CASE("counter rng is a pure function of key, stream and counter") {
  CounterRng a(42, 3), b(42, 3), c(42, 4);
  for (int i = 0; i < 10; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
  }
  std::int64_t w[2] = {5, -7};
  CHECK(counter_hash(1, 2, w) == counter_hash(1, 2, w));
  CHECK(replica_seed(9, 3) == replica_seed(9, 3));
  CHECK(replica_seed(9, 3) != replica_seed(9, 4));
  double s = 0;
  CounterRng u(7);
  for (int i = 0; i < 100000; ++i) s += u.uniform();
  CHECK(std::abs(s / 100000 - 0.5) < 0.005);
}

TEST_CASE("norms and ball volumes") {
  Point x{3, -4, 0};
  CHECK(norm(x, 2, 2.0) == doctest::Approx(5.0));
  CHECK(norm(x, 2, 1.0) == doctest::Approx(7.0));
  CHECK(norm(x, 2, kInfNorm) == doctest::Approx(4.0));
  CHECK(unit_ball_volume(2, 2.0) == doctest::Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3, 2.0) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
  CHECK(unit_ball_volume(2, 1.0) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(3, kInfNorm) == doctest::Approx(8.0));
  CHECK(half_cube_diameter(2, 2.0) == doctest::Approx(std::sqrt(0.5)));
  CHECK_THROWS_AS(check_kappa(0.5), DomainError);
  CHECK_THROWS_AS(check_dimension(4), DomainError);
}

TEST_CASE("ball enumeration visits every lattice point inside") {
  // Gauss circle numbers: N(5) = 81, N(10) = 317.
  for (auto [r, expect] : {std::pair{5, 81}, std::pair{10, 317}}) {
    int inside = 0;
    for_each_site_in_ball(2, 2.0, r, [&](const Site& j) {
      if (norm(j, 2, 2.0) <= r) ++inside;
    });
    CHECK(inside == expect);
  }
  int count = 0;
  for_each_site_in_ball(3, kInfNorm, 2, [&](const Site&) { ++count; });
  CHECK(count == 125);
  count = 0;
  for_each_site_in_ball(1, 1.0, 4, [&](const Site&) { ++count; });
  CHECK(count == 9);
}

TEST_CASE("torus minimal image and centring") {
  Torus t(2, 8, LatticeMap::identity(2));
  Point d = t.minimal_image({7, -5, 0});
  CHECK(d[0] == -1);
  CHECK(d[1] == 3);
  Point c = t.centred({4, 3, 0});
  CHECK(c[0] == -4);
  CHECK(c[1] == 3);
  CHECK(t.inner_radius(2.0) == doctest::Approx(4.0));
  Torus tri(2, 8, LatticeMap::triangular());
  CHECK(tri.volume() == doctest::Approx(64 * std::sqrt(3.0) / 2));
  Point back = tri.lattice().apply_inverse(tri.lattice().apply({2, 3, 0}));
  CHECK(back[0] == doctest::Approx(2));
  CHECK(back[1] == doctest::Approx(3));
}

TEST_CASE("envelope lattice tails are upper bounds") {
  // Brute-force n^-d sum over |j| > R, truncated far out plus the bound's own remainder.
  struct Case {
    Envelope e;
    int d;
    double kappa;
    double n;
    std::int64_t r;
  };
  std::vector<Case> cases = {
      {Envelope::power(1, 8), 2, 2.0, 4, 10},  {Envelope::power(1, 5), 1, 2.0, 8, 20},
      {Envelope::gaussian(1, std::numbers::pi), 2, 2.0, 4, 8},
      {Envelope::gaussian(1, 1.0), 1, kInfNorm, 2, 5}, {Envelope::compact(2, 3), 2, 1.0, 2, 3},
      {Envelope::power(1, 8), 2, kInfNorm, 2, 6}};
  for (const auto& c : cases) {
    const std::int64_t far = 400;
    double sum = 0;
    for_each_site_in_ball(c.d, c.kappa, far, [&](const Site& j) {
      const double r = norm(j, c.d, c.kappa);
      if (r > c.r && r <= far) sum += c.e(r / c.n);
    });
    sum /= std::pow(c.n, c.d);
    const double bound = c.e.lattice_tail(c.d, c.kappa, c.n, c.r);
    CHECK(sum <= bound);
    CHECK(bound < 200 * sum + 1e-12);
  }
  const auto e = Envelope::power(1, 8);
  const auto r = e.radius_for(2, 2.0, 16, 1e-6);
  CHECK(e.lattice_tail(2, 2.0, 16, r) <= 1e-6);
  CHECK(e.lattice_tail(2, 2.0, 16, r - 1) > 1e-6);
}

TEST_CASE("goodness remainder") {
  CHECK(std::isinf(Envelope::power(1, 6).goodness_remainder(2, 0.1, 10)));
  const auto e = Envelope::power(1, 8);
  double tail = 0;
  for (int m = 11; m < 2000000; ++m) tail += std::pow(m, 4) * e(m) * std::pow(1.0 + m, 1.1);
  CHECK(tail <= e.goodness_remainder(2, 0.1, 10));
  CHECK(std::isfinite(Envelope::gaussian(1, 0.5).goodness_remainder(3, 0.1, 10)));
  CHECK(Envelope::compact(1, 4).goodness_remainder(1, 0.1, 10) == 0.0);
}

TEST_CASE("statistics") {
  std::vector<double> xs{1, 2, 3, 4};
  auto m = mean_estimate(xs);
  CHECK(m.value == doctest::Approx(2.5));
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  std::vector<double> num{2, 4, 6}, den{1, 2, 3};
  auto r = jackknife_ratio(num, den);
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(r.std_error == doctest::Approx(0.0));
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);
  std::vector<double> a, b;
  CounterRng g(3);
  for (int i = 0; i < 2000; ++i) {
    a.push_back(g.uniform());
    b.push_back(g.uniform());
  }
  CHECK(ks_two_sample(a, b).p_value > 0.001);
  for (auto& v : b) v += 0.2;
  CHECK(ks_two_sample(a, b).p_value < 1e-6);
}

TEST_CASE("conjugate gradient on a weighted SPD system") {
  // A = M^-1 K with K SPD and M diagonal is self-adjoint in <u,v>_M.
  const std::vector<double> mass{1, 2, 4};
  const double k[3][3] = {{4, -1, 0}, {-1, 4, -1}, {0, -1, 4}};
  auto apply = [&](std::span<const double> x, std::span<double> y) {
    for (int i = 0; i < 3; ++i) {
      y[i] = 0;
      for (int j = 0; j < 3; ++j) y[i] += k[i][j] * x[j];
      y[i] /= mass[i];
    }
  };
  auto inner = [&](std::span<const double> u, std::span<const double> v) {
    double s = 0;
    for (int i = 0; i < 3; ++i) s += mass[i] * u[i] * v[i];
    return s;
  };
  auto ident = [](std::span<const double> x, std::span<double> y) {
    std::copy(x.begin(), x.end(), y.begin());
  };
  std::vector<double> b{1, 2, 3}, x(3, 0.0), y(3);
  auto out = conjugate_gradient(apply, ident, inner, b, x, {1e-13, 100});
  CHECK(out.converged);
  apply(x, y);
  for (int i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("quadrature rules") {
  auto gl = gauss_legendre(8);
  double s = 0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 14);
  CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
  auto gh = gauss_hermite_normal(64);
  double m0 = 0, m2 = 0, m4 = 0, c = 0;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
    const double x = gh.nodes[i];
    m0 += gh.weights[i];
    m2 += gh.weights[i] * x * x;
    m4 += gh.weights[i] * x * x * x * x;
    c += gh.weights[i] * std::cos(x);
  }
  CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(c == doctest::Approx(std::exp(-0.5)).epsilon(1e-13));
  // int_0^inf e^-s (1+s)^-1/2 ds = e sqrt(pi) erfc(1)
  const double ref = std::exp(1.0) * std::sqrt(std::numbers::pi) * std::erfc(1.0);
  const double v = exp_weighted_integral(gauss_legendre(16), [](double t) { return 1 / std::sqrt(1 + t); },
                                         1.0 / 64, 40.0);
  CHECK(std::abs(v - ref) < 1e-12);
}

TEST_CASE("laws") {
  auto l = Law::parse("uniform(1,2)");
  CHECK(l.mean() == doctest::Approx(1.5));
  CHECK(l.sample(0.5) == doctest::Approx(1.5));
  CHECK(Law::parse("bernoulli(0.3)").sample(0.29) == 1.0);
  CHECK(Law::parse("bernoulli(0.3)").sample(0.31) == 0.0);
  CHECK(Law::parse("two_point(1,2)").mean() == doctest::Approx(1.5));
  CHECK(Law::parse("exp(1)").mean() == 1.0);
  CHECK(!Law::parse("exp(1)").bounded());
  CHECK(Law::parse("constant(3)").deterministic());
  CHECK(Law::parse(Law::two_point(1, 2, 0.25).describe()).mean() == doctest::Approx(1.75));
  CHECK_THROWS_AS(Law::parse("gamma(2)"), DomainError);
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
}
