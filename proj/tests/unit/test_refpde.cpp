#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ergolab/core/error.hpp"
#include "ergolab/core/rng.hpp"
#include "ergolab/env/models.hpp"
#include "ergolab/refpde/convergence.hpp"
#include "ergolab/refpde/heat.hpp"

using namespace ergolab;
using namespace ergolab::refpde;

namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  int i = 0;
  for (auto& r : rows) {
    int j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Adaptive Simpson, used as an independent time-integration oracle.
template <class F>
double simpson(F&& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
               int depth) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
    return left + right + (left + right - whole) / 15;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <class F>
double adaptive(F&& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, 50);
}

}  // namespace

TEST_CASE("diffusion spec") {
  DiffusionSpec s(mat({{2, 0}, {0, 0}}));
  CHECK(s.rank() == 1);
  CHECK((s.Q().transpose() * s.Q() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(DiffusionSpec(mat({{1, 2}, {0, 1}})), DomainError);
  CHECK_THROWS_AS(DiffusionSpec(mat({{-1}})), DomainError);
  CHECK(DiffusionSpec(mat({{0, 0}, {0, 0}})).rank() == 0);
}

TEST_CASE("heat semigroup") {
  Function bump = [](const Point& x) { return std::exp(-x[0] * x[0] / 2); };
  DiffusionSpec zero(mat({{0}}));
  CHECK(heat_semigroup(zero, 3.0, bump, {0.7, 0, 0}) == bump({0.7, 0, 0}));
  DiffusionSpec half(mat({{0.5}}));
  Function c = [](const Point&) { return 2.5; };
  CHECK(heat_semigroup(half, 4.0, c, {1, 0, 0}) == doctest::Approx(2.5).epsilon(1e-14));
  for (double t : {0.0, 0.1, 1.0, 3.0})
    for (double x : {0.0, 0.5, -2.0}) {
      const double exact = std::exp(-x * x / (2 * (1 + t))) / std::sqrt(1 + t);
      CHECK(std::abs(heat_semigroup(half, t, bump, {x, 0, 0}) - exact) < 1e-12);
      CHECK(std::abs(gaussian_semigroup(half, t, Gaussian{}, {x, 0, 0}) - exact) < 1e-14);
    }
  // Closed form against tensor quadrature for an anisotropic 2d matrix.
  DiffusionSpec aniso(mat({{1.0, 0.3}, {0.3, 0.5}}));
  Gaussian g{1.5, 0.8};
  Function gf = [&](const Point& x) { return g(x, 2); };
  for (double t : {0.2, 1.0}) {
    Point x{0.3, -0.4, 0};
    CHECK(std::abs(heat_semigroup(aniso, t, gf, x) - gaussian_semigroup(aniso, t, g, x)) < 1e-10);
  }
  // A rough function defeats order 64.
  Function step = [](const Point& x) { return std::abs(x[0] - 0.3); };
  CHECK_THROWS_AS(heat_semigroup(half, 1.0, step, {0, 0, 0}, 1e-12, 8), SolverError);
}

TEST_CASE("heat semigroup properties") {
  CounterRng rng(3, 0);
  DiffusionSpec spec(mat({{0.7, 0.1}, {0.1, 0.4}}));
  for (int k = 0; k < 10; ++k) {
    Gaussian g{0.5 + rng.uniform(), 0.5 + rng.uniform()};
    Gaussian big{g.amplitude + 0.1, g.sigma};
    const Point x{2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 0};
    const double t = 0.1 + rng.uniform(), s = 0.1 + rng.uniform();
    Function inner = [&](const Point& y) { return gaussian_semigroup(spec, s, g, y); };
    const double composed = heat_semigroup(spec, t, inner, x);
    CHECK(std::abs(composed - gaussian_semigroup(spec, t + s, g, x)) <= 1e-8);
    CHECK(gaussian_semigroup(spec, t, g, x) <= gaussian_semigroup(spec, t, big, x));
  }
  // D = diag(D1, 0) with product data factorizes.
  DiffusionSpec degenerate(mat({{0.8, 0}, {0, 0}}));
  DiffusionSpec one(mat({{0.8}}));
  Function g1 = [](const Point& x) { return 1 / (1 + x[0] * x[0]); };
  Function prod = [](const Point& x) { return std::cos(x[1]) / (1 + x[0] * x[0]); };
  for (double y : {0.0, 1.0, 2.5}) {
    const Point x{0.4, y, 0};
    const double lhs = heat_semigroup(degenerate, 0.5, prod, x, 1e-6);
    CHECK(std::abs(lhs - heat_semigroup(one, 0.5, g1, {0.4, 0, 0}, 1e-6) * std::cos(y)) < 1e-12);
  }
  // Pairing against a Riemann sum.
  Gaussian g{1.2, 0.7};
  double riemann = 0;
  const double h = 0.02;
  for (int i = -400; i <= 400; ++i)
    for (int j = -400; j <= 400; ++j) {
      const Point x{i * h, j * h, 0};
      riemann += g(x, 2) * gaussian_semigroup(spec, 0.6, g, x) * h * h;
    }
  CHECK(gaussian_pairing(spec, 0.6, g) == doctest::Approx(riemann).epsilon(1e-9));
}

TEST_CASE("heat resolvent") {
  DiffusionSpec half(mat({{0.5}}));
  Function c = [](const Point&) { return 3.0; };
  CHECK(heat_resolvent(half, 2.0, c, {0, 0, 0}) == doctest::Approx(1.5).epsilon(1e-12));
  Function bump = [](const Point& x) { return std::exp(-x[0] * x[0] / 2); };
  DiffusionSpec zero(mat({{0}}));
  CHECK(heat_resolvent(zero, 4.0, bump, {1, 0, 0}) == doctest::Approx(bump({1, 0, 0}) / 4).epsilon(1e-15));
  const double value = heat_resolvent(half, 1.0, bump, {0, 0, 0});
  // int_0^inf e^{-t} (1+t)^{-1/2} dt, with u = sqrt(t) to remove nothing singular.
  const double oracle =
      adaptive([](double t) { return std::exp(-t) / std::sqrt(1 + t); }, 0.0, 60.0, 1e-13);
  CHECK(std::abs(value - oracle) < 1e-8);
  CHECK(std::abs(oracle - std::exp(1.0) * std::sqrt(std::numbers::pi) * std::erfc(1.0)) < 1e-10);
  CHECK(std::abs(gaussian_resolvent(half, 1.0, Gaussian{}, {0, 0, 0}) - oracle) < 1e-10);
  // lambda R f -> f with an O(1/lambda) error.
  const Point x{0.3, 0, 0};
  const double e2 = std::abs(1e2 * heat_resolvent(half, 1e2, bump, x) - bump(x));
  const double e4 = std::abs(1e4 * heat_resolvent(half, 1e4, bump, x) - bump(x));
  CHECK(e2 < 1e-2);
  CHECK(e4 < 1e-4);
  CHECK(e4 < e2 / 50);
  CHECK_THROWS_AS(heat_resolvent(half, 0.0, bump, x), DomainError);
}

TEST_CASE("torus heat flow") {
  const int n = 64;
  Eigen::MatrixXd one = mat({{1}});
  std::vector<double> flat(n, 0.3), rho(n);
  for (double v : heat_pde_torus(one, flat, n, 0.7)) CHECK(std::abs(v - 0.3) < 1e-15);
  for (int k = 0; k < n; ++k) rho[k] = 0.5 + 0.25 * std::sin(2 * std::numbers::pi * k / n);
  const double t = 0.05;
  auto out = heat_pde_torus(one, rho, n, t);
  const double decay = std::exp(-4 * std::numbers::pi * std::numbers::pi * t);
  double mean_in = 0, mean_out = 0;
  for (int k = 0; k < n; ++k) {
    CHECK(std::abs(out[k] - (0.5 + 0.25 * decay * std::sin(2 * std::numbers::pi * k / n))) < 1e-13);
    mean_in += rho[k];
    mean_out += out[k];
  }
  CHECK(std::abs(mean_in - mean_out) / n < 1e-12);
  // 2d: composition and mass conservation for random data.
  const int m = 16;
  Eigen::MatrixXd D = mat({{1.0, 0.2}, {0.2, 0.6}});
  CounterRng rng(1, 1);
  std::vector<double> field(m * m);
  for (auto& v : field) v = rng.uniform();
  auto whole = heat_pde_torus(D, field, m, 0.003);
  auto twice = heat_pde_torus(D, heat_pde_torus(D, field, m, 0.001), m, 0.002);
  double s0 = 0, s1 = 0;
  for (int k = 0; k < m * m; ++k) {
    CHECK(std::abs(whole[k] - twice[k]) < 1e-12);
    s0 += field[k];
    s1 += whole[k];
  }
  CHECK(std::abs(s0 - s1) / (m * m) < 1e-12);
  // Mode (1, 0) along x_1 decays with D_11.
  std::vector<double> mode(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) mode[i * m + j] = std::cos(2 * std::numbers::pi * i / m);
  auto md = heat_pde_torus(D, mode, m, 0.01);
  CHECK(md[0] == doctest::Approx(std::exp(-4 * std::numbers::pi * std::numbers::pi * 0.01)).epsilon(1e-12));
}

TEST_CASE("convergence table") {
  auto e = env::generate_environment(env::ModelSpec::nearest_neighbour(Law::constant(1)), 2, 384, 1);
  DiffusionSpec spec(Eigen::MatrixXd::Identity(2, 2));
  Gaussian g{1.0, 0.5};
  TestFunction f{"gaussian", [g](const Point& x) { return g(x, 2); },
                 Envelope::gaussian(1.0, 1 / (2 * g.sigma * g.sigma)), g, {}};
  const std::vector<double> grid{1.0 / 8, 1.0 / 16, 1.0 / 32};
  auto check_decrease = [](const std::vector<ConvergenceRow>& rows) {
    for (std::size_t k = 1; k < rows.size(); ++k) {
      CHECK(rows[k].err2 < rows[k - 1].err2);
      CHECK(rows[k].err1 < rows[k - 1].err1);
    }
    CHECK(rows.back().err2 < 0.01 * rows.back().ref_norm2);
    CHECK(rows.back().reference_edge < 1e-5);
  };
  check_decrease(convergence_table(e, spec, f, Operation::semigroup, 0.5, grid));
  // The resolvent decays only exponentially; a long 1d torus keeps wrap-around away.
  auto line = env::generate_environment(env::ModelSpec::nearest_neighbour(Law::constant(1)), 1, 2048, 1);
  DiffusionSpec spec1(Eigen::MatrixXd::Identity(1, 1));
  TestFunction f1{"gaussian", [g](const Point& x) { return g(x, 1); }, f.envelope, g, {}};
  check_decrease(convergence_table(line, spec1, f1, Operation::resolvent, 1.0, grid));
  auto zero_rows = convergence_table(e, spec, f, Operation::semigroup, 0.0, grid);
  for (const auto& r : zero_rows) CHECK(r.err2 == 0.0);
  TestFunction nothing{"zero", [](const Point&) { return 0.0; }, Envelope::compact(1.0, 0.0), {}, {}};
  auto small = env::generate_environment(env::ModelSpec::nearest_neighbour(Law::uniform(1, 2)), 1, 16, 2);
  for (const auto& r : convergence_table(small, spec1, nothing, Operation::resolvent, 1.0, {0.25, 0.125})) {
    CHECK(r.err2 == 0.0);
    CHECK(r.err1 == 0.0);
    CHECK(r.ref_norm2 == 0.0);
  }
  TestFunction wide{"gaussian", [](const Point& x) { return Gaussian{}(x, 1); }, Envelope::gaussian(1.0, 0.5),
                    Gaussian{}, {}};
  CHECK_THROWS_AS(convergence_table(small, spec1, wide, Operation::semigroup, 0.5, {0.25}), DomainError);
}
