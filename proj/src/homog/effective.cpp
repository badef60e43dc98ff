#include "ergolab/homog/effective.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergolab/core/cg.hpp"
#include "ergolab/core/error.hpp"
#include "ergolab/core/parallel.hpp"
#include "ergolab/core/rng.hpp"

namespace ergolab::homog {

namespace {

double dot(const Point& a, const Point& b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

double mass(const env::Environment& env) { return env.total_mass(); }

}  // namespace

double corrector_energy(const env::Environment& env, const Point& a, const std::vector<double>& chi) {
  const int d = env.dim();
  CompensatedSum s;
  for (const auto& b : env.bonds()) {
    const double c = env.multiplicity(b.from) * b.rate_forward;
    const double g = dot(a, b.displacement, d) + chi[b.to] - chi[b.from];
    s.add(c * g * g);
  }
  return s.value() / mass(env);
}

Corrector corrector_solve(const env::Environment& env, const Point& a, double tol) {
  const int d = env.dim();
  bool nonzero = false;
  for (int i = 0; i < d; ++i) nonzero |= a[i] != 0.0;
  if (!nonzero) throw DomainError("corrector direction must be nonzero");
  if (!(tol > 0)) throw DomainError("corrector tolerance must be positive");
  if (!env.connected()) throw DomainError("corrector needs a connected environment");
  const std::size_t n = env.size();
  const auto& bonds = env.bonds();

  std::vector<double> weight(bonds.size()), diag(n, 0.0), rhs(n, 0.0);
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    const auto& b = bonds[k];
    weight[k] = env.multiplicity(b.from) * b.rate_forward;
    if (b.from == b.to) continue;
    const double flux = weight[k] * dot(a, b.displacement, d);
    diag[b.from] += weight[k];
    diag[b.to] += weight[k];
    // Normal equations: Laplacian chi = sum_b c_b (a.delta_b) (e_from - e_to).
    rhs[b.from] += flux;
    rhs[b.to] -= flux;
  }

  auto apply = [&](std::span<const double> x, std::span<double> y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t k = 0; k < bonds.size(); ++k) {
      const auto& b = bonds[k];
      const double g = weight[k] * (x[b.from] - x[b.to]);
      y[b.from] += g;
      y[b.to] -= g;
    }
  };
  auto jacobi = [&](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = diag[i] > 0 ? x[i] / diag[i] : 0.0;
  };
  auto inner = [](std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
  };
  auto project = [n](std::span<double> r) {
    double m = 0.0;
    for (double v : r) m += v;
    m /= static_cast<double>(n);
    for (auto& v : r) v -= m;
  };

  Corrector out;
  out.chi.assign(n, 0.0);
  out.upper_bound = corrector_energy(env, a, out.chi);
  const CgOutcome cg = conjugate_gradient(apply, jacobi, inner, rhs, out.chi,
                                          {tol, 20 * n + 1000}, project);
  out.iterations = cg.iterations;
  out.relative_residual = cg.rhs_norm > 0 ? cg.residual / cg.rhs_norm : 0.0;
  if (!cg.converged) {
    std::ostringstream os;
    os << "corrector CG stopped after " << cg.iterations << " iterations with relative residual "
       << out.relative_residual << " (tol " << tol << ")";
    throw SolverError(os.str());
  }
  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) shift += env.multiplicity(i) * out.chi[i];
  shift /= mass(env);
  for (auto& v : out.chi) v -= shift;
  out.energy = corrector_energy(env, a, out.chi);
  // Rounding can leave the minimizer a hair above the trial value at zero.
  out.energy = std::min(out.energy, out.upper_bound);
  return out;
}

double EffectiveMatrix::residual_max() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

double EffectiveMatrix::upper_bound_gap() const {
  double g = INFINITY;
  for (std::size_t k = 0; k < energies.size(); ++k) g = std::min(g, upper_bounds[k] - energies[k]);
  return g;
}

EffectiveMatrix effective_matrix(const env::Environment& env, double tol, unsigned threads) {
  const int d = env.dim();
  EffectiveMatrix out;
  for (int i = 0; i < d; ++i) {
    Point e{};
    e[i] = 1.0;
    out.directions.push_back(e);
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      Point e{};
      e[i] = e[j] = 1.0;
      out.directions.push_back(e);
    }
  const std::size_t m = out.directions.size();
  std::vector<Corrector> solved(m);
  parallel_for(m, threads ? threads : default_threads(),
               [&](std::size_t k) { solved[k] = corrector_solve(env, out.directions[k], tol); });
  for (const auto& c : solved) {
    out.residuals.push_back(c.relative_residual);
    out.upper_bounds.push_back(c.upper_bound);
    out.energies.push_back(c.energy);
  }
  out.D = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) out.D(i, i) = solved[i].energy;
  std::size_t k = static_cast<std::size_t>(d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j, ++k) {
      const double v = 0.5 * (solved[k].energy - solved[i].energy - solved[j].energy);
      out.D(i, j) = out.D(j, i) = v;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.D, Eigen::EigenvaluesOnly);
  const double scale = std::max(out.D.norm(), 1e-300);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale - 10 * tol * scale) {
    std::ostringstream os;
    os << "effective matrix is not PSD: smallest eigenvalue " << es.eigenvalues().minCoeff();
    throw SolverError(os.str());
  }
  return out;
}

EnsembleMatrix ensemble_effective_matrix(const env::ModelSpec& model, int d, std::int64_t side,
                                         std::size_t n_seeds, std::uint64_t master, double tol,
                                         unsigned threads) {
  if (n_seeds < 2) throw DomainError("ensemble needs at least two seeds");
  EnsembleMatrix out;
  out.samples.resize(n_seeds);
  for (std::size_t k = 0; k < n_seeds; ++k) out.seeds.push_back(replica_seed(master, k));
  parallel_for(n_seeds, threads ? threads : default_threads(), [&](std::size_t k) {
    auto e = env::generate_environment(model, d, side, out.seeds[k]);
    out.samples[k] = effective_matrix(e, tol, 1).D;
  });
  out.mean = Eigen::MatrixXd::Zero(d, d);
  out.std_error = Eigen::MatrixXd::Zero(d, d);
  std::vector<double> xs(n_seeds);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < n_seeds; ++k) xs[k] = out.samples[k](i, j);
      const Estimate est = mean_estimate(xs);
      out.mean(i, j) = est.value;
      out.std_error(i, j) = est.std_error;
    }
  return out;
}

}  // namespace ergolab::homog
