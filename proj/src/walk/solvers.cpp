#include "ergolab/walk/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergolab/core/cg.hpp"
#include "ergolab/core/error.hpp"

namespace ergolab::walk {

ResolventResult resolvent(const SparseGenerator& gen, double lambda, std::span<const double> f,
                          double tol, std::size_t max_iter) {
  if (!(lambda > 0)) throw DomainError("resolvent needs lambda > 0");
  if (!(tol > 0)) throw DomainError("resolvent needs tol > 0");
  const std::size_t n = gen.size();
  if (f.size() != n) throw DomainError("right-hand side has the wrong length");
  std::vector<double> lu(n);
  auto apply = [&](std::span<const double> x, std::span<double> y) {
    gen.apply(x, lu);
    for (std::size_t i = 0; i < n; ++i) y[i] = lambda * x[i] - lu[i];
  };
  auto jacobi = [&](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] / (lambda - gen.diagonal(i));
  };
  auto inner = [&](std::span<const double> u, std::span<const double> v) { return gen.inner(u, v); };
  ResolventResult out;
  out.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.u[i] = f[i] / lambda;
  const CgOutcome cg = conjugate_gradient(apply, jacobi, inner, f, out.u, {tol, max_iter});
  out.iterations = cg.iterations;
  out.relative_residual = cg.rhs_norm > 0 ? cg.residual / cg.rhs_norm : 0.0;
  if (!cg.converged) {
    std::ostringstream os;
    os << "resolvent CG stopped after " << cg.iterations << " iterations with relative residual "
       << out.relative_residual << " (tol " << tol << ")";
    throw SolverError(os.str());
  }
  return out;
}

namespace {

constexpr double kMaxPoissonMean = 600.0;
constexpr int kMaxSplitLevels = 20;

// One uniformization step for Lambda t <= kMaxPoissonMean.
std::size_t uniformized(const SparseGenerator& gen, double rate, double t, std::vector<double>& f,
                        double tol, double& dropped) {
  const std::size_t n = gen.size();
  const double x = rate * t;
  // Poisson weights until the tail bound p_{K+1} / (1 - x / (K + 2)) drops below tol.
  std::vector<double> w{std::exp(-x)};
  for (std::size_t k = 1;; ++k) {
    const double next = w.back() * x / static_cast<double>(k);
    const double kk = static_cast<double>(k);
    if (kk + 1 > x) {
      const double tail = next / (1.0 - x / (kk + 1.0));
      if (tail <= tol) {
        dropped = tail;
        break;
      }
    }
    w.push_back(next);
    if (w.size() > 100000) throw SolverError("uniformization series too long; split the time");
  }
  double total = 0.0;
  for (double v : w) total += v;
  std::vector<double> q = f, lq(n), acc(n, 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double wk = w[k] / total;
    for (std::size_t i = 0; i < n; ++i) acc[i] += wk * q[i];
    if (k + 1 == w.size()) break;
    gen.apply(q, lq);
    for (std::size_t i = 0; i < n; ++i) q[i] += lq[i] / rate;
  }
  f.swap(acc);
  return w.size();
}

}  // namespace

SemigroupResult semigroup(const SparseGenerator& gen, double t, std::span<const double> f,
                          double tol) {
  if (!(t >= 0)) throw DomainError("semigroup needs t >= 0");
  if (!(tol > 0)) throw DomainError("semigroup needs tol > 0");
  if (f.size() != gen.size()) throw DomainError("function has the wrong length");
  SemigroupResult out;
  out.u.assign(f.begin(), f.end());
  const double rate = gen.max_rate();
  if (t == 0 || rate == 0) return out;
  int levels = 0;
  while (rate * t / std::ldexp(1.0, levels) > kMaxPoissonMean) {
    if (++levels > kMaxSplitLevels) {
      std::ostringstream os;
      os << "uniformization needs Lambda t = " << rate * t << " > " << kMaxPoissonMean
         << " * 2^" << kMaxSplitLevels << "; use a shorter time or a coarser scale";
      throw SolverError(os.str());
    }
  }
  const std::size_t pieces = std::size_t{1} << levels;
  const double piece = t / static_cast<double>(pieces);
  const double piece_tol = tol / static_cast<double>(pieces);
  double sup = 0.0;
  for (double v : f) sup = std::max(sup, std::abs(v));
  for (std::size_t p = 0; p < pieces; ++p) {
    double dropped = 0.0;
    out.terms += uniformized(gen, rate, piece, out.u, piece_tol, dropped);
    out.truncation += 2.0 * dropped * sup;
  }
  out.split_levels = levels;
  return out;
}

}  // namespace ergolab::walk
