#include "ergolab/core/cg.hpp"

#include <algorithm>
#include <cmath>

namespace ergolab {

namespace {

void residual(const LinearMap& apply, std::span<const double> b, std::span<const double> x,
              std::span<double> r, std::vector<double>& scratch) {
  apply(x, scratch);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - scratch[i];
}

}  // namespace

CgOutcome conjugate_gradient(const LinearMap& apply, const LinearMap& precondition,
                             const InnerProduct& inner, std::span<const double> b,
                             std::span<double> x, const CgOptions& opts,
                             const std::function<void(std::span<double>)>& project) {
  const std::size_t n = b.size();
  CgOutcome out;
  out.rhs_norm = std::sqrt(inner(b, b));
  if (out.rhs_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    out.converged = true;
    return out;
  }
  const double target = opts.rel_tol * out.rhs_norm;
  std::vector<double> r(n), z(n), p(n), ap(n), scratch(n);

  // Restart from the current iterate whenever the recursive residual has
  // converged but the true one has not.
  for (int restart = 0; restart < 8; ++restart) {
    residual(apply, b, x, r, scratch);
    if (project) project(r);
    out.residual = std::sqrt(inner(r, r));
    if (out.residual <= target) {
      out.converged = true;
      return out;
    }
    precondition(r, z);
    p = z;
    double rz = inner(r, z);
    while (out.iterations < opts.max_iter) {
      apply(p, ap);
      const double pap = inner(p, ap);
      if (!(pap > 0.0)) break;
      const double alpha = rz / pap;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      if (project) project(r);
      ++out.iterations;
      if (std::sqrt(inner(r, r)) <= target) break;
      precondition(r, z);
      const double rz_new = inner(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (out.iterations >= opts.max_iter) break;
  }
  residual(apply, b, x, r, scratch);
  if (project) project(r);
  out.residual = std::sqrt(inner(r, r));
  out.converged = out.residual <= target;
  return out;
}

}  // namespace ergolab
