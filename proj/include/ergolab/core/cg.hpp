#pragma once

// Preconditioned conjugate gradients for operators that are self-adjoint and
// positive (semi)definite in a caller-supplied inner product.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ergolab {

struct CgOptions {
  double rel_tol = 1e-10;
  std::size_t max_iter = 100000;
};

struct CgOutcome {
  std::size_t iterations = 0;
  double residual = 0.0;  // ||b - A x|| in the chosen inner product
  double rhs_norm = 0.0;
  bool converged = false;
};

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;
using InnerProduct = std::function<double(std::span<const double>, std::span<const double>)>;

// Solves A x = b starting from x. `precondition` applies an approximate inverse
// that is self-adjoint and positive in the same inner product. `project`, when
// set, removes the null-space component of a residual (singular A).
CgOutcome conjugate_gradient(const LinearMap& apply, const LinearMap& precondition,
                             const InnerProduct& inner, std::span<const double> b,
                             std::span<double> x, const CgOptions& opts,
                             const std::function<void(std::span<double>)>& project = {});

}  // namespace ergolab
