#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ergolab/walk/generator.hpp"

namespace ergolab::walk {

struct ResolventResult {
  std::vector<double> u;
  std::size_t iterations = 0;
  // ||f - (lambda - L) u|| / ||f|| in the weighted norm.
  double relative_residual = 0.0;
};

// u = (lambda - L)^-1 f by Jacobi-preconditioned CG in the weighted inner product.
ResolventResult resolvent(const SparseGenerator& gen, double lambda, std::span<const double> f,
                          double tol = 1e-8, std::size_t max_iter = 200000);

struct SemigroupResult {
  std::vector<double> u;
  std::size_t terms = 0;     // total series terms over all pieces
  int split_levels = 0;      // t was cut into 2^split_levels equal pieces
  double truncation = 0.0;   // bound on the dropped Poisson mass times ||f||_inf
};

// P_t f = sum_k Poisson(Lambda t; k) Q^k f with Q = I + L / Lambda.
SemigroupResult semigroup(const SparseGenerator& gen, double t, std::span<const double> f,
                          double tol = 1e-12);

}  // namespace ergolab::walk
