#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ergolab/core/envelope.hpp"
#include "ergolab/env/environment.hpp"
#include "ergolab/refpde/heat.hpp"

namespace ergolab::refpde {

// A test function with a certified envelope |f(x)| <= theta(|x|_2).
struct TestFunction {
  std::string name;
  Function f;
  Envelope envelope = Envelope::compact(1.0, 0.0);
  std::optional<Gaussian> gaussian;  // set when the heat flow has a closed form
  std::optional<double> integral;    // int f dx over R^d when known
};

enum class Operation { semigroup, resolvent };

struct ConvergenceRow {
  double epsilon = 0.0;
  double err2 = 0.0;
  double err1 = 0.0;
  double ref_norm2 = 0.0;
  double runtime_s = 0.0;
  double solver_bound = 0.0;  // truncation or residual reported by the walk solver
  double envelope_tail = 0.0; // theta at the half-box radius
  // max |u_ref| over atoms within one spacing of the box faces, relative to
  // max |u_ref|; large values mean wrap-around contaminates the torus solution.
  double reference_edge = 0.0;
};

// Discrete P^eps_t f / R^eps_lambda f on the environment against the Brownian
// reference at the same rescaled positions. Throws DomainError when the
// envelope at the half-box radius exceeds 1e-6 for some eps.
std::vector<ConvergenceRow> convergence_table(const env::Environment& env, const DiffusionSpec& spec,
                                              const TestFunction& f, Operation op, double param,
                                              const std::vector<double>& eps_grid,
                                              bool timing = false, unsigned threads = 0);

inline constexpr double kMaxEnvelopeTail = 1e-6;

}  // namespace ergolab::refpde
