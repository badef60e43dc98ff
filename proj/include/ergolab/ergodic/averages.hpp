#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ergolab/core/law.hpp"
#include "ergolab/env/field.hpp"
#include "ergolab/ergodic/weight.hpp"

namespace ergolab::ergodic {

inline constexpr double kCpsiTarget = 1e-10;
inline constexpr double kAverageTarget = 1e-8;

// Truncated lattice sum with a certified bound on the dropped part.
struct SumResult {
  double value = 0.0;
  double truncation_bound = 0.0;
  std::int64_t radius = 0;
};

// n^-d sum_j psi(j/n).
SumResult c_psi(const WeightSpec& w, double n, double target = kCpsiTarget);

// n^-d sum_j |psi(j/n) - psi((j + e_axis)/n)|, axis in 1..d.
SumResult smoothness_defect(const WeightSpec& w, double n, int axis, double target = kCpsiTarget);

struct AverageResult {
  double value = 0.0;
  double truncation_bound = 0.0;
  std::int64_t radius = 0;
  double field_bound = 0.0;
  // Field bound measured on the window rather than known a priori.
  bool heuristic_bound = false;
};

// W_n = n^-d sum_{|j| <= R} psi(j/n) f(j) with R chosen so M * tail < 1e-8.
// Without `bound_m` the field's own bound is used, or for unbounded laws the
// realized maximum over the window (flagged as heuristic).
AverageResult weighted_average(const env::ScalarField& field, const WeightSpec& w, double n,
                               std::optional<double> bound_m = {});

// Same sum over the fixed ball |j| <= radius.
AverageResult weighted_average_at_radius(const env::ScalarField& field, const WeightSpec& w,
                                         double n, std::int64_t radius);

// Several fields sharing the bound M and the weight evaluations.
std::vector<AverageResult> weighted_average_batch(std::span<const env::ScalarField> fields,
                                                  const WeightSpec& w, double n, double bound_m);

// c(psi): the closed-form integral when known, otherwise c_psi at n.
double c_limit(const WeightSpec& w, double n);

struct ConditionalRow {
  std::uint64_t seed = 0;
  int label = 0;
  double value = 0.0;
  double truncation_bound = 0.0;
  double own_target = 0.0;
  double other_target = 0.0;
  bool within = false;       // |value - own| <= tol * own
  bool wrong_nearer = false;  // strictly closer to the other component's target
};

struct ConditionalReport {
  std::vector<ConditionalRow> rows;
  double c = 0.0;
  double fraction_within = 0.0;
  std::size_t wrong_nearer = 0;
};

// Per-seed mixture fields choosing between i.i.d. laws `first` and `second`.
ConditionalReport conditional_limit_check(const Law& first, const Law& second, const WeightSpec& w,
                                          double n, std::size_t n_seeds, std::uint64_t master_seed,
                                          double tol = 0.1);

struct MaximalResult {
  double value = 0.0;
  int argmax = 1;
  double field_bound = 0.0;
  bool heuristic_bound = false;
};

// max_{1 <= n <= N} W^{|psi|}_n(f) for non-negative f.
MaximalResult maximal_function(const env::ScalarField& field, const WeightSpec& w, int levels);

struct MaximalRow {
  double alpha = 0.0;
  double p_hat = 0.0;
  double alpha_p = 0.0;
  double normalized = 0.0;  // alpha P / ||f||_1
};

struct MaximalTail {
  std::vector<MaximalRow> rows;
  std::vector<double> sups;  // per seed
  double l1_norm = 0.0;
  double c_hat = 0.0;
};

MaximalTail maximal_tail_estimate(const Law& law, const WeightSpec& w, int levels,
                                  std::span<const double> alphas, std::size_t n_seeds,
                                  std::uint64_t master_seed);

struct ConditionCheck {
  std::vector<double> n;
  std::vector<double> c;
  std::vector<double> defect;  // max over axes
  bool cauchy = false;         // successive relative differences shrink below rel_tol
  bool defect_vanishing = false;
};

// Numerical checks of the Riemann-sum limit and the vanishing smoothness defect
// over a dyadic grid of n.
ConditionCheck check_conditions(const WeightSpec& w, std::span<const double> n_grid,
                                double rel_tol = 1e-3);

}  // namespace ergolab::ergodic
