#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace ergolab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int order);

// Gauss-Hermite rule for E[g(Z)], Z standard normal: sum w_i g(x_i).
QuadratureRule gauss_hermite_normal(int order);

// Integral of exp(-s) g(s) over [0, inf) by Gauss-Legendre on geometric panels
// [0, h], [h, 2h], [2h, 4h], ... truncated where exp(-s) < cutoff.
template <class G>
double exp_weighted_integral(const QuadratureRule& rule, G&& g, double first_panel,
                             double s_max) {
  double total = 0.0;
  double a = 0.0;
  double b = first_panel;
  while (a < s_max) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double s = mid + half * rule.nodes[i];
      panel += rule.weights[i] * std::exp(-s) * g(s);
    }
    total += half * panel;
    a = b;
    b = 2.0 * b;
  }
  return total;
}

}  // namespace ergolab
