#include "ergolab/core/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "ergolab/core/error.hpp"

namespace ergolab {

QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw DomainError("quadrature order must be positive");
  QuadratureRule q;
  q.nodes.resize(order);
  q.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = order * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    q.nodes[i] = -z;
    q.nodes[order - 1 - i] = z;
    q.weights[i] = q.weights[order - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return q;
}

namespace {

// Golub-Welsch for the probabilists' weight: Jacobi matrix with off-diagonal
// sqrt(k). Newton on the recurrence loses its starting guesses at high order.
QuadratureRule hermite_golub_welsch(int order) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order - 1);
  for (int k = 1; k < order; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  QuadratureRule q;
  q.nodes.resize(order);
  q.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    q.nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    q.weights[i] = v * v;
  }
  // Enforce the exact symmetry of the rule.
  for (int i = 0; i < order / 2; ++i) {
    const int j = order - 1 - i;
    const double x = 0.5 * (q.nodes[j] - q.nodes[i]);
    const double w = 0.5 * (q.weights[i] + q.weights[j]);
    q.nodes[i] = -x;
    q.nodes[j] = x;
    q.weights[i] = q.weights[j] = w;
  }
  if (order % 2 == 1) q.nodes[order / 2] = 0.0;
  double total = 0.0;
  for (double w : q.weights) total += w;
  for (double& w : q.weights) w /= total;
  return q;
}

}  // namespace

QuadratureRule gauss_hermite_normal(int order) {
  if (order < 1) throw DomainError("quadrature order must be positive");
  if (order > 100) return hermite_golub_welsch(order);
  // Roots of the physicists' Hermite polynomial by Newton iteration on the
  // orthonormal recurrence, then rescaled to the standard normal weight.
  QuadratureRule q;
  q.nodes.resize(order);
  q.weights.resize(order);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const int half = (order + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * order + 1.0) - 1.85575 * std::pow(2.0 * order + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(order), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * q.nodes[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * q.nodes[1];
    else
      z = 2.0 * z - q.nodes[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 1; j <= order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * order) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-14) break;
    }
    q.nodes[i] = z;
    q.weights[i] = 2.0 / (pp * pp);
  }
  // Mirror and convert: E[g(Z)] = pi^-1/2 sum w_i g(sqrt(2) x_i).
  QuadratureRule out;
  out.nodes.resize(order);
  out.weights.resize(order);
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  for (int i = 0; i < half; ++i) {
    out.nodes[i] = -std::sqrt(2.0) * q.nodes[i];
    out.nodes[order - 1 - i] = std::sqrt(2.0) * q.nodes[i];
    out.weights[i] = out.weights[order - 1 - i] = norm * q.weights[i];
  }
  return out;
}

}  // namespace ergolab
