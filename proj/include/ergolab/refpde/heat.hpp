#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "ergolab/core/geometry.hpp"

namespace ergolab::refpde {

using Function = std::function<double(const Point&)>;

// Diffusion matrix D of the limiting Brownian motion. Convention: covariance
// 2 D t, generator div(D grad). `m` is the intensity carried by reference norms.
class DiffusionSpec {
 public:
  explicit DiffusionSpec(const Eigen::MatrixXd& D, double m = 1.0);

  int dim() const { return static_cast<int>(D_.rows()); }
  const Eigen::MatrixXd& D() const { return D_; }
  const Eigen::MatrixXd& Q() const { return Q_; }
  // Clamped to >= 0; entries at or below the kernel threshold are exactly 0.
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  int rank() const { return rank_; }
  bool kernel(int i) const { return lambda_(i) == 0.0; }
  double m() const { return m_; }

 private:
  Eigen::MatrixXd D_;
  Eigen::MatrixXd Q_;
  Eigen::VectorXd lambda_;
  int rank_ = 0;
  double m_ = 1.0;
};

// P_t f(x) = E f(x + Q sqrt(2 Lambda t) Z) by tensor Gauss-Hermite over the
// active axes. Orders are doubled from `order` (at most three times) until two
// consecutive values agree to tol (1 + |value|); SolverError otherwise.
double heat_semigroup(const DiffusionSpec& spec, double t, const Function& f, const Point& x,
                      double tol = 1e-8, int order = 64);

// R_lambda f(x) = int_0^inf e^{-lambda t} P_t f(x) dt, composite Gauss-Legendre
// in s = lambda t with an order 8 / order 16 error estimate.
double heat_resolvent(const DiffusionSpec& spec, double lambda, const Function& f, const Point& x,
                      double tol = 1e-8);

// Same time integral for any scalar map t -> P_t f(x).
double laplace_transform(double lambda, const std::function<double(double)>& p, double tol);

// f(x) = amplitude exp(-|x|^2 / (2 sigma^2)); heat flow in closed form.
struct Gaussian {
  double amplitude = 1.0;
  double sigma = 1.0;
  double operator()(const Point& x, int d) const;
};

double gaussian_semigroup(const DiffusionSpec& spec, double t, const Gaussian& g, const Point& x);
double gaussian_resolvent(const DiffusionSpec& spec, double lambda, const Gaussian& g,
                          const Point& x, double tol = 1e-12);
// <g, P_tau g> in L^2(dx).
double gaussian_pairing(const DiffusionSpec& spec, double tau, const Gaussian& g);

// Spectral heat flow on the unit torus: Fourier mode k is multiplied by
// exp(-4 pi^2 (k.Dk) t). Grid of n^d values, last axis fastest, point k / n.
std::vector<double> heat_pde_torus(const Eigen::MatrixXd& D, const std::vector<double>& rho0,
                                   int n, double t);

}  // namespace ergolab::refpde
