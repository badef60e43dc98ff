#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ergolab/core/envelope.hpp"
#include "ergolab/core/geometry.hpp"
#include "ergolab/env/environment.hpp"
#include "ergolab/env/models.hpp"

namespace ergolab::env {

using PointFunction = std::function<double(const Point&)>;

// Locally finite atomic measure sum_x m_x delta_x living on a centred torus
// scaled by epsilon.
class AtomicMeasure {
 public:
  AtomicMeasure(int d, std::vector<Point> positions, std::vector<double> masses,
                double epsilon = 1.0, Torus box = {});

  int dim() const { return d_; }
  std::size_t size() const { return positions_.size(); }
  const Point& position(std::size_t i) const { return positions_[i]; }
  double mass(std::size_t i) const { return masses_[i]; }
  const std::vector<Point>& positions() const { return positions_; }
  const std::vector<double>& masses() const { return masses_; }
  double epsilon() const { return epsilon_; }
  // Unscaled box; the measure lives on epsilon times it.
  const Torus& box() const { return box_; }
  // Radius of the largest centred l^kappa ball inside the scaled box.
  double inner_radius(double kappa) const;
  double total_mass() const;

  // Masses strictly positive and positions distinct.
  void validate() const;

 private:
  int d_;
  std::vector<Point> positions_;
  std::vector<double> masses_;
  double epsilon_;
  Torus box_;
};

// mu_omega = sum_x n_x delta_x with positions taken in the centred box.
AtomicMeasure measure_of(const Environment& env);

// Atoms of `model` without building rates (cheap for large Poisson samples).
AtomicMeasure sample_measure(const ModelSpec& model, int d, std::int64_t side, std::uint64_t seed);

// mu^eps(A) = eps^d mu(A / eps): atoms at eps x with mass eps^d n_x.
AtomicMeasure rescale(const AtomicMeasure& mu, double epsilon);

// sum_atoms mass * phi(position); compensated above 10^6 atoms.
double integrate(const AtomicMeasure& mu, const PointFunction& phi);

// sum over atoms with |x|_kappa >= ell of mass * theta(|x|_kappa).
double tail_mass(const AtomicMeasure& mu, const Envelope& theta, double ell, double kappa = 2.0);

}  // namespace ergolab::env
