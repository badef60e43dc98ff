#include "ergolab/env/measure.hpp"

#include <algorithm>
#include <cmath>

#include "ergolab/core/error.hpp"
#include "ergolab/core/stats.hpp"

namespace ergolab::env {

AtomicMeasure::AtomicMeasure(int d, std::vector<Point> positions, std::vector<double> masses,
                             double epsilon, Torus box)
    : d_(d),
      positions_(std::move(positions)),
      masses_(std::move(masses)),
      epsilon_(epsilon),
      box_(box.dim() == d ? std::move(box) : Torus(d, 1, LatticeMap::identity(d))) {
  check_dimension(d);
  if (positions_.size() != masses_.size()) throw DomainError("positions and masses differ in length");
  if (!(epsilon_ > 0)) throw DomainError("epsilon must be positive");
}

double AtomicMeasure::inner_radius(double kappa) const {
  return epsilon_ * box_.inner_radius(kappa);
}

double AtomicMeasure::total_mass() const {
  CompensatedSum s;
  for (double m : masses_) s.add(m);
  return s.value();
}

void AtomicMeasure::validate() const {
  for (std::size_t i = 0; i < masses_.size(); ++i)
    if (!(masses_[i] > 0)) throw DomainError("atom " + std::to_string(i) + " has non-positive mass");
  std::vector<Point> sorted = positions_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw DomainError("atomic measure has coincident atoms");
}

AtomicMeasure measure_of(const Environment& env) {
  std::vector<Point> pos(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) pos[i] = env.torus().centred(env.position(i));
  return AtomicMeasure(env.dim(), std::move(pos), env.multiplicities(), 1.0, env.torus());
}

AtomicMeasure rescale(const AtomicMeasure& mu, double epsilon) {
  if (!(epsilon > 0) || epsilon > 1) throw DomainError("rescale needs 0 < epsilon <= 1");
  if (mu.epsilon() != 1.0) throw DomainError("rescale expects an unscaled measure");
  const int d = mu.dim();
  const double factor = std::pow(epsilon, d);
  std::vector<Point> pos(mu.size());
  std::vector<double> mass(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (int k = 0; k < d; ++k) pos[i][k] = epsilon * mu.position(i)[k];
    mass[i] = factor * mu.mass(i);
  }
  return AtomicMeasure(d, std::move(pos), std::move(mass), epsilon, mu.box());
}

double integrate(const AtomicMeasure& mu, const PointFunction& phi) {
  if (mu.size() > 1000000) {
    CompensatedSum s;
    for (std::size_t i = 0; i < mu.size(); ++i) s.add(mu.mass(i) * phi(mu.position(i)));
    return s.value();
  }
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += mu.mass(i) * phi(mu.position(i));
  return s;
}

double tail_mass(const AtomicMeasure& mu, const Envelope& theta, double ell, double kappa) {
  if (!(ell >= 0)) throw DomainError("tail radius must be non-negative");
  CompensatedSum s;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double r = norm(mu.position(i), mu.dim(), kappa);
    if (r >= ell) s.add(mu.mass(i) * theta(r));
  }
  return s.value();
}

}  // namespace ergolab::env
