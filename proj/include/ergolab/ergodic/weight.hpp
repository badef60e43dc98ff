#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "ergolab/core/envelope.hpp"
#include "ergolab/core/geometry.hpp"

namespace ergolab::ergodic {

// Weight psi: R^d -> R with a d-good envelope theta, |psi(x)| <= theta(|x|_kappa),
// and summability witness rho(m) = (1+m)^(-1-delta).
class WeightSpec {
 public:
  enum class Family { power, gaussian, unit_cube, custom };

  // C (1 + |x|)^-beta
  static WeightSpec power(int d, double beta, double c = 1.0, double kappa = 2.0);
  // C exp(-a |x|^2)
  static WeightSpec gaussian(int d, double a, double c = 1.0, double kappa = 2.0);
  // indicator of [0, 1)^d
  static WeightSpec unit_cube(int d, double kappa = 2.0);
  static WeightSpec custom(int d, std::function<double(const Point&)> psi, Envelope theta,
                           double kappa = 2.0, std::string name = "custom");

  Family family() const { return family_; }
  int dim() const { return d_; }
  double kappa() const { return kappa_; }
  const Envelope& envelope() const { return theta_; }
  double delta() const { return delta_; }
  void set_delta(double delta);
  bool absolute() const { return absolute_; }
  const std::string& name() const { return name_; }

  // The |psi| weight with the same envelope.
  WeightSpec abs() const;

  double operator()(const Point& x) const;
  // psi(j / n) with inv_n = 1/n.
  double at(const Site& j, double n, double inv_n) const {
    switch (family_) {
      case Family::power: return scaled(inv_pow(1.0 + inv_n * norm(j, d_, kappa_)));
      case Family::gaussian: {
        const double r = inv_n * norm(j, d_, kappa_);
        return scaled(std::exp(-param_ * r * r));
      }
      case Family::unit_cube:
        for (int i = 0; i < d_; ++i)
          if (j[i] < 0 || static_cast<double>(j[i]) >= n) return 0.0;
        return 1.0;
      case Family::custom: {
        Point x{0, 0, 0};
        for (int i = 0; i < d_; ++i) x[i] = static_cast<double>(j[i]) / n;
        const double v = psi_(x);
        return absolute_ ? std::abs(v) : v;
      }
    }
    return 0.0;
  }
  // psi depends on x only through |x|_kappa and is even in every coordinate.
  bool radial() const { return family_ == Family::power || family_ == Family::gaussian; }

  // Closed-form integral of psi over R^d when known (the limit c(psi)).
  std::optional<double> integral() const;
  std::string describe() const;

 private:
  WeightSpec() = default;
  double scaled(double v) const { return absolute_ ? std::abs(c_) * v : c_ * v; }
  double inv_pow(double base) const {
    if (int_beta_ > 0) {
      double r = 1.0, b = base;
      for (int e = int_beta_; e; e >>= 1, b *= b)
        if (e & 1) r *= b;
      return 1.0 / r;
    }
    return std::pow(base, -param_);
  }

  Family family_ = Family::custom;
  int d_ = 1;
  double kappa_ = 2.0;
  double c_ = 1.0;
  double param_ = 0.0;
  int int_beta_ = 0;
  double delta_ = 0.1;
  bool absolute_ = false;
  Envelope theta_ = Envelope::compact(1.0, 0.0);
  std::function<double(const Point&)> psi_;
  std::string name_;
};

struct EnvelopeCheck {
  std::size_t samples = 0;
  std::size_t violations = 0;     // points with |psi| > theta
  double worst_ratio = 0.0;       // max |psi(x)| / theta(|x|)
  bool monotone = true;           // theta non-increasing on the radius grid
  double goodness_partial = 0.0;  // sum_{m <= m0} m^(2d) theta(m) / rho(m)
  double goodness_remainder = 0.0;
  bool d_good = false;
  bool ok() const { return violations == 0 && monotone && d_good; }
};

// Randomized domination check on `samples` points (radii spread over
// [0, max_radius]), monotonicity on a radius grid, and the goodness certificate.
EnvelopeCheck check_envelope(const WeightSpec& w, std::size_t samples = 100000,
                             std::uint64_t seed = 1, double max_radius = 64.0);

}  // namespace ergolab::ergodic
