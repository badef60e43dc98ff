#pragma once

#include <cstdint>
#include <string>

namespace ergolab {

// Non-increasing radial envelope theta: R_+ -> R_+ from a named family with a
// closed-form tail bound.
//   power:    C (1 + r)^(-beta)
//   gaussian: C exp(-a r^2)
//   compact:  C on [0, radius], 0 beyond
class Envelope {
 public:
  enum class Family { power, gaussian, compact };

  static Envelope power(double c, double beta);
  static Envelope gaussian(double c, double a);
  static Envelope compact(double c, double radius);

  Family family() const { return family_; }
  double scale() const { return c_; }
  // beta for power, a for gaussian, radius for compact.
  double parameter() const { return p_; }
  std::string describe() const;

  double operator()(double r) const;

  // Upper bound on n^-d * sum_{j in Z^d, |j|_kappa > radius} theta(|j|_kappa / n).
  double lattice_tail(int d, double kappa, double n, std::int64_t radius) const;

  // Smallest radius whose lattice tail is at most `target`.
  std::int64_t radius_for(int d, double kappa, double n, double target) const;

  // Upper bound on sum_{m > m0} m^(2d) theta(m) / rho(m), rho(m) = (1+m)^(-1-delta);
  // +inf when the series diverges.
  double goodness_remainder(int d, double delta, std::int64_t m0) const;

  // Whether |f(x)| <= theta(|x|) puts f in the decay class G(r).
  bool decays_faster_than(double r) const;

 private:
  Envelope(Family f, double c, double p) : family_(f), c_(c), p_(p) {}
  Family family_;
  double c_;
  double p_;
};

}  // namespace ergolab
