#include "ergolab/ergodic/weight.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ergolab/core/error.hpp"
#include "ergolab/core/rng.hpp"

namespace ergolab::ergodic {

namespace {

void require_tail(const Envelope& e, int d, double kappa) {
  // A usable tail bound must exist for some finite radius.
  if (!std::isfinite(e.lattice_tail(d, kappa, 1.0, 1 << 20)))
    throw DomainError("envelope " + e.describe() + " has no finite lattice tail bound in d = " +
                      std::to_string(d));
}

}  // namespace

WeightSpec WeightSpec::power(int d, double beta, double c, double kappa) {
  check_dimension(d);
  check_kappa(kappa);
  WeightSpec w;
  w.family_ = Family::power;
  w.d_ = d;
  w.kappa_ = kappa;
  w.c_ = c;
  w.param_ = beta;
  if (beta == std::floor(beta) && beta >= 1 && beta <= 64) w.int_beta_ = static_cast<int>(beta);
  w.theta_ = Envelope::power(std::abs(c), beta);
  w.name_ = "power";
  require_tail(w.theta_, d, kappa);
  return w;
}

WeightSpec WeightSpec::gaussian(int d, double a, double c, double kappa) {
  check_dimension(d);
  check_kappa(kappa);
  if (!(a > 0)) throw DomainError("gaussian weight needs a > 0");
  WeightSpec w;
  w.family_ = Family::gaussian;
  w.d_ = d;
  w.kappa_ = kappa;
  w.c_ = c;
  w.param_ = a;
  w.theta_ = Envelope::gaussian(std::abs(c), a);
  w.name_ = "gaussian";
  return w;
}

WeightSpec WeightSpec::unit_cube(int d, double kappa) {
  check_dimension(d);
  check_kappa(kappa);
  WeightSpec w;
  w.family_ = Family::unit_cube;
  w.d_ = d;
  w.kappa_ = kappa;
  const double diameter = norm(Point{1, 1, 1}, d, kappa);
  w.theta_ = Envelope::compact(1.0, diameter);
  w.name_ = "unit_cube";
  return w;
}

WeightSpec WeightSpec::custom(int d, std::function<double(const Point&)> psi, Envelope theta,
                              double kappa, std::string name) {
  check_dimension(d);
  check_kappa(kappa);
  if (!psi) throw DomainError("custom weight needs a function");
  WeightSpec w;
  w.family_ = Family::custom;
  w.d_ = d;
  w.kappa_ = kappa;
  w.psi_ = std::move(psi);
  w.theta_ = theta;
  w.name_ = std::move(name);
  require_tail(w.theta_, d, kappa);
  return w;
}

void WeightSpec::set_delta(double delta) {
  if (!(delta > 0)) throw DomainError("summability exponent delta must be positive");
  delta_ = delta;
}

WeightSpec WeightSpec::abs() const {
  WeightSpec w = *this;
  w.absolute_ = true;
  return w;
}

double WeightSpec::operator()(const Point& x) const {
  switch (family_) {
    case Family::power: return scaled(inv_pow(1.0 + norm(x, d_, kappa_)));
    case Family::gaussian: {
      const double r = norm(x, d_, kappa_);
      return scaled(std::exp(-param_ * r * r));
    }
    case Family::unit_cube:
      for (int i = 0; i < d_; ++i)
        if (x[i] < 0.0 || x[i] >= 1.0) return 0.0;
      return 1.0;
    case Family::custom: {
      const double v = psi_(x);
      return absolute_ ? std::abs(v) : v;
    }
  }
  return 0.0;
}

std::optional<double> WeightSpec::integral() const {
  const double c = absolute_ ? std::abs(c_) : c_;
  switch (family_) {
    case Family::power: {
      // d omega int_0^inf r^(d-1) (1+r)^-beta dr = d omega B(d, beta - d)
      if (param_ <= d_) return std::nullopt;
      const double beta_fn = std::exp(std::lgamma(d_) + std::lgamma(param_ - d_) - std::lgamma(param_));
      return c * d_ * unit_ball_volume(d_, kappa_) * beta_fn;
    }
    case Family::gaussian: {
      // d omega int_0^inf r^(d-1) exp(-a r^2) dr = d omega Gamma(d/2) / (2 a^(d/2))
      return c * d_ * unit_ball_volume(d_, kappa_) * std::tgamma(0.5 * d_) /
             (2.0 * std::pow(param_, 0.5 * d_));
    }
    case Family::unit_cube: return 1.0;
    case Family::custom: return std::nullopt;
  }
  return std::nullopt;
}

std::string WeightSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (family_) {
    case Family::power: os << "power(C=" << c_ << ",beta=" << param_ << ")"; break;
    case Family::gaussian: os << "gaussian(C=" << c_ << ",a=" << param_ << ")"; break;
    case Family::unit_cube: os << "unit_cube"; break;
    case Family::custom: os << name_; break;
  }
  if (absolute_) os << "|abs|";
  os << ",d=" << d_ << ",kappa=" << kappa_;
  return os.str();
}

EnvelopeCheck check_envelope(const WeightSpec& w, std::size_t samples, std::uint64_t seed,
                             double max_radius) {
  EnvelopeCheck out;
  const int d = w.dim();
  const Envelope& theta = w.envelope();
  CounterRng rng(seed, 0xe11e);
  for (std::size_t s = 0; s < samples; ++s) {
    // Half the points uniform in radius, half concentrated near the origin.
    const double u = rng.uniform();
    const double r = (s % 2 == 0) ? max_radius * u : u * u * 2.0;
    Point x{0, 0, 0};
    for (int i = 0; i < d; ++i) x[i] = 2.0 * rng.uniform() - 1.0;
    if (s % 7 == 0)
      for (int i = 0; i < d; ++i) x[i] = std::abs(x[i]);  // positive orthant for one-sided weights
    const double len = norm(x, d, w.kappa());
    if (len == 0.0) continue;
    for (int i = 0; i < d; ++i) x[i] *= r / len;
    const double v = std::abs(w(x));
    const double t = theta(norm(x, d, w.kappa()));
    ++out.samples;
    if (v > t * (1.0 + 1e-12) + 1e-300) ++out.violations;
    if (t > 0) out.worst_ratio = std::max(out.worst_ratio, v / t);
    else if (v > 0) out.worst_ratio = kInfNorm;
  }
  double prev = theta(0.0);
  for (int k = 1; k <= 4096; ++k) {
    const double t = theta(max_radius * k / 4096.0);
    if (t > prev * (1.0 + 1e-15)) out.monotone = false;
    prev = t;
  }
  const std::int64_t m0 = 64;
  for (std::int64_t m = 0; m <= m0; ++m) {
    const double md = static_cast<double>(m);
    out.goodness_partial += std::pow(md, 2 * d) * theta(md) * std::pow(1.0 + md, 1.0 + w.delta());
  }
  out.goodness_remainder = theta.goodness_remainder(d, w.delta(), m0);
  out.d_good = std::isfinite(out.goodness_remainder);
  return out;
}

}  // namespace ergolab::ergodic
