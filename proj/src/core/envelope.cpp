#include "ergolab/core/envelope.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ergolab/core/error.hpp"
#include "ergolab/core/geometry.hpp"

namespace ergolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inverse_power(double base, double beta) {
  // base^-beta with a squaring fast path for small integer exponents.
  if (beta == std::floor(beta) && beta >= 0 && beta <= 64) {
    double x = 1.0 / base;
    double r = 1.0;
    auto e = static_cast<unsigned>(beta);
    while (e) {
      if (e & 1u) r *= x;
      x *= x;
      e >>= 1u;
    }
    return r;
  }
  return std::pow(base, -beta);
}

}  // namespace

Envelope Envelope::power(double c, double beta) {
  if (!(c > 0) || !(beta > 0)) throw DomainError("power envelope needs C > 0 and beta > 0");
  return Envelope(Family::power, c, beta);
}

Envelope Envelope::gaussian(double c, double a) {
  if (!(c > 0) || !(a > 0)) throw DomainError("gaussian envelope needs C > 0 and a > 0");
  return Envelope(Family::gaussian, c, a);
}

Envelope Envelope::compact(double c, double radius) {
  if (!(c > 0) || !(radius >= 0)) throw DomainError("compact envelope needs C > 0 and radius >= 0");
  return Envelope(Family::compact, c, radius);
}

std::string Envelope::describe() const {
  std::ostringstream os;
  switch (family_) {
    case Family::power: os << "power(" << c_ << "," << p_ << ")"; break;
    case Family::gaussian: os << "gaussian(" << c_ << "," << p_ << ")"; break;
    case Family::compact: os << "compact(" << c_ << "," << p_ << ")"; break;
  }
  return os.str();
}

double Envelope::operator()(double r) const {
  switch (family_) {
    case Family::power: return c_ * inverse_power(1.0 + r, p_);
    case Family::gaussian: return c_ * std::exp(-p_ * r * r);
    case Family::compact: return r <= p_ ? c_ : 0.0;
  }
  return 0.0;
}

double Envelope::lattice_tail(int d, double kappa, double n, std::int64_t radius) const {
  // Each excluded site j owns the unit cube around it, which lies outside the
  // ball of radius R - s (s = half cube diameter) and where theta(|j|/n) is
  // dominated by theta((|x| - s)/n). In polar form this is
  //   d * omega * int_{v0}^inf (v + s/n)^(d-1) theta(v) dv,  v0 = (R - 2s)/n.
  const double s = half_cube_diameter(d, kappa);
  const double c = s / n;
  const double v0 = (static_cast<double>(radius) - 2.0 * s) / n;
  if (v0 < 0) return kInf;
  const double shell = d * unit_ball_volume(d, kappa);
  const int k = d - 1;
  switch (family_) {
    case Family::power: {
      if (p_ <= d) return kInf;
      return shell * c_ * std::pow(std::max(1.0, c), k) * std::pow(1.0 + v0, d - p_) / (p_ - d);
    }
    case Family::gaussian: {
      if (v0 <= 0) return kInf;
      // exp(-a v^2) <= exp(-a v0^2) exp(-b (v - v0)) with b = 2 a v0.
      const double b = 2.0 * p_ * v0;
      double sum = 0.0;
      double falling = 1.0;  // k!/(k-i)!
      for (int i = 0; i <= k; ++i) {
        sum += falling * std::pow(v0 + c, k - i) / std::pow(b, i + 1);
        falling *= (k - i);
      }
      return shell * c_ * std::exp(-p_ * v0 * v0) * sum;
    }
    case Family::compact: {
      if (v0 >= p_) return 0.0;
      return shell * c_ * (std::pow(p_ + c, d) - std::pow(v0 + c, d)) / d;
    }
  }
  return kInf;
}

std::int64_t Envelope::radius_for(int d, double kappa, double n, double target) const {
  const double s = half_cube_diameter(d, kappa);
  std::int64_t lo = static_cast<std::int64_t>(std::ceil(2.0 * s)) + 1;
  if (lattice_tail(d, kappa, n, lo) <= target) return lo;
  std::int64_t hi = 2 * lo;
  while (lattice_tail(d, kappa, n, hi) > target) {
    if (hi > (std::int64_t{1} << 40))
      throw DomainError("envelope " + describe() + " has no usable tail bound at this target");
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (lattice_tail(d, kappa, n, mid) <= target)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double Envelope::goodness_remainder(int d, double delta, std::int64_t m0) const {
  auto term = [&](double m) {
    return std::pow(m, 2 * d) * (*this)(m) * std::pow(1.0 + m, 1.0 + delta);
  };
  switch (family_) {
    case Family::power: {
      const double e = 2.0 * d + 1.0 + delta - p_;
      if (e >= -1.0) return kInf;
      return c_ * std::pow(1.0 + static_cast<double>(m0), e + 1.0) / (-e - 1.0);
    }
    case Family::gaussian: {
      const double m = static_cast<double>(m0 + 1);
      const double ratio = std::pow((m + 1) / m, 2 * d) * std::pow((m + 2) / (m + 1), 1.0 + delta) *
                           std::exp(-p_ * (2 * m + 1));
      if (ratio >= 1.0) return kInf;
      return term(m) / (1.0 - ratio);
    }
    case Family::compact: {
      double sum = 0.0;
      for (auto m = m0 + 1; static_cast<double>(m) <= p_; ++m) sum += term(static_cast<double>(m));
      return sum;
    }
  }
  return kInf;
}

bool Envelope::decays_faster_than(double r) const {
  return family_ != Family::power || p_ > r;
}

}  // namespace ergolab
