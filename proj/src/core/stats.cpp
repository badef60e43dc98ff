#include "ergolab/core/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ergolab/core/error.hpp"

namespace ergolab {

Estimate mean_estimate(std::span<const double> xs) {
  Estimate e;
  e.samples = xs.size();
  if (xs.empty()) return e;
  double s = 0.0;
  for (double x : xs) s += x;
  e.value = s / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - e.value) * (x - e.value);
    const double n = static_cast<double>(xs.size());
    e.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

Estimate jackknife_ratio(std::span<const double> num, std::span<const double> den) {
  if (num.size() != den.size() || num.empty())
    throw DomainError("jackknife needs matching non-empty samples");
  double a = 0.0;
  double b = 0.0;
  for (std::size_t k = 0; k < num.size(); ++k) {
    a += num[k];
    b += den[k];
  }
  if (b == 0.0) throw DomainError("jackknife ratio with zero denominator");
  Estimate e;
  e.value = a / b;
  e.samples = num.size();
  const std::size_t n = num.size();
  if (n < 2) return e;
  std::vector<double> loo(n);
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    loo[k] = (a - num[k]) / (b - den[k]);
    mean += loo[k];
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  e.std_error = std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
  return e;
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw DomainError("median of an empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("KS test needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double dmax = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    dmax = std::max(dmax, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  // Kolmogorov distribution with the Stephens small-sample correction.
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * dmax;
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-12) break;
    sign = -sign;
  }
  p = std::clamp(2.0 * p, 0.0, 1.0);
  if (lambda < 1e-3) p = 1.0;
  return {dmax, p};
}

}  // namespace ergolab
