#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ergolab {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Sample mean with the standard error of the mean.
Estimate mean_estimate(std::span<const double> xs);

// Ratio sum(num)/sum(den) with a leave-one-out jackknife standard error.
Estimate jackknife_ratio(std::span<const double> num, std::span<const double> den);

double median(std::vector<double> xs);

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KsResult {
  double statistic;
  double p_value;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace ergolab
