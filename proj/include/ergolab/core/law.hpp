#pragma once

#include <cmath>
#include <string>

namespace ergolab {

// Marginal law of an i.i.d. field, sampled by inversion from a uniform u in [0,1).
class Law {
 public:
  enum class Kind { constant, uniform, bernoulli, two_point, exponential };

  static Law constant(double c);
  static Law uniform(double a, double b);
  static Law bernoulli(double p);
  // Value `lo` with probability p, `hi` otherwise.
  static Law two_point(double lo, double hi, double p = 0.5);
  static Law exponential(double rate);

  // Parses "constant(c)", "uniform(a,b)", "bernoulli(p)", "two_point(lo,hi[,p])", "exp(rate)".
  static Law parse(const std::string& text);

  Kind kind() const { return kind_; }
  double sample(double u) const {
    switch (kind_) {
      case Kind::constant: return a_;
      case Kind::uniform: return a_ + (b_ - a_) * u;
      case Kind::bernoulli: return u < p_ ? 1.0 : 0.0;
      case Kind::two_point: return u < p_ ? a_ : b_;
      case Kind::exponential: return -std::log1p(-u) / a_;
    }
    return 0.0;
  }
  double mean() const;
  double second_moment() const;
  bool bounded() const { return kind_ != Kind::exponential; }
  // sup |X| when bounded.
  double bound() const;
  double min_value() const;
  bool deterministic() const;
  std::string describe() const;

 private:
  Law(Kind k, double a, double b, double p) : kind_(k), a_(a), b_(b), p_(p) {}
  Kind kind_;
  double a_;
  double b_;
  double p_;
};

}  // namespace ergolab
