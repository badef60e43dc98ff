#include "ergolab/core/law.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

#include "ergolab/core/error.hpp"

namespace ergolab {

Law Law::constant(double c) { return Law(Kind::constant, c, c, 1.0); }

Law Law::uniform(double a, double b) {
  if (!(b >= a)) throw DomainError("uniform law needs a <= b");
  return Law(Kind::uniform, a, b, 0.0);
}

Law Law::bernoulli(double p) {
  if (!(p >= 0 && p <= 1)) throw DomainError("bernoulli parameter must lie in [0,1]");
  return Law(Kind::bernoulli, 0.0, 1.0, p);
}

Law Law::two_point(double lo, double hi, double p) {
  if (!(p >= 0 && p <= 1)) throw DomainError("two-point probability must lie in [0,1]");
  return Law(Kind::two_point, lo, hi, p);
}

Law Law::exponential(double rate) {
  if (!(rate > 0)) throw DomainError("exponential rate must be positive");
  return Law(Kind::exponential, rate, 0.0, 0.0);
}

double Law::mean() const {
  switch (kind_) {
    case Kind::constant: return a_;
    case Kind::uniform: return 0.5 * (a_ + b_);
    case Kind::bernoulli: return p_;
    case Kind::two_point: return p_ * a_ + (1 - p_) * b_;
    case Kind::exponential: return 1.0 / a_;
  }
  return 0.0;
}

double Law::second_moment() const {
  switch (kind_) {
    case Kind::constant: return a_ * a_;
    case Kind::uniform: return (a_ * a_ + a_ * b_ + b_ * b_) / 3.0;
    case Kind::bernoulli: return p_;
    case Kind::two_point: return p_ * a_ * a_ + (1 - p_) * b_ * b_;
    case Kind::exponential: return 2.0 / (a_ * a_);
  }
  return 0.0;
}

double Law::bound() const {
  if (!bounded()) throw DomainError("law " + describe() + " is unbounded");
  return std::max(std::abs(a_), std::abs(b_));
}

double Law::min_value() const {
  switch (kind_) {
    case Kind::constant: return a_;
    case Kind::uniform: return a_;
    case Kind::bernoulli: return p_ < 1 ? 0.0 : 1.0;
    case Kind::two_point: return std::min(a_, b_);
    case Kind::exponential: return 0.0;
  }
  return 0.0;
}

bool Law::deterministic() const {
  switch (kind_) {
    case Kind::constant: return true;
    case Kind::uniform: return a_ == b_;
    case Kind::bernoulli: return p_ == 0 || p_ == 1;
    case Kind::two_point: return a_ == b_ || p_ == 0 || p_ == 1;
    case Kind::exponential: return false;
  }
  return false;
}

std::string Law::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::constant: os << "constant(" << a_ << ")"; break;
    case Kind::uniform: os << "uniform(" << a_ << "," << b_ << ")"; break;
    case Kind::bernoulli: os << "bernoulli(" << p_ << ")"; break;
    case Kind::two_point: os << "two_point(" << a_ << "," << b_ << "," << p_ << ")"; break;
    case Kind::exponential: os << "exp(" << a_ << ")"; break;
  }
  return os.str();
}

namespace {

std::pair<std::string, std::vector<double>> split_call(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    return {s, {}};
  std::vector<double> args;
  std::stringstream ss(s.substr(open + 1, s.size() - open - 2));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      args.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw DomainError("bad numeric argument '" + tok + "' in '" + text + "'");
    }
  }
  return {s.substr(0, open), args};
}

}  // namespace

Law Law::parse(const std::string& text) {
  auto [name, args] = split_call(text);
  auto need = [&](std::size_t n) {
    if (args.size() != n)
      throw DomainError("law '" + text + "' expects " + std::to_string(n) + " argument(s)");
  };
  if (name == "constant") { need(1); return constant(args[0]); }
  if (name == "uniform") { need(2); return uniform(args[0], args[1]); }
  if (name == "bernoulli") { need(1); return bernoulli(args[0]); }
  if (name == "exp" || name == "exponential") { need(1); return exponential(args[0]); }
  if (name == "two_point") {
    if (args.size() == 2) return two_point(args[0], args[1]);
    need(3);
    return two_point(args[0], args[1], args[2]);
  }
  throw DomainError("unknown law '" + text + "'");
}

}  // namespace ergolab
