#include "ergolab/env/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergolab/core/error.hpp"

namespace ergolab::env {

namespace {
constexpr std::uint64_t kStreamMixtureLabel = 11;
}

ScalarField ScalarField::iid(int d, Law law, std::uint64_t seed, std::uint64_t stream) {
  check_dimension(d);
  ScalarField f;
  f.kind_ = Kind::iid;
  f.d_ = d;
  f.law_ = law;
  f.seed_ = seed;
  f.stream_ = stream;
  f.prefix_ = stream_key(seed, stream);
  return f;
}

ScalarField ScalarField::stored(int d, const Site& origin, std::int64_t side,
                                std::vector<double> values) {
  check_dimension(d);
  if (side < 1) throw DomainError("stored field needs a positive box side");
  std::size_t expect = 1;
  for (int i = 0; i < d; ++i) expect *= static_cast<std::size_t>(side);
  if (values.size() != expect) throw DomainError("stored field has the wrong number of values");
  ScalarField f;
  f.kind_ = Kind::stored;
  f.d_ = d;
  f.origin_ = origin;
  f.side_ = side;
  f.values_ = std::make_shared<const std::vector<double>>(std::move(values));
  return f;
}

ScalarField ScalarField::constant(int d, double c) {
  check_dimension(d);
  ScalarField f;
  f.kind_ = Kind::constant;
  f.d_ = d;
  f.value_ = c;
  return f;
}

ScalarField ScalarField::mixture(int d, Law first, Law second, std::uint64_t seed,
                                 double prob_first) {
  const double u = to_unit(counter_hash(seed, kStreamMixtureLabel, {}));
  const int label = u < prob_first ? 0 : 1;
  ScalarField f = iid(d, label == 0 ? first : second, seed);
  f.label_ = label;
  return f;
}

ScalarField ScalarField::shifted(const Site& g) const {
  ScalarField f = *this;
  for (int i = 0; i < d_; ++i) f.offset_[i] += g[i];
  return f;
}

ScalarField ScalarField::materialize(std::int64_t radius) const {
  if (radius < 0) throw DomainError("materialize radius must be non-negative");
  if (!covers(radius)) throw_outside({radius, radius, radius});
  const std::int64_t side = 2 * radius + 1;
  std::size_t count = 1;
  for (int i = 0; i < d_; ++i) count *= static_cast<std::size_t>(side);
  std::vector<double> values(count);
  Site j{0, 0, 0};
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t r = k;
    for (int i = d_ - 1; i >= 0; --i) {
      j[i] = static_cast<std::int64_t>(r % side) - radius;
      r /= side;
    }
    values[k] = (*this)(j);
  }
  ScalarField f = stored(d_, {-radius, -radius, -radius}, side, std::move(values));
  f.label_ = label_;
  return f;
}

bool ScalarField::covers(std::int64_t radius) const {
  if (kind_ != Kind::stored) return true;
  for (int i = 0; i < d_; ++i) {
    const std::int64_t lo = -radius + offset_[i] - origin_[i];
    const std::int64_t hi = radius + offset_[i] - origin_[i];
    if (lo < 0 || hi >= side_) return false;
  }
  return true;
}

std::optional<double> ScalarField::bound() const {
  switch (kind_) {
    case Kind::constant: return std::abs(value_);
    case Kind::iid:
      if (law_->bounded()) return law_->bound();
      return std::nullopt;
    case Kind::stored: {
      double m = 0.0;
      for (double v : *values_) m = std::max(m, std::abs(v));
      return m;
    }
  }
  return std::nullopt;
}

double ScalarField::lower_bound() const {
  switch (kind_) {
    case Kind::constant: return value_;
    case Kind::iid: return law_->min_value();
    case Kind::stored: return values_->empty() ? 0.0 : *std::min_element(values_->begin(), values_->end());
  }
  return 0.0;
}

std::string ScalarField::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::constant: os << "constant(" << value_ << ")"; break;
    case Kind::iid: os << "iid(" << law_->describe() << ";seed=" << seed_ << ")"; break;
    case Kind::stored: os << "stored(side=" << side_ << ")"; break;
  }
  if (label_) os << "[component " << *label_ << "]";
  return os.str();
}

void ScalarField::throw_outside(const Site& j) const {
  std::ostringstream os;
  os << "field evaluated outside its stored box (side " << side_ << ") near (";
  for (int i = 0; i < d_; ++i) os << (i ? "," : "") << j[i];
  os << "); enlarge the box or lower n";
  throw DomainError(os.str());
}

}  // namespace ergolab::env
