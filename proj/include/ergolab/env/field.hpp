#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/core/geometry.hpp"
#include "ergolab/core/law.hpp"
#include "ergolab/core/rng.hpp"

namespace ergolab::env {

// Real field j -> f(T^j omega) on Z^d. Either a hash-realized i.i.d. sampler
// (translation consistent: the field shifted by g evaluated at j is the
// original at j + g), a stored array on a box, or a constant.
class ScalarField {
 public:
  enum class Kind { iid, stored, constant };

  static ScalarField iid(int d, Law law, std::uint64_t seed, std::uint64_t stream = 0);
  // Values on the box origin + [0, side)^d, last coordinate fastest.
  static ScalarField stored(int d, const Site& origin, std::int64_t side, std::vector<double> values);
  static ScalarField constant(int d, double c);
  // Global fair choice (probability `prob_first`) between two i.i.d. laws, made
  // once per seed; the chosen component is exposed as the label.
  static ScalarField mixture(int d, Law first, Law second, std::uint64_t seed,
                             double prob_first = 0.5);

  Kind kind() const { return kind_; }
  int dim() const { return d_; }
  const Site& offset() const { return offset_; }
  std::optional<int> component_label() const { return label_; }
  const std::optional<Law>& law() const { return law_; }
  // Hash state after the key and stream words (i.i.d. fields).
  std::uint64_t hash_prefix() const { return prefix_; }

  double operator()(const Site& j) const {
    switch (kind_) {
      case Kind::constant: return value_;
      case Kind::iid: {
        std::uint64_t h = prefix_;
        for (int i = 0; i < d_; ++i) h = hash_step(h, j[i] + offset_[i]);
        return law_->sample(to_unit(h));
      }
      case Kind::stored: {
        std::size_t k = 0;
        for (int i = 0; i < d_; ++i) {
          const std::int64_t u = j[i] + offset_[i] - origin_[i];
          if (u < 0 || u >= side_) throw_outside(j);
          k = k * static_cast<std::size_t>(side_) + static_cast<std::size_t>(u);
        }
        return (*values_)[k];
      }
    }
    return 0.0;
  }

  // Field with the base point moved by g: shifted(g)(j) == (*this)(j + g).
  ScalarField shifted(const Site& g) const;
  // Stored copy on the cube [-radius, radius]^d.
  ScalarField materialize(std::int64_t radius) const;
  // Whether every j with |j|_inf <= radius can be evaluated.
  bool covers(std::int64_t radius) const;

  // A priori bound sup |f| when one is known (bounded law, stored data, constant).
  std::optional<double> bound() const;
  // min f over the field's range when known a priori; stored fields scan their data.
  double lower_bound() const;
  std::string describe() const;

 private:
  [[noreturn]] void throw_outside(const Site& j) const;

  Kind kind_ = Kind::constant;
  int d_ = 1;
  double value_ = 0.0;
  std::optional<Law> law_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t prefix_ = 0;
  Site offset_{0, 0, 0};
  Site origin_{0, 0, 0};
  std::int64_t side_ = 0;
  std::shared_ptr<const std::vector<double>> values_;
  std::optional<int> label_;
};

}  // namespace ergolab::env
