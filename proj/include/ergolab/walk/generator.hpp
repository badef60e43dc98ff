#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ergolab/core/geometry.hpp"
#include "ergolab/env/environment.hpp"

namespace ergolab::walk {

// L^eps f(x) = eps^-2 sum_y r_{x,y} (f(y) - f(x)) on the atoms of a finite
// environment, self-adjoint in <u, v> = sum_x eps^d n_x u_x v_x.
class SparseGenerator {
 public:
  int dim() const { return d_; }
  double epsilon() const { return epsilon_; }
  std::size_t size() const { return masses_.size(); }
  // eps x in the centred box.
  const std::vector<Point>& positions() const { return positions_; }
  const std::vector<double>& masses() const { return masses_; }
  double mass(std::size_t i) const { return masses_[i]; }

  // Off-diagonal entries of row i as (column, value); a column may repeat when
  // several bonds join the same pair.
  std::span<const std::size_t> columns(std::size_t i) const {
    return {cols_.data() + offsets_[i], cols_.data() + offsets_[i + 1]};
  }
  std::span<const double> values(std::size_t i) const {
    return {vals_.data() + offsets_[i], vals_.data() + offsets_[i + 1]};
  }
  // Accumulated entry L_ij (i != j) and the diagonal -sum_j L_ij.
  double entry(std::size_t i, std::size_t j) const;
  double diagonal(std::size_t i) const { return diag_[i]; }
  // max_i |L_ii|
  double max_rate() const { return max_rate_; }

  // out = L f, computed as sum_j L_ij (f_j - f_i) so that L 1 = 0 exactly.
  void apply(std::span<const double> f, std::span<double> out) const;
  double inner(std::span<const double> u, std::span<const double> v) const;
  double norm(std::span<const double> u) const;

 private:
  friend SparseGenerator build_generator(const env::Environment& env, double epsilon);
  int d_ = 1;
  double epsilon_ = 1.0;
  std::vector<Point> positions_;
  std::vector<double> masses_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
  std::vector<double> diag_;
  double max_rate_ = 0.0;
};

SparseGenerator build_generator(const env::Environment& env, double epsilon);

}  // namespace ergolab::walk
