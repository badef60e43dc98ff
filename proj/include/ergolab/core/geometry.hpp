#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace ergolab {

inline constexpr int kMaxDim = 3;

// Points in R^d and sites in Z^d; components beyond the dimension are zero.
using Point = std::array<double, kMaxDim>;
using Site = std::array<std::int64_t, kMaxDim>;

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

void check_dimension(int d);
void check_kappa(double kappa);

// l^kappa norm of the first d components, kappa in [1, inf].
double norm(const Point& x, int d, double kappa);
double norm(const Site& j, int d, double kappa);

// Volume of the unit l^kappa ball in R^d.
double unit_ball_volume(int d, double kappa);

// Largest l^kappa distance from the centre of the unit cube to its corners.
double half_cube_diameter(int d, double kappa);

inline Point to_point(const Site& j) {
  return {static_cast<double>(j[0]), static_cast<double>(j[1]), static_cast<double>(j[2])};
}

// Visits the ball |j|_kappa <= radius as rows along the last axis:
// fn(prefix, lo, hi) covers prefix with last coordinate in [lo, hi]. A few sites
// whose norm exceeds the radius by rounding may be included; none inside is skipped.
template <class Fn>
void for_each_row_in_ball(int d, double kappa, std::int64_t radius, Fn&& fn) {
  Site j{0, 0, 0};
  const bool sup_norm = std::isinf(kappa);
  const double r = static_cast<double>(radius);
  const double budget0 = sup_norm ? r : std::pow(r, kappa);
  auto extent = [&](double budget) -> std::int64_t {
    if (budget < 0) return -1;
    double e = sup_norm ? budget : std::pow(budget, 1.0 / kappa);
    return static_cast<std::int64_t>(std::floor(e * (1.0 + 1e-12) + 1e-9));
  };
  auto rec = [&](auto&& self, int axis, double budget) -> void {
    const std::int64_t m = std::min<std::int64_t>(extent(budget), radius);
    if (axis == d - 1) {
      if (m >= 0) fn(static_cast<const Site&>(j), -m, m);
      return;
    }
    for (std::int64_t v = -m; v <= m; ++v) {
      j[axis] = v;
      const double used = sup_norm ? 0.0 : std::pow(std::abs(static_cast<double>(v)), kappa);
      self(self, axis + 1, sup_norm ? budget : budget - used);
    }
    j[axis] = 0;
  };
  rec(rec, 0, budget0);
}

// Visits every j in Z^d with |j|_kappa <= radius (same set as the rows above).
// The last coordinate varies fastest.
template <class Fn>
void for_each_site_in_ball(int d, double kappa, std::int64_t radius, Fn&& fn) {
  for_each_row_in_ball(d, kappa, radius, [&](const Site& prefix, std::int64_t lo, std::int64_t hi) {
    Site j = prefix;
    for (std::int64_t v = lo; v <= hi; ++v) {
      j[d - 1] = v;
      fn(static_cast<const Site&>(j));
    }
  });
}

// Invertible d x d matrix V acting by g -> V g; columns span the fundamental cell.
class LatticeMap {
 public:
  LatticeMap();  // identity in kMaxDim
  LatticeMap(int d, const std::array<std::array<double, kMaxDim>, kMaxDim>& rows);
  static LatticeMap identity(int d);
  static LatticeMap triangular();

  int dim() const { return d_; }
  double det() const { return det_; }
  // |det V|, the Lebesgue measure of the fundamental cell.
  double cell_volume() const { return std::abs(det_); }
  bool is_identity() const;

  Point apply(const Point& g) const;
  Point apply_inverse(const Point& x) const;
  double entry(int r, int c) const { return v_[r][c]; }

 private:
  int d_ = kMaxDim;
  std::array<std::array<double, kMaxDim>, kMaxDim> v_{};
  std::array<std::array<double, kMaxDim>, kMaxDim> inv_{};
  double det_ = 1.0;
};

// Periodic box V [0, L)^d.
class Torus {
 public:
  Torus() = default;
  Torus(int d, std::int64_t side, LatticeMap lattice);

  int dim() const { return d_; }
  std::int64_t side() const { return side_; }
  const LatticeMap& lattice() const { return lattice_; }
  double volume() const;

  // Minimal-image representative of a displacement, taken in lattice coordinates.
  Point minimal_image(const Point& delta) const;
  // Representative of a position in the centred box V [-L/2, L/2)^d.
  Point centred(const Point& x) const;
  // Largest radius r such that the centred l^kappa ball of radius r fits in the box.
  double inner_radius(double kappa) const;

 private:
  int d_ = 1;
  std::int64_t side_ = 1;
  LatticeMap lattice_;
};

std::int64_t wrap_index(std::int64_t v, std::int64_t side);

}  // namespace ergolab
