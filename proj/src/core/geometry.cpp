#include "ergolab/core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ergolab/core/error.hpp"

namespace ergolab {

void check_dimension(int d) {
  if (d < 1 || d > kMaxDim)
    throw DomainError("dimension must be in [1, " + std::to_string(kMaxDim) + "], got " +
                      std::to_string(d));
}

void check_kappa(double kappa) {
  if (!(kappa >= 1.0)) throw DomainError("norm index kappa must lie in [1, inf]");
}

namespace {

template <class V>
double norm_impl(const V& x, int d, double kappa) {
  if (std::isinf(kappa)) {
    double m = 0.0;
    for (int i = 0; i < d; ++i) m = std::max(m, std::abs(static_cast<double>(x[i])));
    return m;
  }
  if (kappa == 2.0) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      const double v = static_cast<double>(x[i]);
      s += v * v;
    }
    return std::sqrt(s);
  }
  if (kappa == 1.0) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += std::abs(static_cast<double>(x[i]));
    return s;
  }
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += std::pow(std::abs(static_cast<double>(x[i])), kappa);
  return std::pow(s, 1.0 / kappa);
}

}  // namespace

double norm(const Point& x, int d, double kappa) { return norm_impl(x, d, kappa); }
double norm(const Site& j, int d, double kappa) { return norm_impl(j, d, kappa); }

double unit_ball_volume(int d, double kappa) {
  if (std::isinf(kappa)) return std::pow(2.0, d);
  return std::pow(2.0 * std::tgamma(1.0 + 1.0 / kappa), d) / std::tgamma(1.0 + d / kappa);
}

double half_cube_diameter(int d, double kappa) {
  if (std::isinf(kappa)) return 0.5;
  return 0.5 * std::pow(static_cast<double>(d), 1.0 / kappa);
}

std::int64_t wrap_index(std::int64_t v, std::int64_t side) {
  std::int64_t r = v % side;
  return r < 0 ? r + side : r;
}

LatticeMap::LatticeMap() {
  for (int i = 0; i < kMaxDim; ++i) v_[i][i] = inv_[i][i] = 1.0;
}

LatticeMap LatticeMap::identity(int d) {
  check_dimension(d);
  LatticeMap m;
  m.d_ = d;
  return m;
}

LatticeMap LatticeMap::triangular() {
  return LatticeMap(2, {{{1.0, 0.5, 0.0}, {0.0, std::sqrt(3.0) / 2.0, 0.0}, {0.0, 0.0, 1.0}}});
}

LatticeMap::LatticeMap(int d, const std::array<std::array<double, kMaxDim>, kMaxDim>& rows)
    : d_(d) {
  check_dimension(d);
  // Embed the d x d block into a 3 x 3 matrix padded with the identity.
  for (int r = 0; r < kMaxDim; ++r)
    for (int c = 0; c < kMaxDim; ++c)
      v_[r][c] = (r < d && c < d) ? rows[r][c] : (r == c ? 1.0 : 0.0);
  const auto& a = v_;
  det_ = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (det_ == 0.0 || !std::isfinite(det_)) throw DomainError("lattice map V must be invertible");
  inv_[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det_;
  inv_[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det_;
  inv_[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det_;
  inv_[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det_;
  inv_[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det_;
  inv_[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det_;
  inv_[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det_;
  inv_[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det_;
  inv_[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det_;
}

bool LatticeMap::is_identity() const {
  for (int r = 0; r < kMaxDim; ++r)
    for (int c = 0; c < kMaxDim; ++c)
      if (v_[r][c] != (r == c ? 1.0 : 0.0)) return false;
  return true;
}

Point LatticeMap::apply(const Point& g) const {
  if (is_identity()) return g;
  Point x{0, 0, 0};
  for (int r = 0; r < d_; ++r)
    for (int c = 0; c < d_; ++c) x[r] += v_[r][c] * g[c];
  return x;
}

Point LatticeMap::apply_inverse(const Point& x) const {
  if (is_identity()) return x;
  Point g{0, 0, 0};
  for (int r = 0; r < d_; ++r)
    for (int c = 0; c < d_; ++c) g[r] += inv_[r][c] * x[c];
  return g;
}

Torus::Torus(int d, std::int64_t side, LatticeMap lattice)
    : d_(d), side_(side), lattice_(std::move(lattice)) {
  check_dimension(d);
  if (side < 1) throw DomainError("torus side must be positive");
  if (lattice_.dim() != d) throw DomainError("lattice map dimension does not match the torus");
}

double Torus::volume() const {
  return std::pow(static_cast<double>(side_), d_) * lattice_.cell_volume();
}

Point Torus::minimal_image(const Point& delta) const {
  Point u = lattice_.apply_inverse(delta);
  const double l = static_cast<double>(side_);
  for (int i = 0; i < d_; ++i) u[i] -= l * std::round(u[i] / l);
  return lattice_.apply(u);
}

Point Torus::centred(const Point& x) const {
  Point u = lattice_.apply_inverse(x);
  const double l = static_cast<double>(side_);
  for (int i = 0; i < d_; ++i) {
    u[i] -= l * std::floor(u[i] / l + 0.5);
    if (u[i] >= 0.5 * l) u[i] -= l;
  }
  return lattice_.apply(u);
}

double Torus::inner_radius(double kappa) const {
  // Face i of the centred box is {u_i = L/2}; over the kappa-ball of radius r
  // the largest u_i is r times the dual norm of row i of V^-1.
  const double dual = std::isinf(kappa) ? 1.0 : (kappa == 1.0 ? kInfNorm : kappa / (kappa - 1.0));
  double r = kInfNorm;
  for (int i = 0; i < d_; ++i) {
    Point row{0, 0, 0};
    for (int c = 0; c < d_; ++c) {
      Point e{0, 0, 0};
      e[c] = 1.0;
      row[c] = lattice_.apply_inverse(e)[i];
    }
    r = std::min(r, 0.5 * static_cast<double>(side_) / norm(row, d_, dual));
  }
  return r;
}

}  // namespace ergolab
