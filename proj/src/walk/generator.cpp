#include "ergolab/walk/generator.hpp"

#include <algorithm>
#include <cmath>

#include "ergolab/core/error.hpp"

namespace ergolab::walk {

SparseGenerator build_generator(const env::Environment& env, double epsilon) {
  if (!(epsilon > 0) || epsilon > 1) throw DomainError("generator needs 0 < epsilon <= 1");
  if (!env.connected()) throw DomainError("generator needs a connected environment");
  SparseGenerator g;
  const std::size_t n = env.size();
  const int d = env.dim();
  g.d_ = d;
  g.epsilon_ = epsilon;
  const double speed = 1.0 / (epsilon * epsilon);
  const double vol = std::pow(epsilon, d);
  g.positions_.resize(n);
  g.masses_.resize(n);
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Point c = env.torus().centred(env.position(i));
    for (int k = 0; k < d; ++k) g.positions_[i][k] = epsilon * c[k];
    g.masses_[i] = vol * env.multiplicity(i);
    g.offsets_[i + 1] = g.offsets_[i] + env.neighbors(i).size();
  }
  g.cols_.resize(g.offsets_[n]);
  g.vals_.resize(g.offsets_[n]);
  g.diag_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = g.offsets_[i];
    for (const auto& nb : env.neighbors(i)) {
      g.cols_[k] = nb.atom;
      g.vals_[k] = speed * nb.rate;
      g.diag_[i] -= g.vals_[k];
      ++k;
    }
    g.max_rate_ = std::max(g.max_rate_, -g.diag_[i]);
  }
  return g;
}

double SparseGenerator::entry(std::size_t i, std::size_t j) const {
  if (i == j) return diag_[i];
  double s = 0.0;
  auto c = columns(i);
  auto v = values(i);
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c[k] == j) s += v[k];
  return s;
}

void SparseGenerator::apply(std::span<const double> f, std::span<double> out) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    const double fi = f[i];
    double s = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) s += vals_[k] * (f[cols_[k]] - fi);
    out[i] = s;
  }
}

double SparseGenerator::inner(std::span<const double> u, std::span<const double> v) const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += masses_[i] * u[i] * v[i];
  return s;
}

double SparseGenerator::norm(std::span<const double> u) const { return std::sqrt(inner(u, u)); }

}  // namespace ergolab::walk
