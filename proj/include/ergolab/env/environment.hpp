#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ergolab/core/geometry.hpp"

namespace ergolab::env {

// A jump channel between two atoms. Several bonds may join the same pair
// (distinct displacement vectors on a small torus); their rates accumulate.
struct Bond {
  std::uint32_t from;
  std::uint32_t to;
  double rate_forward;   // r_{from,to}
  double rate_backward;  // r_{to,from}
  Point displacement;    // from -> to, physical coordinates
};

struct Neighbor {
  std::uint32_t atom;
  double rate;
  Point displacement;
};

// Realized point set with multiplicities n_x and detailed-balance jump rates
// on a periodic box. Immutable after construction.
class Environment {
 public:
  Environment(Torus torus, double kappa, std::uint64_t seed, std::string model_tag,
              std::vector<Point> positions, std::vector<double> multiplicity,
              std::vector<Bond> bonds);

  int dim() const { return torus_.dim(); }
  std::int64_t side() const { return torus_.side(); }
  const Torus& torus() const { return torus_; }
  double kappa() const { return kappa_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& model_tag() const { return model_tag_; }

  std::size_t size() const { return positions_.size(); }
  const Point& position(std::size_t i) const { return positions_[i]; }
  const std::vector<Point>& positions() const { return positions_; }
  double multiplicity(std::size_t i) const { return multiplicity_[i]; }
  const std::vector<double>& multiplicities() const { return multiplicity_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  std::span<const Neighbor> neighbors(std::size_t i) const {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }

  // r_x = sum_y r_{x,y}.
  double escape_rate(std::size_t i) const;
  double total_mass() const;
  // All multiplicities equal to one.
  bool simple() const;
  bool connected() const;
  // Bit-exact n_x r_{x,y} == n_y r_{y,x} on every bond.
  bool detailed_balance_exact() const;

  // Throws DomainError naming the first violated invariant.
  void validate(bool require_connected = true) const;

  // Upper bound on the lambda_2 mass dropped by truncating long-range rates.
  double lambda2_truncation_bound() const { return lambda2_truncation_; }
  void set_lambda2_truncation_bound(double b) { lambda2_truncation_ = b; }
  // Number of samples drawn before a connected one was found.
  int attempts() const { return attempts_; }
  void set_attempts(int a) { attempts_ = a; }

 private:
  Torus torus_;
  double kappa_;
  std::uint64_t seed_;
  std::string model_tag_;
  std::vector<Point> positions_;
  std::vector<double> multiplicity_;
  std::vector<Bond> bonds_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  double lambda2_truncation_ = 0.0;
  int attempts_ = 1;
};

}  // namespace ergolab::env
