#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ergolab/core/geometry.hpp"
#include "ergolab/core/law.hpp"
#include "ergolab/env/environment.hpp"

namespace ergolab::env {

// Generator families.
//   zd_nn          nearest-neighbour Z^d, i.i.d. conductances from `rates`
//   zd_long_range  Z^d, r_{x,y} = w_x w_y |x-y|^-decay, weights w from `rates`
//   poisson        Poisson points of intensity `intensity`, r = w_x w_y exp(-|x-y|)
//   triangular_nn  triangular lattice (V != I), six neighbours, conductances from `rates`
//   stacked_chains d = 2 chains along e_1 joined by one non-periodic rung column
//                  along e_2 (no e_2 winding: degenerate effective matrix)
// `multiplicity` gives n_x on lattice families; its values must be powers of two
// so that detailed balance n_x r_{x,y} = n_y r_{y,x} holds bit-exactly.
struct ModelSpec {
  enum class Family { zd_nn, zd_long_range, poisson, triangular_nn, stacked_chains };

  Family family = Family::zd_nn;
  Law rates = Law::constant(1.0);
  Law multiplicity = Law::constant(1.0);
  double decay = 0.0;
  double intensity = 1.0;
  // Interaction cutoff; 0 picks the family default (L/2 for long range, 4 for poisson).
  double range = 0.0;
  double rung_rate = 1.0;
  int max_retries = 32;

  static ModelSpec nearest_neighbour(Law conductances);
  static ModelSpec long_range(Law weights, double decay);
  static ModelSpec poisson(double intensity, Law marks = Law::constant(1.0));
  static ModelSpec triangular(Law conductances);
  static ModelSpec stacked_chains(Law conductances, double rung_rate = 1.0);

  std::string tag() const;
  bool lattice() const { return family != Family::poisson; }
  // No randomness in the realized environment.
  bool deterministic() const;
};

ModelSpec::Family parse_family(const std::string& name);

// Deterministic in (model, d, L, seed, kappa, shift). `shift` translates the
// seed-indexed site fields by g (lattice families only).
Environment generate_environment(const ModelSpec& model, int d, std::int64_t side,
                                 std::uint64_t seed, double kappa = 2.0, const Site& shift = {});

// Poisson points uniform on [0, L)^d; shares the sampler with generate_environment.
std::vector<Point> sample_poisson_points(double intensity, int d, std::int64_t side,
                                         std::uint64_t seed);

}  // namespace ergolab::env
