#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ergolab/core/geometry.hpp"
#include "ergolab/core/stats.hpp"
#include "ergolab/env/environment.hpp"
#include "ergolab/env/models.hpp"

namespace ergolab::homog {

// Periodic corrector for direction a. Minimizes
//   E(chi) = (1 / sum n) * sum over bonds c_b (a.delta_b + chi(to) - chi(from))^2,
// c_b = n_from r_{from,to}; each bond counts once (the ordered-pair sum halves it).
struct Corrector {
  std::vector<double> chi;  // gauge: sum n_z chi(z) = 0
  double energy = 0.0;      // a.D a
  double upper_bound = 0.0; // E(0)
  double relative_residual = 0.0;
  std::size_t iterations = 0;
};

Corrector corrector_solve(const env::Environment& env, const Point& a, double tol = 1e-12);

// Quadratic form value at an arbitrary trial corrector.
double corrector_energy(const env::Environment& env, const Point& a, const std::vector<double>& chi);

struct EffectiveMatrix {
  Eigen::MatrixXd D;
  std::vector<double> residuals;     // one per solved direction
  std::vector<double> upper_bounds;  // E(0) per solved direction, same order
  std::vector<double> energies;
  // Directions: e_1..e_d, then e_i + e_j for i < j in lexicographic order.
  std::vector<Point> directions;

  double residual_max() const;
  // min over directions of E(0) - a.D a; nonnegative up to solver error.
  double upper_bound_gap() const;
};

// Polarization from d + d(d-1)/2 corrector solves. Throws SolverError when D
// fails the symmetric PSD check.
EffectiveMatrix effective_matrix(const env::Environment& env, double tol = 1e-12,
                                 unsigned threads = 0);

struct EnsembleMatrix {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd std_error;
  std::vector<Eigen::MatrixXd> samples;
  std::vector<std::uint64_t> seeds;
};

// Seed k uses replica_seed(master, k).
EnsembleMatrix ensemble_effective_matrix(const env::ModelSpec& model, int d, std::int64_t side,
                                         std::size_t n_seeds, std::uint64_t master,
                                         double tol = 1e-12, unsigned threads = 0);

}  // namespace ergolab::homog
