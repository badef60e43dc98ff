#include "ergolab/refpde/convergence.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "ergolab/core/error.hpp"
#include "ergolab/core/parallel.hpp"
#include "ergolab/env/measure.hpp"
#include "ergolab/walk/generator.hpp"
#include "ergolab/walk/solvers.hpp"

namespace ergolab::refpde {

namespace {

double reference_value(const DiffusionSpec& spec, const TestFunction& f, Operation op, double param,
                       const Point& x) {
  if (f.gaussian) {
    return op == Operation::semigroup ? gaussian_semigroup(spec, param, *f.gaussian, x)
                                      : gaussian_resolvent(spec, param, *f.gaussian, x);
  }
  return op == Operation::semigroup ? heat_semigroup(spec, param, f.f, x)
                                    : heat_resolvent(spec, param, f.f, x);
}

// m times the squared L^2(dx) norm of the reference solution.
double reference_norm2(const DiffusionSpec& spec, const TestFunction& f, Operation op, double param,
                       const std::vector<Point>& grid, double cell) {
  if (f.gaussian) {
    const Gaussian& g = *f.gaussian;
    if (op == Operation::semigroup) return spec.m() * gaussian_pairing(spec, 2 * param, g);
    // |R f|^2 = int_0^inf tau e^{-lambda tau} <f, P_tau f> d tau.
    const double v = laplace_transform(
        param, [&](double tau) { return tau * gaussian_pairing(spec, tau, g); }, 1e-10);
    return spec.m() * v;
  }
  // Riemann sum on the lattice of the scaled box.
  double s = 0.0;
  for (const auto& x : grid) {
    const double u = reference_value(spec, f, op, param, x);
    s += u * u;
  }
  return spec.m() * s * cell;
}

}  // namespace

std::vector<ConvergenceRow> convergence_table(const env::Environment& env, const DiffusionSpec& spec,
                                              const TestFunction& f, Operation op, double param,
                                              const std::vector<double>& eps_grid, bool timing,
                                              unsigned threads) {
  if (spec.dim() != env.dim()) throw DomainError("diffusion matrix dimension differs from the environment");
  if (eps_grid.empty()) throw DomainError("epsilon grid is empty");
  if (op == Operation::semigroup && !(param >= 0)) throw DomainError("semigroup needs t >= 0");
  if (op == Operation::resolvent && !(param > 0)) throw DomainError("resolvent needs lambda > 0");
  const auto base = env::measure_of(env);
  std::vector<ConvergenceRow> rows(eps_grid.size());
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    const double eps = eps_grid[k];
    const double radius = env::rescale(base, eps).inner_radius(2.0);
    rows[k].epsilon = eps;
    rows[k].envelope_tail = f.envelope(radius);
    if (rows[k].envelope_tail > kMaxEnvelopeTail) {
      std::ostringstream os;
      os << "test function envelope at the half-box radius " << radius << " is "
         << rows[k].envelope_tail << " > " << kMaxEnvelopeTail << " for eps = " << eps
         << "; enlarge the torus";
      throw DomainError(os.str());
    }
  }
  parallel_for(eps_grid.size(), threads ? threads : default_threads(), [&](std::size_t k) {
    const auto start = std::chrono::steady_clock::now();
    ConvergenceRow& row = rows[k];
    const auto gen = walk::build_generator(env, row.epsilon);
    const std::size_t n = gen.size();
    std::vector<double> fv(n), ref(n);
    for (std::size_t i = 0; i < n; ++i) {
      fv[i] = f.f(gen.positions()[i]);
      ref[i] = reference_value(spec, f, op, param, gen.positions()[i]);
    }
    std::vector<double> u;
    if (op == Operation::semigroup) {
      auto r = walk::semigroup(gen, param, fv);
      row.solver_bound = r.truncation;
      u = std::move(r.u);
    } else {
      auto r = walk::resolvent(gen, param, fv, 1e-10);
      row.solver_bound = r.relative_residual;
      u = std::move(r.u);
    }
    const double half = 0.5 * row.epsilon * static_cast<double>(env.side());
    double top = 0.0, edge = 0.0;
    double e2 = 0.0, e1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      top = std::max(top, std::abs(ref[i]));
      double far = 0.0;
      for (int a = 0; a < env.dim(); ++a) far = std::max(far, std::abs(gen.positions()[i][a]));
      if (far >= half - row.epsilon) edge = std::max(edge, std::abs(ref[i]));
      const double diff = u[i] - ref[i];
      e2 += gen.mass(i) * diff * diff;
      e1 += gen.mass(i) * std::abs(diff);
    }
    row.reference_edge = top > 0 ? edge / top : 0.0;
    row.err2 = e2;
    row.err1 = e1;
    std::vector<Point> grid;
    if (!f.gaussian) {
      // Unit-spacing lattice of the box, scaled.
      const auto side = env.side();
      const int d = env.dim();
      Site j{0, 0, 0};
      std::int64_t count = 1;
      for (int a = 0; a < d; ++a) count *= side;
      for (std::int64_t c = 0; c < count; ++c) {
        std::int64_t rest = c;
        Point x{};
        for (int a = d - 1; a >= 0; --a) {
          j[a] = rest % side;
          rest /= side;
          x[a] = row.epsilon * (static_cast<double>(j[a]) - static_cast<double>(side / 2));
        }
        grid.push_back(x);
      }
    }
    row.ref_norm2 = reference_norm2(spec, f, op, param, grid, std::pow(row.epsilon, env.dim()));
    if (timing)
      row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  return rows;
}

}  // namespace ergolab::refpde
