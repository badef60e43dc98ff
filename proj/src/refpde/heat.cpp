#include "ergolab/refpde/heat.hpp"

#include <unsupported/Eigen/FFT>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <sstream>

#include "ergolab/core/error.hpp"
#include "ergolab/core/quadrature.hpp"

namespace ergolab::refpde {

DiffusionSpec::DiffusionSpec(const Eigen::MatrixXd& D, double m) : D_(D), m_(m) {
  if (D.rows() != D.cols() || D.rows() < 1 || D.rows() > kMaxDim)
    throw DomainError("diffusion matrix must be square of size 1..3");
  if (!D.allFinite()) throw DomainError("diffusion matrix has non-finite entries");
  if ((D - D.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, D.norm()))
    throw DomainError("diffusion matrix must be symmetric");
  if (!(m > 0) || !std::isfinite(m)) throw DomainError("intensity must be positive");
  D_ = 0.5 * (D + D.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D_);
  Q_ = es.eigenvectors();
  lambda_ = es.eigenvalues();
  const double top = lambda_.cwiseAbs().maxCoeff();
  if (lambda_.minCoeff() < -1e-10 * std::max(top, 1e-300))
    throw DomainError("diffusion matrix must be positive semidefinite");
  for (int i = 0; i < lambda_.size(); ++i) {
    if (lambda_(i) <= 1e-10 * top) {
      lambda_(i) = 0.0;
    } else {
      ++rank_;
    }
  }
}

namespace {

double tensor_hermite(const DiffusionSpec& spec, double t, const Function& f, const Point& x,
                      const QuadratureRule& rule) {
  const int d = spec.dim();
  std::vector<int> active;
  std::vector<double> scale;
  for (int i = 0; i < d; ++i)
    if (!spec.kernel(i)) {
      active.push_back(i);
      scale.push_back(std::sqrt(2.0 * spec.eigenvalues()(i) * t));
    }
  const std::size_t r = active.size();
  const std::size_t q = rule.nodes.size();
  std::vector<std::size_t> idx(r, 0);
  double total = 0.0;
  while (true) {
    Point y = x;
    double w = 1.0;
    for (std::size_t a = 0; a < r; ++a) {
      const double step = scale[a] * rule.nodes[idx[a]];
      w *= rule.weights[idx[a]];
      for (int k = 0; k < d; ++k) y[k] += spec.Q()(k, active[a]) * step;
    }
    total += w * f(y);
    std::size_t a = 0;
    while (a < r && ++idx[a] == q) idx[a++] = 0;
    if (a == r) break;
  }
  return total;
}

const QuadratureRule& hermite(int order) {
  static thread_local std::map<int, QuadratureRule> cache;
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, gauss_hermite_normal(order)).first;
  return it->second;
}

const QuadratureRule& legendre(int order) {
  static const QuadratureRule r8 = gauss_legendre(8), r16 = gauss_legendre(16);
  return order == 8 ? r8 : r16;
}

constexpr double kFirstPanel = 1.0 / 64;
constexpr double kLaplaceCutoff = 40.0;
constexpr int kMaxHermiteScale = 4;

}  // namespace

double heat_semigroup(const DiffusionSpec& spec, double t, const Function& f, const Point& x,
                      double tol, int order) {
  if (!(t >= 0)) throw DomainError("heat semigroup needs t >= 0");
  if (order < 1) throw DomainError("quadrature order must be positive");
  if (t == 0.0 || spec.rank() == 0) return f(x);
  // Wide kernels against narrow data need more nodes; escalate a few times.
  double coarse = tensor_hermite(spec, t, f, x, hermite(order));
  double gap = 0.0;
  for (int o = order; o <= kMaxHermiteScale * order; o *= 2) {
    const double fine = tensor_hermite(spec, t, f, x, hermite(2 * o));
    gap = std::abs(fine - coarse);
    if (gap <= tol * (1.0 + std::abs(fine))) return fine;
    coarse = fine;
  }
  std::ostringstream os;
  os << "Gauss-Hermite up to order " << 2 * kMaxHermiteScale * order << " misses tolerance " << tol
     << " (order-doubling gap " << gap << ")";
  throw SolverError(os.str());
}

double laplace_transform(double lambda, const std::function<double(double)>& p, double tol) {
  if (!(lambda > 0)) throw DomainError("resolvent needs lambda > 0");
  auto g = [&](double s) { return p(s / lambda); };
  const double fine = exp_weighted_integral(legendre(16), g, kFirstPanel, kLaplaceCutoff);
  const double coarse = exp_weighted_integral(legendre(8), g, kFirstPanel, kLaplaceCutoff);
  if (std::abs(fine - coarse) > tol * (1.0 + std::abs(fine))) {
    std::ostringstream os;
    os << "time quadrature misses tolerance " << tol << " (order gap " << std::abs(fine - coarse) << ")";
    throw SolverError(os.str());
  }
  return fine / lambda;
}

double heat_resolvent(const DiffusionSpec& spec, double lambda, const Function& f, const Point& x,
                      double tol) {
  if (spec.rank() == 0) {
    if (!(lambda > 0)) throw DomainError("resolvent needs lambda > 0");
    return f(x) / lambda;
  }
  // The weight e^{-s} forgives quadrature error at late times.
  auto p = [&](double t) {
    const double local = tol * std::exp(std::min(lambda * t, 600.0)) / (4 * kLaplaceCutoff);
    return heat_semigroup(spec, t, f, x, local);
  };
  return laplace_transform(lambda, p, tol);
}

double Gaussian::operator()(const Point& x, int d) const {
  double r2 = 0.0;
  for (int i = 0; i < d; ++i) r2 += x[i] * x[i];
  return amplitude * std::exp(-r2 / (2 * sigma * sigma));
}

double gaussian_semigroup(const DiffusionSpec& spec, double t, const Gaussian& g, const Point& x) {
  if (!(t >= 0)) throw DomainError("heat semigroup needs t >= 0");
  const int d = spec.dim();
  const double s2 = g.sigma * g.sigma;
  double log_value = 0.0;
  for (int i = 0; i < d; ++i) {
    // Coordinates along the eigenbasis are independent; variances add.
    double y = 0.0;
    for (int k = 0; k < d; ++k) y += spec.Q()(k, i) * x[k];
    const double v = s2 + 2.0 * spec.eigenvalues()(i) * t;
    log_value += 0.5 * std::log(s2 / v) - y * y / (2.0 * v);
  }
  return g.amplitude * std::exp(log_value);
}

double gaussian_resolvent(const DiffusionSpec& spec, double lambda, const Gaussian& g,
                          const Point& x, double tol) {
  if (spec.rank() == 0) {
    if (!(lambda > 0)) throw DomainError("resolvent needs lambda > 0");
    return g(x, spec.dim()) / lambda;
  }
  return laplace_transform(lambda, [&](double t) { return gaussian_semigroup(spec, t, g, x); }, tol);
}

double gaussian_pairing(const DiffusionSpec& spec, double tau, const Gaussian& g) {
  const double s2 = g.sigma * g.sigma;
  double v = g.amplitude * g.amplitude;
  for (int i = 0; i < spec.dim(); ++i)
    v *= s2 * std::sqrt(2 * std::numbers::pi / (2 * s2 + 2 * spec.eigenvalues()(i) * tau));
  return v;
}

std::vector<double> heat_pde_torus(const Eigen::MatrixXd& D, const std::vector<double>& rho0, int n,
                                   double t) {
  const int d = static_cast<int>(D.rows());
  if (d < 1 || d > kMaxDim || D.cols() != d) throw DomainError("diffusion matrix must be d x d");
  if (n < 1) throw DomainError("grid needs at least one point per axis");
  if (!(t >= 0)) throw DomainError("heat flow needs t >= 0");
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
  if (rho0.size() != total) throw DomainError("grid size does not match n^d");

  using Complex = std::complex<double>;
  std::vector<Complex> data(rho0.begin(), rho0.end());
  Eigen::FFT<double> fft;
  std::vector<Complex> line(n), out(n);
  auto transform_axis = [&](int axis, bool inverse) {
    std::size_t stride = 1;
    for (int i = axis + 1; i < d; ++i) stride *= static_cast<std::size_t>(n);
    const std::size_t block = stride * static_cast<std::size_t>(n);
    for (std::size_t base = 0; base < total; base += block)
      for (std::size_t off = 0; off < stride; ++off) {
        for (int k = 0; k < n; ++k) line[k] = data[base + off + k * stride];
        if (inverse) {
          fft.inv(out, line);
        } else {
          fft.fwd(out, line);
        }
        for (int k = 0; k < n; ++k) data[base + off + k * stride] = out[k];
      }
  };
  for (int a = 0; a < d; ++a) transform_axis(a, false);
  const double c = 4.0 * std::numbers::pi * std::numbers::pi * t;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Eigen::VectorXd k(d), nyquist(d);
    std::size_t rest = idx;
    for (int a = d - 1; a >= 0; --a) {
      const auto m = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
      // A Nyquist index has no sign; dropping it from the cross terms keeps the
      // multiplier conjugate-symmetric so the output stays real.
      k(a) = 2 * m == n ? 0.0 : (2 * m < n ? m : m - n);
      nyquist(a) = 2 * m == n ? 0.5 * n : 0.0;
    }
    double q = k.dot(D * k);
    for (int a = 0; a < d; ++a) q += nyquist(a) * nyquist(a) * D(a, a);
    data[idx] *= std::exp(-c * q);
  }
  for (int a = 0; a < d; ++a) transform_axis(a, true);
  std::vector<double> rho(total);
  for (std::size_t i = 0; i < total; ++i) rho[i] = data[i].real();
  return rho;
}

}  // namespace ergolab::refpde
