#include "ergolab/env/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ergolab/core/error.hpp"
#include "ergolab/core/rng.hpp"
#include "ergolab/env/measure.hpp"

namespace ergolab::env {

namespace {

constexpr std::uint64_t kStreamMultiplicity = 1;
constexpr std::uint64_t kStreamWeight = 2;
constexpr std::uint64_t kStreamCount = 3;
constexpr std::uint64_t kStreamCoordinate = 4;
constexpr std::uint64_t kStreamMark = 7;
constexpr std::uint64_t kStreamConductance = 100;

double site_uniform(std::uint64_t seed, std::uint64_t stream, const Site& s, int d) {
  return to_unit(counter_hash(seed, stream, std::span<const std::int64_t>(s.data(), d)));
}

bool power_of_two(double v) {
  int e = 0;
  return v > 0 && std::isfinite(v) && std::frexp(v, &e) == 0.5;
}

struct SiteGrid {
  int d;
  std::int64_t side;

  std::size_t count() const {
    std::size_t n = 1;
    for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(side);
    return n;
  }
  // Last coordinate varies fastest.
  std::size_t index(const Site& s) const {
    std::size_t k = 0;
    for (int i = 0; i < d; ++i) k = k * side + static_cast<std::size_t>(s[i]);
    return k;
  }
  Site site(std::size_t k) const {
    Site s{0, 0, 0};
    for (int i = d - 1; i >= 0; --i) {
      s[i] = static_cast<std::int64_t>(k % side);
      k /= side;
    }
    return s;
  }
  Site wrap(const Site& s) const {
    Site w{0, 0, 0};
    for (int i = 0; i < d; ++i) w[i] = wrap_index(s[i], side);
    return w;
  }
  Site shifted(const Site& s, const Site& g) const {
    Site t{0, 0, 0};
    for (int i = 0; i < d; ++i) t[i] = s[i] + g[i];
    return wrap(t);
  }
};

std::vector<double> lattice_multiplicities(const ModelSpec& m, const SiteGrid& grid,
                                           std::uint64_t seed, const Site& shift) {
  std::vector<double> n(grid.count());
  for (std::size_t k = 0; k < n.size(); ++k) {
    const Site key = grid.shifted(grid.site(k), shift);
    n[k] = m.multiplicity.sample(site_uniform(seed, kStreamMultiplicity, key, grid.d));
    if (!power_of_two(n[k]))
      throw DomainError("multiplicity " + std::to_string(n[k]) +
                        " is not a power of two; detailed balance could not be exact");
  }
  return n;
}

LatticeMap lattice_for(const ModelSpec& m, int d) {
  return m.family == ModelSpec::Family::triangular_nn ? LatticeMap::triangular()
                                                       : LatticeMap::identity(d);
}

void check_rate(double c, const char* what) {
  if (!(c >= 0) || !std::isfinite(c))
    throw DomainError(std::string(what) + " must be finite and non-negative");
}

Environment nearest_neighbour_env(const ModelSpec& m, int d, std::int64_t side,
                                  std::uint64_t seed, double kappa, const Site& shift) {
  const SiteGrid grid{d, side};
  const LatticeMap lattice = lattice_for(m, d);
  std::vector<Site> steps;
  for (int i = 0; i < d; ++i) {
    Site e{0, 0, 0};
    e[i] = 1;
    steps.push_back(e);
  }
  if (m.family == ModelSpec::Family::triangular_nn) steps.push_back({-1, 1, 0});

  const std::size_t n = grid.count();
  std::vector<double> mult = lattice_multiplicities(m, grid, seed, shift);
  std::vector<Point> pos(n);
  std::vector<Bond> bonds;
  bonds.reserve(n * steps.size());
  for (std::size_t k = 0; k < n; ++k) {
    const Site s = grid.site(k);
    pos[k] = lattice.apply(to_point(s));
    const Site key = grid.shifted(s, shift);
    for (std::size_t a = 0; a < steps.size(); ++a) {
      Site t{0, 0, 0};
      for (int i = 0; i < d; ++i) t[i] = s[i] + steps[a][i];
      const std::size_t j = grid.index(grid.wrap(t));
      const double c = m.rates.sample(site_uniform(seed, kStreamConductance + a, key, d));
      check_rate(c, "conductance");
      bonds.push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(j), c / mult[k],
                       c / mult[j], lattice.apply(to_point(steps[a]))});
    }
  }
  return {Torus(d, side, lattice), kappa, seed, m.tag(), std::move(pos), std::move(mult),
          std::move(bonds)};
}

Environment stacked_chains_env(const ModelSpec& m, int d, std::int64_t side, std::uint64_t seed,
                               double kappa, const Site& shift) {
  if (d != 2) throw DomainError("stacked_chains requires d = 2");
  check_rate(m.rung_rate, "rung rate");
  const SiteGrid grid{2, side};
  const std::size_t n = grid.count();
  std::vector<double> mult = lattice_multiplicities(m, grid, seed, shift);
  std::vector<Point> pos(n);
  std::vector<Bond> bonds;
  for (std::size_t k = 0; k < n; ++k) {
    const Site s = grid.site(k);
    pos[k] = to_point(s);
    const Site key = grid.shifted(s, shift);
    const std::size_t j = grid.index(grid.wrap({s[0] + 1, s[1], 0}));
    const double c = m.rates.sample(site_uniform(seed, kStreamConductance, key, 2));
    check_rate(c, "conductance");
    bonds.push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(j), c / mult[k],
                     c / mult[j], {1.0, 0.0, 0.0}});
    if (s[0] == 0 && s[1] + 1 < side) {
      const std::size_t u = grid.index({0, s[1] + 1, 0});
      bonds.push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(u),
                       m.rung_rate / mult[k], m.rung_rate / mult[u], {0.0, 1.0, 0.0}});
    }
  }
  return {Torus(2, side, LatticeMap::identity(2)), kappa, seed, m.tag(), std::move(pos),
          std::move(mult), std::move(bonds)};
}

// Bound on sum_{|h| >= R} |h|^(2-s) over h in Z^d, by comparison with the
// integral over the unit cubes centred at h.
double long_range_tail(int d, double kappa, double s, double radius) {
  const double c = half_cube_diameter(d, kappa);
  if (radius < 3.0 * c) return kInfNorm;
  const double area = d * unit_ball_volume(d, kappa);
  return area * std::pow(2.0, d - 1) * std::pow(radius - 2.0 * c, d + 2 - s) / (s - d - 2);
}

Environment long_range_env(const ModelSpec& m, int d, std::int64_t side, std::uint64_t seed,
                           double kappa, const Site& shift) {
  if (!(m.decay > d + 2))
    throw DomainError("long-range decay exponent s = " + std::to_string(m.decay) +
                      " violates s > d + 2 (lambda_0, lambda_2 would be infinite)");
  const double half = 0.5 * static_cast<double>(side);
  const double radius = m.range > 0 ? std::min(m.range, half) : half;
  const SiteGrid grid{d, side};
  const std::size_t n = grid.count();
  std::vector<double> mult = lattice_multiplicities(m, grid, seed, shift);
  std::vector<double> w(n);
  std::vector<Point> pos(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Site s = grid.site(k);
    pos[k] = to_point(s);
    w[k] = m.rates.sample(site_uniform(seed, kStreamWeight, grid.shifted(s, shift), d));
    check_rate(w[k], "site weight");
  }
  // Offsets with |h| < radius, each unordered pair once (first non-zero component positive).
  std::vector<std::pair<Site, double>> offsets;
  for_each_site_in_ball(d, kappa, static_cast<std::int64_t>(std::ceil(radius)), [&](const Site& h) {
    int lead = 0;
    for (int i = 0; i < d; ++i) {
      if (h[i] != 0) {
        lead = h[i] > 0 ? 1 : -1;
        break;
      }
    }
    if (lead <= 0) return;
    const double r = norm(h, d, kappa);
    if (r >= radius) return;
    for (int i = 0; i < d; ++i)
      if (2 * std::abs(h[i]) >= side) return;
    offsets.emplace_back(h, std::pow(r, -m.decay));
  });
  std::vector<Bond> bonds;
  bonds.reserve(n * offsets.size());
  for (std::size_t k = 0; k < n; ++k) {
    const Site s = grid.site(k);
    for (const auto& [h, kernel] : offsets) {
      Site t{0, 0, 0};
      for (int i = 0; i < d; ++i) t[i] = s[i] + h[i];
      const std::size_t j = grid.index(grid.wrap(t));
      const double c = w[k] * w[j] * kernel;
      if (c == 0) continue;
      bonds.push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(j), c / mult[k],
                       c / mult[j], to_point(h)});
    }
  }
  Environment env(Torus(d, side, LatticeMap::identity(d)), kappa, seed, m.tag(), std::move(pos),
                  std::move(mult), std::move(bonds));
  double wmax = m.rates.bounded() ? m.rates.bound() : kInfNorm;
  double nmin = m.multiplicity.min_value();
  env.set_lambda2_truncation_bound(wmax * wmax / nmin *
                                   long_range_tail(d, kappa, m.decay, radius));
  return env;
}

std::vector<Point> poisson_points(double intensity, int d, std::int64_t side, std::uint64_t seed) {
  const double volume = std::pow(static_cast<double>(side), d);
  CounterRng rng(seed, kStreamCount);
  std::poisson_distribution<long long> count(intensity * volume);
  const long long n = count(rng);
  std::vector<Point> pts(static_cast<std::size_t>(n), Point{0, 0, 0});
  const double l = static_cast<double>(side);
  for (long long k = 0; k < n; ++k) {
    for (int i = 0; i < d; ++i) {
      const std::int64_t word[2] = {k, i};
      pts[k][i] = l * to_unit(counter_hash(seed, kStreamCoordinate, word));
      if (pts[k][i] >= l) pts[k][i] = 0.0;
    }
  }
  return pts;
}

Environment poisson_env_once(const ModelSpec& m, int d, std::int64_t side, std::uint64_t seed,
                             std::uint64_t sample_seed, double kappa) {
  std::vector<Point> pts = poisson_points(m.intensity, d, side, sample_seed);
  const std::size_t n = pts.size();
  const Torus torus(d, side, LatticeMap::identity(d));
  const double half = 0.5 * static_cast<double>(side);
  const double range = m.range > 0 ? std::min(m.range, half) : std::min(4.0, half);
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::int64_t word = static_cast<std::int64_t>(k);
    w[k] = m.rates.sample(to_unit(counter_hash(sample_seed, kStreamMark, {&word, 1})));
    check_rate(w[k], "mark");
  }
  std::vector<Bond> bonds;
  auto try_pair = [&](std::size_t a, std::size_t b) {
    Point delta{0, 0, 0};
    for (int i = 0; i < d; ++i) delta[i] = pts[b][i] - pts[a][i];
    delta = torus.minimal_image(delta);
    const double r = norm(delta, d, kappa);
    if (r >= range) return;
    const double c = w[a] * w[b] * std::exp(-r);
    if (c > 0)
      bonds.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), c, c, delta});
  };
  const auto cells = static_cast<std::int64_t>(std::floor(static_cast<double>(side) / range));
  if (cells < 3) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) try_pair(a, b);
  } else {
    const SiteGrid grid{d, cells};
    const double cell_size = static_cast<double>(side) / static_cast<double>(cells);
    std::vector<std::vector<std::size_t>> bucket(grid.count());
    std::vector<Site> home(n);
    for (std::size_t k = 0; k < n; ++k) {
      Site c{0, 0, 0};
      for (int i = 0; i < d; ++i)
        c[i] = std::min<std::int64_t>(cells - 1,
                                      static_cast<std::int64_t>(std::floor(pts[k][i] / cell_size)));
      home[k] = c;
      bucket[grid.index(c)].push_back(k);
    }
    const SiteGrid around{d, 3};
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t o = 0; o < around.count(); ++o) {
        const Site off = around.site(o);
        Site c{0, 0, 0};
        for (int i = 0; i < d; ++i) c[i] = home[a][i] + off[i] - 1;
        for (std::size_t b : bucket[grid.index(grid.wrap(c))])
          if (b > a) try_pair(a, b);
      }
    }
  }
  std::sort(bonds.begin(), bonds.end(), [](const Bond& x, const Bond& y) {
    return x.from != y.from ? x.from < y.from : x.to < y.to;
  });
  return {torus, kappa, seed, m.tag(), std::move(pts), std::vector<double>(n, 1.0),
          std::move(bonds)};
}

Environment poisson_env(const ModelSpec& m, int d, std::int64_t side, std::uint64_t seed,
                        double kappa) {
  if (!(m.intensity > 0)) throw DomainError("poisson intensity must be positive");
  const int attempts = std::max(1, m.max_retries);
  for (int a = 0; a < attempts; ++a) {
    const std::uint64_t sample_seed = a == 0 ? seed : mix64(seed + static_cast<std::uint64_t>(a));
    Environment env = poisson_env_once(m, d, side, seed, sample_seed, kappa);
    if (env.size() > 0 && env.connected()) {
      env.set_attempts(a + 1);
      return env;
    }
  }
  std::ostringstream os;
  os << "poisson sample disconnected after " << attempts
     << " attempts (seed " << seed << "); use a new seed or a larger kernel range";
  throw DomainError(os.str());
}

}  // namespace

ModelSpec ModelSpec::nearest_neighbour(Law conductances) {
  ModelSpec m;
  m.family = Family::zd_nn;
  m.rates = conductances;
  return m;
}

ModelSpec ModelSpec::long_range(Law weights, double decay) {
  ModelSpec m;
  m.family = Family::zd_long_range;
  m.rates = weights;
  m.decay = decay;
  return m;
}

ModelSpec ModelSpec::poisson(double intensity, Law marks) {
  ModelSpec m;
  m.family = Family::poisson;
  m.intensity = intensity;
  m.rates = marks;
  return m;
}

ModelSpec ModelSpec::triangular(Law conductances) {
  ModelSpec m;
  m.family = Family::triangular_nn;
  m.rates = conductances;
  return m;
}

ModelSpec ModelSpec::stacked_chains(Law conductances, double rung_rate) {
  ModelSpec m;
  m.family = Family::stacked_chains;
  m.rates = conductances;
  m.rung_rate = rung_rate;
  return m;
}

std::string ModelSpec::tag() const {
  std::ostringstream os;
  os.precision(17);
  switch (family) {
    case Family::zd_nn: os << "zd_nn(" << rates.describe(); break;
    case Family::zd_long_range: os << "zd_long_range(" << rates.describe() << ";s=" << decay; break;
    case Family::poisson: os << "poisson(" << intensity << ";" << rates.describe(); break;
    case Family::triangular_nn: os << "triangular_nn(" << rates.describe(); break;
    case Family::stacked_chains: os << "stacked_chains(" << rates.describe() << ";rung=" << rung_rate; break;
  }
  if (range > 0) os << ";range=" << range;
  if (lattice() && !(multiplicity.deterministic() && multiplicity.mean() == 1.0))
    os << ";n=" << multiplicity.describe();
  os << ")";
  std::string t = os.str();
  t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
  return t;
}

bool ModelSpec::deterministic() const {
  return lattice() && rates.deterministic() && multiplicity.deterministic();
}

ModelSpec::Family parse_family(const std::string& name) {
  if (name == "zd_nn") return ModelSpec::Family::zd_nn;
  if (name == "zd_long_range") return ModelSpec::Family::zd_long_range;
  if (name == "poisson") return ModelSpec::Family::poisson;
  if (name == "triangular_nn") return ModelSpec::Family::triangular_nn;
  if (name == "stacked_chains") return ModelSpec::Family::stacked_chains;
  throw DomainError("unknown model family '" + name + "'");
}

Environment generate_environment(const ModelSpec& model, int d, std::int64_t side,
                                 std::uint64_t seed, double kappa, const Site& shift) {
  check_dimension(d);
  check_kappa(kappa);
  if (side < 2) throw DomainError("torus side must be at least 2");
  if (model.family == ModelSpec::Family::poisson) {
    for (int i = 0; i < d; ++i)
      if (shift[i] != 0) throw DomainError("seed shifts apply to lattice families only");
  }
  Environment env = [&] {
    switch (model.family) {
      case ModelSpec::Family::zd_nn: return nearest_neighbour_env(model, d, side, seed, kappa, shift);
      case ModelSpec::Family::triangular_nn:
        if (d != 2) throw DomainError("triangular_nn requires d = 2");
        return nearest_neighbour_env(model, d, side, seed, kappa, shift);
      case ModelSpec::Family::stacked_chains:
        return stacked_chains_env(model, d, side, seed, kappa, shift);
      case ModelSpec::Family::zd_long_range:
        return long_range_env(model, d, side, seed, kappa, shift);
      case ModelSpec::Family::poisson: return poisson_env(model, d, side, seed, kappa);
    }
    throw DomainError("unknown model family");
  }();
  env.validate();
  return env;
}

std::vector<Point> sample_poisson_points(double intensity, int d, std::int64_t side,
                                         std::uint64_t seed) {
  check_dimension(d);
  if (!(intensity > 0)) throw DomainError("poisson intensity must be positive");
  return poisson_points(intensity, d, side, seed);
}

AtomicMeasure sample_measure(const ModelSpec& model, int d, std::int64_t side, std::uint64_t seed) {
  check_dimension(d);
  std::vector<Point> pos;
  std::vector<double> mass;
  LatticeMap lattice = LatticeMap::identity(d);
  if (model.family == ModelSpec::Family::poisson) {
    pos = sample_poisson_points(model.intensity, d, side, seed);
    mass.assign(pos.size(), 1.0);
  } else {
    lattice = lattice_for(model, d);
    const SiteGrid grid{d, side};
    mass = lattice_multiplicities(model, grid, seed, {});
    pos.resize(grid.count());
    for (std::size_t k = 0; k < pos.size(); ++k) pos[k] = lattice.apply(to_point(grid.site(k)));
  }
  Torus box(d, side, lattice);
  for (auto& p : pos) p = box.centred(p);
  return AtomicMeasure(d, std::move(pos), std::move(mass), 1.0, box);
}

}  // namespace ergolab::env
