#include "ergolab/ergodic/averages.hpp"

#include <algorithm>
#include <cmath>

#include "ergolab/core/error.hpp"
#include "ergolab/core/parallel.hpp"
#include "ergolab/core/rng.hpp"
#include "ergolab/core/stats.hpp"

namespace ergolab::ergodic {

namespace {

// Visits j in the closed non-negative orthant of the ball |j| <= radius with the
// number of sign images 2^(non-zero components).
template <class Fn>
void for_each_orthant_site(int d, double kappa, std::int64_t radius, Fn&& fn) {
  for_each_site_in_ball(d, kappa, radius, [&](const Site& j) {
    int images = 1;
    for (int i = 0; i < d; ++i) {
      if (j[i] < 0) return;
      if (j[i] > 0) images *= 2;
    }
    fn(j, images);
  });
}

std::int64_t average_radius(const WeightSpec& w, double n, double bound_m) {
  if (bound_m <= 0) return 0;
  return w.envelope().radius_for(w.dim(), w.kappa(), n, kAverageTarget / bound_m);
}

double window_max(const env::ScalarField& field, const WeightSpec& w, std::int64_t radius) {
  if (!field.covers(radius)) field.materialize(radius);  // throws with a diagnostic
  double m = 0.0;
  for_each_site_in_ball(w.dim(), w.kappa(), radius,
                        [&](const Site& j) { m = std::max(m, std::abs(field(j))); });
  return m;
}

struct ResolvedBound {
  double m;
  std::int64_t radius;
  bool heuristic;
};

ResolvedBound resolve_bound(const env::ScalarField& field, const WeightSpec& w, double n,
                            std::optional<double> bound_m) {
  if (bound_m) {
    if (!(*bound_m >= 0)) throw DomainError("field bound M must be non-negative");
    return {*bound_m, average_radius(w, n, *bound_m), false};
  }
  if (auto b = field.bound()) return {*b, average_radius(w, n, *b), false};
  // Unbounded law: grow M until it dominates the realized window maximum.
  double m = 1.0;
  for (int iter = 0; iter < 16; ++iter) {
    const std::int64_t r = average_radius(w, n, m);
    const double realized = window_max(field, w, r);
    if (realized <= m) return {m, r, true};
    m = realized;
  }
  throw SolverError("realized field maximum did not stabilise while choosing the window");
}

// Raw sums sum_{|j| <= radius} psi(j/n) f_k(j), one per field, evaluated row by
// row along the last axis so that weights and hash prefixes are shared.
std::vector<double> field_sums(std::span<const env::ScalarField> fields, const WeightSpec& w,
                               double n, std::int64_t radius) {
  const int d = w.dim();
  const double inv_n = 1.0 / n;
  std::vector<CompensatedSum> sums(fields.size());
  std::vector<double> psi;
  for_each_row_in_ball(d, w.kappa(), radius, [&](const Site& prefix, std::int64_t lo, std::int64_t hi) {
    psi.resize(static_cast<std::size_t>(hi - lo + 1));
    Site j = prefix;
    bool any = false;
    for (std::int64_t v = lo; v <= hi; ++v) {
      j[d - 1] = v;
      psi[static_cast<std::size_t>(v - lo)] = w.at(j, n, inv_n);
      any = any || psi[static_cast<std::size_t>(v - lo)] != 0.0;
    }
    if (!any) return;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const env::ScalarField& f = fields[k];
      double acc = 0.0;
      if (f.kind() == env::ScalarField::Kind::iid) {
        const Law& law = *f.law();
        const Site& off = f.offset();
        std::uint64_t h = f.hash_prefix();
        for (int i = 0; i < d - 1; ++i) h = hash_step(h, prefix[i] + off[i]);
        const std::int64_t shift = lo + off[d - 1];
        if (law.kind() == Law::Kind::bernoulli) {
          // u < p on the top 53 bits, as in Law::sample.
          const double p = law.mean();
          for (std::size_t t = 0; t < psi.size(); ++t)
            acc += to_unit(hash_step(h, shift + static_cast<std::int64_t>(t))) < p ? psi[t] : 0.0;
        } else {
          for (std::size_t t = 0; t < psi.size(); ++t)
            acc += psi[t] * law.sample(to_unit(hash_step(h, shift + static_cast<std::int64_t>(t))));
        }
      } else {
        for (std::int64_t v = lo; v <= hi; ++v) {
          j[d - 1] = v;
          acc += psi[static_cast<std::size_t>(v - lo)] * f(j);
        }
      }
      sums[k].add(acc);
    }
  });
  std::vector<double> out(fields.size());
  for (std::size_t k = 0; k < fields.size(); ++k) out[k] = sums[k].value();
  return out;
}

void check_n(double n) {
  if (!(n >= 1)) throw DomainError("scale n must be at least 1");
}

}  // namespace

SumResult c_psi(const WeightSpec& w, double n, double target) {
  check_n(n);
  const int d = w.dim();
  const double inv_n = 1.0 / n;
  SumResult out;
  out.radius = w.envelope().radius_for(d, w.kappa(), n, target);
  out.truncation_bound = w.envelope().lattice_tail(d, w.kappa(), n, out.radius);
  CompensatedSum s;
  if (w.radial()) {
    for_each_orthant_site(d, w.kappa(), out.radius,
                          [&](const Site& j, int images) { s.add(images * w.at(j, n, inv_n)); });
  } else {
    for_each_site_in_ball(d, w.kappa(), out.radius, [&](const Site& j) { s.add(w.at(j, n, inv_n)); });
  }
  out.value = s.value() / std::pow(n, d);
  return out;
}

SumResult smoothness_defect(const WeightSpec& w, double n, int axis, double target) {
  check_n(n);
  const int d = w.dim();
  if (axis < 1 || axis > d) throw DomainError("axis must lie in 1..d");
  const double inv_n = 1.0 / n;
  const Envelope& e = w.envelope();
  SumResult out;
  out.radius = e.radius_for(d, w.kappa(), n, 0.5 * target) + 1;
  out.truncation_bound = e.lattice_tail(d, w.kappa(), n, out.radius) +
                         e.lattice_tail(d, w.kappa(), n, out.radius - 1);
  CompensatedSum s;
  for_each_site_in_ball(d, w.kappa(), out.radius, [&](const Site& j) {
    Site k = j;
    k[axis - 1] += 1;
    s.add(std::abs(w.at(j, n, inv_n) - w.at(k, n, inv_n)));
  });
  out.value = s.value() / std::pow(n, d);
  return out;
}

AverageResult weighted_average_at_radius(const env::ScalarField& field, const WeightSpec& w,
                                         double n, std::int64_t radius) {
  check_n(n);
  if (field.dim() != w.dim()) throw DomainError("field and weight dimensions differ");
  if (radius < 0) throw DomainError("radius must be non-negative");
  if (!field.covers(radius)) field.materialize(radius);  // throws with a diagnostic
  const double raw = field_sums({&field, 1}, w, n, radius)[0];
  AverageResult out;
  out.value = raw / std::pow(n, w.dim());
  out.radius = radius;
  if (auto b = field.bound()) {
    out.field_bound = *b;
    out.truncation_bound = *b * w.envelope().lattice_tail(w.dim(), w.kappa(), n, radius);
  } else {
    out.field_bound = window_max(field, w, radius);
    out.heuristic_bound = true;
    out.truncation_bound = out.field_bound * w.envelope().lattice_tail(w.dim(), w.kappa(), n, radius);
  }
  return out;
}

AverageResult weighted_average(const env::ScalarField& field, const WeightSpec& w, double n,
                               std::optional<double> bound_m) {
  check_n(n);
  if (field.dim() != w.dim()) throw DomainError("field and weight dimensions differ");
  const ResolvedBound rb = resolve_bound(field, w, n, bound_m);
  if (!field.covers(rb.radius)) field.materialize(rb.radius);
  const double raw = field_sums({&field, 1}, w, n, rb.radius)[0];
  AverageResult out;
  out.value = raw / std::pow(n, w.dim());
  out.radius = rb.radius;
  out.field_bound = rb.m;
  out.heuristic_bound = rb.heuristic;
  out.truncation_bound = rb.m * w.envelope().lattice_tail(w.dim(), w.kappa(), n, rb.radius);
  return out;
}

std::vector<AverageResult> weighted_average_batch(std::span<const env::ScalarField> fields,
                                                  const WeightSpec& w, double n, double bound_m) {
  check_n(n);
  if (!(bound_m >= 0)) throw DomainError("field bound M must be non-negative");
  const std::int64_t radius = average_radius(w, n, bound_m);
  for (const auto& f : fields) {
    if (f.dim() != w.dim()) throw DomainError("field and weight dimensions differ");
    if (auto b = f.bound(); !b || *b > bound_m)
      throw DomainError("batch average needs fields bounded by M");
    if (!f.covers(radius)) f.materialize(radius);
  }
  const std::vector<double> sums = field_sums(fields, w, n, radius);
  const double scale_n = std::pow(n, w.dim());
  const double tail = bound_m * w.envelope().lattice_tail(w.dim(), w.kappa(), n, radius);
  std::vector<AverageResult> out(fields.size());
  for (std::size_t k = 0; k < fields.size(); ++k)
    out[k] = {sums[k] / scale_n, tail, radius, bound_m, false};
  return out;
}

double c_limit(const WeightSpec& w, double n) {
  if (auto i = w.integral()) return *i;
  return c_psi(w, n).value;
}

ConditionalReport conditional_limit_check(const Law& first, const Law& second, const WeightSpec& w,
                                          double n, std::size_t n_seeds, std::uint64_t master_seed,
                                          double tol) {
  if (!first.bounded() || !second.bounded())
    throw DomainError("conditional limit check needs bounded component laws");
  ConditionalReport rep;
  rep.c = c_limit(w, n);
  std::vector<env::ScalarField> fields;
  for (std::size_t s = 0; s < n_seeds; ++s)
    fields.push_back(env::ScalarField::mixture(w.dim(), first, second, replica_seed(master_seed, s)));
  const double m = std::max(first.bound(), second.bound());
  // Chunked so each worker shares weight evaluations across its seeds.
  const std::size_t chunk = 10;
  const std::size_t n_chunks = (n_seeds + chunk - 1) / chunk;
  std::vector<AverageResult> values(n_seeds);
  parallel_for(n_chunks, default_threads(), [&](std::size_t c) {
    const std::size_t lo = c * chunk, hi = std::min(n_seeds, lo + chunk);
    auto part = weighted_average_batch(std::span(fields).subspan(lo, hi - lo), w, n, m);
    std::copy(part.begin(), part.end(), values.begin() + static_cast<std::ptrdiff_t>(lo));
  });
  std::size_t within = 0;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    ConditionalRow row;
    row.seed = replica_seed(master_seed, s);
    row.label = *fields[s].component_label();
    row.value = values[s].value;
    row.truncation_bound = values[s].truncation_bound;
    row.own_target = rep.c * (row.label == 0 ? first.mean() : second.mean());
    row.other_target = rep.c * (row.label == 0 ? second.mean() : first.mean());
    row.within = std::abs(row.value - row.own_target) <= tol * std::abs(row.own_target);
    row.wrong_nearer = std::abs(row.value - row.other_target) < std::abs(row.value - row.own_target);
    within += row.within;
    rep.wrong_nearer += row.wrong_nearer;
    rep.rows.push_back(row);
  }
  rep.fraction_within = n_seeds ? static_cast<double>(within) / static_cast<double>(n_seeds) : 0.0;
  return rep;
}

MaximalResult maximal_function(const env::ScalarField& field, const WeightSpec& w, int levels) {
  if (levels < 1) throw DomainError("maximal function needs N >= 1");
  if (field.lower_bound() < 0)
    throw DomainError("maximal function is defined for non-negative fields");
  const WeightSpec wa = w.abs();
  const ResolvedBound rb = resolve_bound(field, wa, levels, std::nullopt);
  // Window radii grow with n, so one materialization serves every level.
  std::size_t cells = 1;
  for (int i = 0; i < w.dim(); ++i) cells *= static_cast<std::size_t>(2 * rb.radius + 1);
  const env::ScalarField f =
      (field.kind() == env::ScalarField::Kind::iid && cells <= (std::size_t{1} << 22))
          ? field.materialize(rb.radius)
          : field;
  MaximalResult out;
  out.value = -1.0;
  out.field_bound = rb.m;
  out.heuristic_bound = rb.heuristic;
  for (int n = 1; n <= levels; ++n) {
    const std::int64_t r = average_radius(wa, n, rb.m);
    const double v = weighted_average_at_radius(f, wa, n, r).value;
    if (v > out.value) {
      out.value = v;
      out.argmax = n;
    }
  }
  return out;
}

MaximalTail maximal_tail_estimate(const Law& law, const WeightSpec& w, int levels,
                                  std::span<const double> alphas, std::size_t n_seeds,
                                  std::uint64_t master_seed) {
  if (n_seeds < 1) throw DomainError("maximal tail estimate needs seeds");
  for (double a : alphas)
    if (!(a > 0)) throw DomainError("alpha grid must be positive");
  MaximalTail out;
  out.l1_norm = std::abs(law.mean());
  if (law.min_value() < 0) throw DomainError("maximal tail estimate needs a non-negative law");
  out.sups.resize(n_seeds);
  parallel_for(n_seeds, default_threads(), [&](std::size_t s) {
    const auto f = env::ScalarField::iid(w.dim(), law, replica_seed(master_seed, s));
    out.sups[s] = maximal_function(f, w, levels).value;
  });
  for (double a : alphas) {
    MaximalRow row;
    row.alpha = a;
    std::size_t hits = 0;
    for (double v : out.sups) hits += v > a;
    row.p_hat = static_cast<double>(hits) / static_cast<double>(n_seeds);
    row.alpha_p = a * row.p_hat;
    row.normalized = out.l1_norm > 0 ? row.alpha_p / out.l1_norm : 0.0;
    out.c_hat = std::max(out.c_hat, row.normalized);
    out.rows.push_back(row);
  }
  return out;
}

ConditionCheck check_conditions(const WeightSpec& w, std::span<const double> n_grid,
                                double rel_tol) {
  ConditionCheck out;
  double slack = 0.0;
  for (double n : n_grid) {
    out.n.push_back(n);
    const SumResult c = c_psi(w, n);
    out.c.push_back(c.value);
    slack = std::max(slack, 2.0 * c.truncation_bound);
    double dmax = 0.0;
    for (int i = 1; i <= w.dim(); ++i) dmax = std::max(dmax, smoothness_defect(w, n, i).value);
    out.defect.push_back(dmax);
  }
  const std::size_t k = out.c.size();
  if (k >= 2) {
    const double last = std::abs(out.c[k - 1] - out.c[k - 2]) / std::max(std::abs(out.c[k - 1]), 1e-300);
    bool shrinking = true;
    for (std::size_t i = 2; i < k; ++i)
      shrinking = shrinking &&
                  std::abs(out.c[i] - out.c[i - 1]) <=
                      std::abs(out.c[i - 1] - out.c[i - 2]) + 2.0 * slack;
    out.cauchy = last <= rel_tol && shrinking;
    out.defect_vanishing = out.defect[k - 1] < out.defect[0] || out.defect[k - 1] == 0.0;
  }
  return out;
}

}  // namespace ergolab::ergodic
