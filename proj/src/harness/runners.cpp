#include "runners.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "ergolab/core/error.hpp"
#include "ergolab/core/parallel.hpp"
#include "ergolab/core/rng.hpp"
#include "ergolab/core/stats.hpp"
#include "ergolab/env/io.hpp"
#include "ergolab/env/measure.hpp"
#include "ergolab/env/estimators.hpp"
#include "ergolab/ergodic/averages.hpp"
#include "ergolab/ergodic/covering.hpp"
#include "ergolab/harness/test_functions.hpp"
#include "ergolab/homog/effective.hpp"
#include "ergolab/refpde/convergence.hpp"
#include "ergolab/sep/exclusion.hpp"
#include "ergolab/walk/generator.hpp"
#include "ergolab/walk/paths.hpp"
#include "ergolab/walk/solvers.hpp"

namespace ergolab::harness {

namespace {

std::string num(double x) { return format_double(x); }

// Runs `fn`, turning library domain errors into configuration errors on `key`.
template <class F>
auto as_config(const std::string& key, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(key, e.what());
  }
}

Law law_of(const Config& cfg, const std::string& key, const std::string& fallback) {
  const std::string text = cfg.text(key, fallback);
  return as_config(key, [&] { return Law::parse(text); });
}

std::size_t positive_count(const Config& cfg, const std::string& key, std::int64_t fallback,
                           std::int64_t min = 1) {
  const std::int64_t v = cfg.integer(key, fallback);
  if (v < min) throw ConfigError(key, "must be at least " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

int dimension(const Config& cfg, int fallback = 2) {
  const auto d = cfg.integer("d", fallback);
  if (d < 1 || d > kMaxDim) throw ConfigError("d", "dimension must be 1, 2 or 3");
  return static_cast<int>(d);
}

std::int64_t side_of(const Config& cfg, std::int64_t fallback) {
  const auto L = cfg.integer("L", fallback);
  if (L < 2) throw ConfigError("L", "torus side must be at least 2");
  return L;
}

std::vector<double> eps_grid(const Config& cfg) {
  auto eps = cfg.numbers("eps");
  if (eps.empty()) throw ConfigError("eps", "the epsilon grid is empty");
  for (double e : eps)
    if (!(e > 0) || !(e <= 1)) throw ConfigError("eps", "grid values must lie in (0, 1]");
  return eps;
}

double positive(const Config& cfg, const std::string& key, double fallback) {
  const double v = cfg.number(key, fallback);
  if (!(v > 0)) throw ConfigError(key, "must be positive");
  return v;
}

ergodic::WeightSpec weight_spec(const Config& cfg, int d) {
  const std::string family = cfg.text("weight.family", "power");
  const double c = cfg.number("weight.c", 1.0);
  if (family == "power") {
    const double beta = cfg.number("weight.beta");
    // The ergodic theorem and the maximal inequality need a d-good envelope.
    if (!(beta > 2 * d + 2))
      throw ConfigError("weight.beta", "weighted ergodic averages require beta > 2d+2 = " +
                                           std::to_string(2 * d + 2) + ", got " + num(beta));
    return ergodic::WeightSpec::power(d, beta, c);
  }
  if (family == "gaussian") return ergodic::WeightSpec::gaussian(d, positive(cfg, "weight.a", 1.0), c);
  if (family == "unit_cube") return ergodic::WeightSpec::unit_cube(d);
  throw ConfigError("weight.family", "unknown weight family '" + family + "'");
}

// Decay class required of test functions: beta > 2d+2, or beta > d under the
// moment condition E[mu(box)^alpha] < inf for some alpha > 1.
refpde::TestFunction class_checked_function(const Config& cfg, int d) {
  const bool moment = cfg.flag("moment_condition", false);
  const std::string spec = cfg.text("function");
  refpde::TestFunction f = test_function(spec, d);
  const double r = moment ? d : 2.0 * d + 2;
  if (!f.envelope.decays_faster_than(r)) {
    std::ostringstream os;
    os << "'" << spec << "' has envelope " << f.envelope.describe() << "; this experiment requires beta > "
       << (moment ? "d = " : "2d+2 = ") << r;
    if (!moment) os << " (or beta > d with moment_condition = true)";
    throw ConfigError("function", os.str());
  }
  return f;
}

env::Environment environment_of(const Context& ctx, int& d) {
  const Config& cfg = ctx.cfg;
  if (cfg.has("env")) {
    const std::string path = cfg.text("env");
    auto e = as_config("env", [&] { return env::load_environment(path); });
    d = e.dim();
    return e;
  }
  d = dimension(cfg);
  const auto model = model_spec(cfg);
  const auto L = side_of(cfg, 16);
  const double kappa = cfg.number("kappa", 2.0);
  return as_config("model", [&] { return env::generate_environment(model, d, L, ctx.master(), kappa); });
}

std::vector<std::string> position_header(int d, std::vector<std::string> head, const std::vector<std::string>& tail) {
  for (int i = 1; i <= d; ++i) head.push_back("x" + std::to_string(i));
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

std::vector<std::string> matrix_header(int d) {
  std::vector<std::string> h{"seed", "L"};
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j) h.push_back("D" + std::to_string(i) + std::to_string(j));
  h.push_back("residual_max");
  h.push_back("upper_bound_gap");
  return h;
}

void add_matrix_row(Table& t, std::uint64_t seed, std::int64_t L, const homog::EffectiveMatrix& em) {
  std::vector<Cell> row{seed, L};
  const auto d = em.D.rows();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) row.emplace_back(em.D(i, j));
  row.emplace_back(em.residual_max());
  row.emplace_back(em.upper_bound_gap());
  t.add(row);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " > " : "") + num(v[i]);
  return s;
}

}  // namespace

void Context::seal() const {
  const auto extra = cfg.unused();
  if (extra.empty()) return;
  std::string list;
  for (const auto& k : extra) list += (list.empty() ? "" : ", ") + k;
  throw ConfigError(extra.front(), "unknown key(s) for this experiment: " + list);
}

env::ModelSpec model_spec(const Config& cfg) {
  env::ModelSpec m;
  m.family = as_config("model.family", [&] { return env::parse_family(cfg.text("model.family", "zd_nn")); });
  m.rates = law_of(cfg, "model.rates", "constant(1)");
  m.multiplicity = law_of(cfg, "model.multiplicity", "constant(1)");
  m.decay = cfg.number("model.decay", 0.0);
  m.intensity = cfg.number("model.intensity", 1.0);
  m.range = cfg.number("model.range", 0.0);
  m.rung_rate = cfg.number("model.rung_rate", 1.0);
  m.max_retries = static_cast<int>(cfg.integer("model.max_retries", 32));
  if (m.family == env::ModelSpec::Family::zd_long_range && !cfg.has("model.decay"))
    throw ConfigError("model.decay", "long-range models need a decay exponent");
  return m;
}

double model_intensity(const env::ModelSpec& model, int d) {
  if (model.family == env::ModelSpec::Family::poisson) return model.intensity;
  const double cell = model.family == env::ModelSpec::Family::triangular_nn ? std::sqrt(3.0) / 2 : 1.0;
  (void)d;
  return model.multiplicity.mean() / cell;
}

// ---------------------------------------------------------------- gen-env

void run_gen_env(const Context& ctx, ExperimentReport& report) {
  int d = 0;
  const auto e = environment_of(ctx, d);
  ctx.seal();
  e.validate();
  std::ostringstream file;
  env::write_environment(file, e);
  report.files.emplace_back("environment.txt", file.str());
  Table summary{"environment",
                {"seed", "d", "L", "model", "atoms", "bonds", "total_mass", "connected",
                 "detailed_balance_exact", "lambda2_truncation_bound", "attempts"}};
  summary.add({e.seed(), d, e.side(), e.model_tag(), e.size(), e.bonds().size(), e.total_mass(),
               e.connected(), e.detailed_balance_exact(), e.lambda2_truncation_bound(), e.attempts()});
  report.tables.push_back(std::move(summary));
  Table atoms{"atoms", position_header(d, {"atom_id"}, {"n"})};
  for (std::size_t i = 0; i < e.size(); ++i) {
    std::vector<Cell> row{i};
    for (int a = 0; a < d; ++a) row.emplace_back(e.position(i)[a]);
    row.emplace_back(e.multiplicity(i));
    atoms.add(row);
  }
  report.tables.push_back(std::move(atoms));
  report.check("detailed_balance", "n_x r_xy == n_y r_yx bit-exactly on every bond",
               e.detailed_balance_exact(), std::to_string(e.bonds().size()) + " bonds");
  report.check("connected", "environment graph is connected", e.connected(),
               std::to_string(e.size()) + " atoms");
}

// ---------------------------------------------------------------- ergodic-avg

void run_ergodic_avg(const Context& ctx, ExperimentReport& report) {
  const Config& cfg = ctx.cfg;
  const int d = dimension(cfg);
  const auto w = weight_spec(cfg, d);
  auto ns = cfg.numbers("n");
  if (ns.empty()) throw ConfigError("n", "the n grid is empty");
  for (double n : ns)
    if (!(n >= 1)) throw ConfigError("n", "scales must be at least 1");
  const std::size_t seeds = positive_count(cfg, "seeds", 50);
  const std::uint64_t master = ctx.master();
  const bool mixture = cfg.has("field.mixture");

  if (mixture) {
    const auto parts = cfg.texts("field.mixture");
    if (parts.size() != 2) throw ConfigError("field.mixture", "needs exactly two laws");
    const Law first = as_config("field.mixture", [&] { return Law::parse(parts[0]); });
    const Law second = as_config("field.mixture", [&] { return Law::parse(parts[1]); });
    const double tol = positive(cfg, "tol", 0.1);
    const double min_fraction = cfg.number("min_fraction", 0.9);
    ctx.seal();
    Table t{"conditional", {"seed", "n", "label", "value", "truncation_bound", "own_target",
                            "other_target", "within", "wrong_nearer"}};
    ergodic::ConditionalReport last;
    for (double n : ns) {
      last = ergodic::conditional_limit_check(first, second, w, n, seeds, master, tol);
      for (const auto& r : last.rows)
        t.add({r.seed, n, r.label, r.value, r.truncation_bound, r.own_target, r.other_target, r.within,
               r.wrong_nearer});
    }
    report.tables.push_back(std::move(t));
    report.check("conditional_within", "fraction of seeds within tol of their own component target",
                 last.fraction_within >= min_fraction,
                 "fraction " + num(last.fraction_within) + " >= " + num(min_fraction) + " at n = " + num(ns.back()));
    report.check("conditional_wrong", "no seed strictly closer to the wrong component target",
                 last.wrong_nearer == 0, std::to_string(last.wrong_nearer) + " seeds");
    return;
  }

  const Law law = law_of(cfg, "field.law", "bernoulli(0.5)");
  const double tol = positive(cfg, "tol", 0.05);
  ctx.seal();
  Table t{"averages", {"seed", "n", "value", "truncation_bound", "target", "abs_error"}};
  Table s{"summary", {"n", "c_psi", "target", "median_rel_error", "seed_count"}};
  std::vector<double> medians;
  std::vector<env::ScalarField> fields;
  std::vector<std::uint64_t> seed_list;
  for (std::size_t k = 0; k < seeds; ++k) {
    seed_list.push_back(replica_seed(master, k));
    fields.push_back(env::ScalarField::iid(d, law, seed_list.back()));
  }
  for (double n : ns) {
    const double c = ergodic::c_limit(w, n);
    const double target = law.mean() * c;
    std::vector<ergodic::AverageResult> res;
    if (law.bounded()) {
      res = ergodic::weighted_average_batch(fields, w, n, std::max(law.bound(), 1e-300));
    } else {
      res.resize(seeds);
      parallel_for(seeds, ctx.threads, [&](std::size_t k) { res[k] = ergodic::weighted_average(fields[k], w, n); });
    }
    std::vector<double> rel;
    for (std::size_t k = 0; k < seeds; ++k) {
      const double err = std::abs(res[k].value - target);
      t.add({seed_list[k], n, res[k].value, res[k].truncation_bound, target, err});
      rel.push_back(err / std::abs(c));
    }
    medians.push_back(median(rel));
    s.add({n, c, target, medians.back(), seeds});
  }
  report.tables.push_back(std::move(t));
  report.tables.push_back(std::move(s));
  report.check("median_error", "median |W_n - c(psi) E f| / c(psi) at the largest n within tol",
               medians.back() <= tol, num(medians.back()) + " <= " + num(tol));
  if (ns.size() > 1)
    report.check("median_trend", "median relative error at the largest n below its value at the smallest n",
                 medians.back() < medians.front(), num(medians.back()) + " < " + num(medians.front()));
}

// ---------------------------------------------------------------- maximal

void run_maximal(const Context& ctx, ExperimentReport& report) {
  const Config& cfg = ctx.cfg;
  const int d = dimension(cfg, 1);
  const auto w = weight_spec(cfg, d);
  const Law law = law_of(cfg, "field.law", "exp(1)");
  const auto levels = static_cast<int>(positive_count(cfg, "levels", 64));
  const auto alphas = cfg.numbers("alphas", {1, 2, 4, 8, 16});
  if (alphas.empty()) throw ConfigError("alphas", "the alpha grid is empty");
  const std::size_t seeds = positive_count(cfg, "seeds", 500);
  const double ratio = positive(cfg, "ratio", 4.0);
  if (law.min_value() < 0) throw ConfigError("field.law", "the maximal inequality test needs a non-negative law");
  ctx.seal();
  const auto tail = ergodic::maximal_tail_estimate(law, w, levels, alphas, seeds, ctx.master());
  Table t{"tail", {"alpha", "p_hat", "alpha_p", "normalized", "seed_count"}};
  double worst = 0;
  for (const auto& r : tail.rows) {
    t.add({r.alpha, r.p_hat, r.alpha_p, r.normalized, seeds});
    worst = std::max(worst, r.alpha_p);
  }
  Table sups{"sups", {"seed", "sup"}};
  for (std::size_t k = 0; k < tail.sups.size(); ++k) sups.add({replica_seed(ctx.master(), k), tail.sups[k]});
  report.tables.push_back(std::move(t));
  report.tables.push_back(std::move(sups));
  const double first = tail.rows.front().alpha_p;
  report.check("maximal_tail", "max_alpha alpha P(sup > alpha) within ratio of its first-alpha value",
               worst <= ratio * first, num(worst) + " <= " + num(ratio) + " * " + num(first));
}

// ---------------------------------------------------------------- covering-test

void run_covering(const Context& ctx, ExperimentReport& report) {
  const Config& cfg = ctx.cfg;
  const int d = dimension(cfg, 2);
  const std::size_t instances = positive_count(cfg, "instances", 1000);
  const std::size_t max_points = positive_count(cfg, "max_points", 50);
  const auto max_levels = static_cast<int>(positive_count(cfg, "max_levels", 4));
  const auto max_m = cfg.integer("max_m", 2);
  const auto box = cfg.integer("box", 15);
  const double kappa = cfg.number("kappa", 2.0);
  if (max_m < 0) throw ConfigError("max_m", "must be non-negative");
  if (box < 1) throw ConfigError("box", "must be positive");
  std::size_t capacity = 1;
  for (int i = 0; i < d; ++i) capacity *= static_cast<std::size_t>(2 * box + 1);
  if (max_points > capacity) throw ConfigError("max_points", "more points than sites in the box");
  ctx.seal();
  struct Row {
    std::uint64_t seed;
    std::size_t points;
    int levels, m;
    ergodic::CoveringResult res;
  };
  std::vector<Row> rows(instances);
  parallel_for(instances, ctx.threads, [&](std::size_t i) {
    Row& row = rows[i];
    row.seed = replica_seed(ctx.master(), i);
    CounterRng rng(row.seed, 0);
    row.levels = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_levels));
    row.m = static_cast<int>(rng() % static_cast<std::uint64_t>(max_m + 1));
    const auto sets = ergodic::NestedSets::shells(d, row.levels, row.m, kappa);
    const std::size_t size = 1 + rng() % max_points;
    std::set<Site> pts;
    const auto width = static_cast<std::uint64_t>(2 * box + 1);
    while (pts.size() < size) {
      Site s{0, 0, 0};
      for (int a = 0; a < d; ++a) s[a] = static_cast<std::int64_t>(rng() % width) - box;
      pts.insert(s);
    }
    std::vector<Site> b(pts.begin(), pts.end());
    std::vector<int> k;
    for (std::size_t p = 0; p < b.size(); ++p) k.push_back(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(row.levels)));
    row.points = b.size();
    row.res = ergodic::covering_select(b, k, sets);
  });
  Table t{"covering", {"instance", "seed", "points", "levels", "m", "selected", "difference_total",
                       "disjoint", "covers", "cardinality"}};
  std::size_t disjoint = 0, covers = 0, cardinality = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const auto& r = rows[i];
    t.add({i, r.seed, r.points, r.levels, r.m, r.res.selected.size(), r.res.difference_total,
           r.res.disjoint, r.res.covers, r.res.cardinality});
    disjoint += r.res.disjoint;
    covers += r.res.covers;
    cardinality += r.res.cardinality;
  }
  report.tables.push_back(std::move(t));
  const std::string of = " of " + std::to_string(instances);
  report.check("disjoint", "selected translates z + I_k(z) pairwise disjoint", disjoint == instances,
               std::to_string(disjoint) + of);
  report.check("covers", "B contained in the union of z + I_k(z) - I_k(z)", covers == instances,
               std::to_string(covers) + of);
  report.check("cardinality", "|B| <= sum |I_k(z) - I_k(z)|", cardinality == instances,
               std::to_string(cardinality) + of);
}

// ---------------------------------------------------------------- measure-limit

void run_measure_limit(const Context& ctx, ExperimentReport& report) {
  const Config& cfg = ctx.cfg;
  const int d = dimension(cfg);
  const auto model = model_spec(cfg);
  const auto L = side_of(cfg, 256);
  const auto eps = eps_grid(cfg);
  const auto f = class_checked_function(cfg, d);
  if (!f.integral) throw ConfigError("function", "no closed-form integral for '" + f.name + "'");
  const std::size_t seeds = positive_count(cfg, "seeds", 100, 2);
  const auto ells = cfg.numbers("ell", {1, 4});
  if (ells.empty()) throw ConfigError("ell", "the ell grid is empty");
  const double z_max = positive(cfg, "z_max", 3.0);
  const double tail_ratio = positive(cfg, "tail_ratio", 0.2);
  ctx.seal();
  for (double e : eps) {
    const double inner = 0.5 * e * static_cast<double>(L);
    if (f.envelope(inner) > refpde::kMaxEnvelopeTail)
      throw ConfigError("L", "test function envelope " + num(f.envelope(inner)) + " at half-box radius " +
                                 num(inner) + " for eps = " + num(e) + "; use a larger L");
  }
  const double m = model_intensity(model, d);
  const double target = m * *f.integral;
  // d-good envelope for the tail functional.
  const Envelope theta = Envelope::power(1.0, 2.0 * d + 3);
  const std::size_t ne = eps.size(), nl = ells.size();
  std::vector<double> values(ne * seeds), tails(ne * nl * seeds);
  parallel_for(seeds, ctx.threads, [&](std::size_t k) {
    const auto mu = env::sample_measure(model, d, L, replica_seed(ctx.master(), k));
    for (std::size_t i = 0; i < ne; ++i) {
      const auto scaled = env::rescale(mu, eps[i]);
      values[i * seeds + k] = env::integrate(scaled, f.f);
      for (std::size_t j = 0; j < nl; ++j) tails[(i * nl + j) * seeds + k] = env::tail_mass(scaled, theta, ells[j]);
    }
  });
  Table samples{"samples", {"seed", "eps", "value", "target", "abs_error"}};
  Table summary{"summary", {"eps", "mean", "stderr", "target", "z_score", "seed_count"}};
  Table tail{"tails", {"eps", "ell", "mean", "stderr", "seed_count"}};
  double z_last = 0;
  std::vector<double> tail_last(nl);
  for (std::size_t i = 0; i < ne; ++i) {
    for (std::size_t k = 0; k < seeds; ++k) {
      const double v = values[i * seeds + k];
      samples.add({replica_seed(ctx.master(), k), eps[i], v, target, std::abs(v - target)});
    }
    const auto est = mean_estimate(std::span<const double>(values.data() + i * seeds, seeds));
    const double z = est.std_error > 0 ? std::abs(est.value - target) / est.std_error
                                       : (est.value == target ? 0.0 : INFINITY);
    summary.add({eps[i], est.value, est.std_error, target, z, seeds});
    z_last = z;
    for (std::size_t j = 0; j < nl; ++j) {
      const auto te = mean_estimate(std::span<const double>(tails.data() + (i * nl + j) * seeds, seeds));
      tail.add({eps[i], ells[j], te.value, te.std_error, seeds});
      tail_last[j] = te.value;
    }
  }
  report.tables.push_back(std::move(samples));
  report.tables.push_back(std::move(summary));
  report.tables.push_back(std::move(tail));
  report.notes.push_back("target m * int phi with m = " + num(m) + "; tail envelope (1 + r)^-" + num(2.0 * d + 3));
  report.check("measure_limit", "|mean int phi dmu^eps - m int phi| within z_max standard errors at the last eps",
               z_last <= z_max, "z = " + num(z_last) + " <= " + num(z_max));
  if (nl > 1)
    report.check("tail_trend", "tail functional at the last ell within tail_ratio of its first-ell value",
                 tail_last.back() <= tail_ratio * tail_last.front(),
                 num(tail_last.back()) + " <= " + num(tail_ratio) + " * " + num(tail_last.front()));
}

// ---------------------------------------------------------------- resolvent / semigroup

void run_operator(const Context& ctx, ExperimentReport& report, bool semigroup) {
  const Config& cfg = ctx.cfg;
  int d = 0;
  const auto e = environment_of(ctx, d);
  const double eps = cfg.number("eps", 1.0);
  if (!(eps > 0)) throw ConfigError("eps", "must be positive");
  const std::string pkey = semigroup ? "t" : "lambda";
  const double param = cfg.number(pkey);
  if (semigroup ? !(param >= 0) : !(param > 0))
    throw ConfigError(pkey, semigroup ? "time must be non-negative" : "lambda must be positive");
  const auto f = test_function(cfg.text("function", "gaussian(1)"), d);
  const double tol = positive(cfg, "tol", semigroup ? 1e-12 : 1e-10);
  ctx.seal();
  const auto gen = walk::build_generator(e, eps);
  std::vector<double> fv(gen.size());
  for (std::size_t i = 0; i < gen.size(); ++i) fv[i] = f.f(gen.positions()[i]);
  std::vector<double> u;
  Table solve{"solve", {"seed", "eps", pkey, "tol", semigroup ? "terms" : "iterations", "solver_bound"}};
  if (semigroup) {
    auto r = walk::semigroup(gen, param, fv, tol);
    solve.add({e.seed(), eps, param, tol, r.terms, r.truncation});
    u = std::move(r.u);
  } else {
    auto r = walk::resolvent(gen, param, fv, tol);
    solve.add({e.seed(), eps, param, tol, r.iterations, r.relative_residual});
    u = std::move(r.u);
  }
  Table values{"values", position_header(d, {"atom_id"}, {"value"})};
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::vector<Cell> row{i};
    for (int a = 0; a < d; ++a) row.emplace_back(gen.positions()[i][a]);
    row.emplace_back(u[i]);
    values.add(row);
  }
  report.tables.push_back(std::move(values));
  report.tables.push_back(std::move(solve));
}

// ---------------------------------------------------------------- paths

void run_paths(const Context& ctx, ExperimentReport& report) {
  const Config& cfg = ctx.cfg;
  const bool from_file = cfg.has("env");
  int d = 0;
  const auto first = environment_of(ctx, d);
  const double eps = positive(cfg, "eps", 1.0);
  const double horizon = cfg.number("t");
  if (!(horizon > 0)) throw ConfigError("t", "horizon must be positive");
  const std::size_t n = positive_count(cfg, "n", 10000);
  const std::string start = cfg.text("start", "stationary");
  std::optional<std::uint32_t> start_atom;
  if (start != "stationary") {
    const auto a = cfg.integer("start");
    if (a < 0 || static_cast<std::size_t>(a) >= first.size()) throw ConfigError("start", "atom index out of range");
    start_atom = static_cast<std::uint32_t>(a);
  }
  const bool msd = cfg.flag("msd", false);
  const double tol = positive(cfg, "tol", 0.1);
  const std::size_t env_seeds = msd && !from_file ? positive_count(cfg, "env_seeds", 1) : 1;
  ctx.seal();
  const std::uint64_t master = ctx.master();

  walk::PathSampler sampler(first, eps);
  std::vector<std::uint32_t> ends(n);
  parallel_for(n, ctx.threads, [&](std::size_t p) {
    CounterRng rng(replica_seed(master, p), 7);
    const std::uint32_t s = start_atom ? *start_atom : sampler.stationary_start(rng);
    ends[p] = sampler.endpoint(s, horizon, rng);
  });
  std::vector<std::size_t> counts(first.size(), 0);
  for (auto a : ends) ++counts[a];
  const auto gen_positions = walk::build_generator(first, eps).positions();
  Table t{"endpoints", position_header(d, {"atom_id"}, {"count", "frequency"})};
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (!counts[i]) continue;
    std::vector<Cell> row{i};
    for (int a = 0; a < d; ++a) row.emplace_back(gen_positions[i][a]);
    row.emplace_back(counts[i]);
    row.emplace_back(static_cast<double>(counts[i]) / static_cast<double>(n));
    t.add(row);
  }
  report.tables.push_back(std::move(t));
  report.notes.push_back("environment seed " + std::to_string(first.seed()) + ", " + std::to_string(n) + " paths");
  if (!msd) return;

  // MSD slope against 2 tr(D) on matched environments.
  Table m{"msd", {"seed", "L", "paths", "horizon", "msd_slope", "msd_stderr", "two_trace_D", "rel_gap"}};
  double worst = 0;
  for (std::size_t k = 0; k < env_seeds; ++k) {
    const auto e = k == 0 ? first
                          : env::generate_environment(model_spec(cfg), d, first.side(), replica_seed(master, k),
                                                      first.kappa());
    const auto em = homog::effective_matrix(e, 1e-10, ctx.threads);
    const double two_tr = 2 * em.D.trace();
    const auto est = walk::msd_estimate(e, eps, horizon, n, replica_seed(master ^ 0x6d7364ULL, k));
    const double gap = std::abs(est.slope.value - two_tr) / two_tr;
    worst = std::max(worst, gap);
    m.add({e.seed(), e.side(), n, horizon, est.slope.value, est.slope.std_error, two_tr, gap});
  }
  report.tables.push_back(std::move(m));
  report.check("msd_cross_check", "|MSD/t - 2 tr(D)| / 2 tr(D) within tol", worst <= tol,
               num(worst) + " <= " + num(tol));
}

// ---------------------------------------------------------------- effective-matrix

void run_effective_matrix(const Context& ctx, ExperimentReport& report) {
  const Config& cfg = ctx.cfg;
  const int d = dimension(cfg);
  const auto model = model_spec(cfg);
  const auto L = side_of(cfg, 64);
  const std::size_t seeds = positive_count(cfg, "seeds", 1);
  const double tol = positive(cfg, "tol", 1e-12);
  const double kappa = cfg.number("kappa", 2.0);
  const bool check_scale = cfg.has("assert.identity_scale");
  const double scale = check_scale ? cfg.number("assert.identity_scale") : 0.0;
  const double scale_tol = positive(cfg, "assert.identity_tol", 1e-10);
  const bool harmonic = cfg.flag("assert.harmonic_mean", false);
  const double harmonic_tol = positive(cfg, "assert.harmonic_tol", 1e-8);
  const bool check_mean = cfg.has("assert.mean_target");
  const double mean_target = check_mean ? cfg.number("assert.mean_target") : 0.0;
  const double sigmas = positive(cfg, "assert.mean_sigmas", 3.0);
  const bool check_null = cfg.has("assert.null_axis");
  const std::int64_t null_axis = check_null ? cfg.integer("assert.null_axis") : 0;
  const double null_tol = positive(cfg, "assert.null_tol", 1e-8);
  if (harmonic && d != 1) throw ConfigError("assert.harmonic_mean", "the harmonic-mean oracle is one-dimensional");
  if (check_null && (null_axis < 1 || null_axis > d)) throw ConfigError("assert.null_axis", "axis out of range");
  if (check_mean && seeds < 2) throw ConfigError("seeds", "a mean assertion needs at least two seeds");
  ctx.seal();

  struct Sample {
    std::uint64_t seed;
    homog::EffectiveMatrix em;
    double harmonic = 0;
  };
  std::vector<Sample> samples(seeds);
  const unsigned inner = seeds >= ctx.threads ? 1 : ctx.threads;
  parallel_for(seeds, seeds >= ctx.threads ? ctx.threads : 1, [&](std::size_t k) {
    const std::uint64_t s = replica_seed(ctx.master(), k);
    const auto e = as_config("model", [&] { return env::generate_environment(model, d, L, s, kappa); });
    samples[k].seed = s;
    samples[k].em = homog::effective_matrix(e, tol, inner);
    if (harmonic) {
      // Series conductances c = n r on a ring, divided by the mean multiplicity.
      double inv = 0;
      for (const auto& b : e.bonds()) inv += 1.0 / (e.multiplicity(b.from) * b.rate_forward);
      const auto bonds = static_cast<double>(e.bonds().size());
      samples[k].harmonic = bonds / inv * (bonds / e.total_mass());
    }
  });
  Table t{"matrix", matrix_header(d)};
  for (const auto& s : samples) add_matrix_row(t, s.seed, L, s.em);
  report.tables.push_back(std::move(t));
  Table ens{"ensemble", {"entry", "mean", "stderr", "seed_count"}};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      std::vector<double> v;
      for (const auto& s : samples) v.push_back(s.em.D(i, j));
      const auto est = mean_estimate(v);
      ens.add({"D" + std::to_string(i + 1) + std::to_string(j + 1), est.value, seeds > 1 ? est.std_error : 0.0, seeds});
    }
  report.tables.push_back(std::move(ens));

  if (check_scale) {
    double worst = 0;
    for (const auto& s : samples)
      worst = std::max(worst, (s.em.D - scale * Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff());
    report.check("identity", "D equals c I entrywise", worst <= scale_tol, num(worst) + " <= " + num(scale_tol));
  }
  if (harmonic) {
    double worst = 0;
    Table h{"harmonic", {"seed", "L", "D11", "harmonic_mean", "abs_error"}};
    for (const auto& s : samples) {
      const double err = std::abs(s.em.D(0, 0) - s.harmonic);
      worst = std::max(worst, err);
      h.add({s.seed, L, s.em.D(0, 0), s.harmonic, err});
    }
    report.tables.push_back(std::move(h));
    report.check("harmonic_mean", "per-sample D equals the realized harmonic mean", worst <= harmonic_tol,
                 num(worst) + " <= " + num(harmonic_tol));
  }
  if (check_mean) {
    std::vector<double> v;
    for (const auto& s : samples) v.push_back(s.em.D(0, 0));
    const auto est = mean_estimate(v);
    const double gap = std::abs(est.value - mean_target);
    report.check("ensemble_mean", "ensemble mean of D11 within mean_sigmas standard errors of the target",
                 gap <= sigmas * est.std_error,
                 num(est.value) + " vs " + num(mean_target) + ", gap " + num(gap) + " <= " + num(sigmas) + " * " +
                     num(est.std_error));
  }
  if (check_null) {
    double worst = 0;
    const auto a = static_cast<Eigen::Index>(null_axis - 1);
    for (const auto& s : samples) worst = std::max(worst, s.em.D.col(a).norm());
    report.check("null_axis", "|D e_k| vanishes on the degenerate axis", worst <= null_tol,
                 num(worst) + " <= " + num(null_tol));
  }
}

// ---------------------------------------------------------------- homog-convergence

void run_homog_convergence(const Context& ctx, ExperimentReport& report) {
  const Config& cfg = ctx.cfg;
  const int d = dimension(cfg);
  const auto model = model_spec(cfg);
  const auto L = side_of(cfg, 256);
  const auto eps = eps_grid(cfg);
  const auto f = class_checked_function(cfg, d);
  auto ops = cfg.texts("ops");
  if (ops.empty()) throw ConfigError("ops", "no operations requested");
  std::vector<std::pair<refpde::Operation, double>> plan;
  for (const auto& op : ops) {
    if (op == "semigroup") plan.emplace_back(refpde::Operation::semigroup, cfg.number("t"));
    else if (op == "resolvent") plan.emplace_back(refpde::Operation::resolvent, positive(cfg, "lambda", 1.0));
    else throw ConfigError("ops", "unknown operation '" + op + "'");
  }
  if (std::set<std::string>(ops.begin(), ops.end()).size() != ops.size()) throw ConfigError("ops", "duplicate operation");
  const double rel_tol = positive(cfg, "rel_tol", 0.1);
  const std::size_t intensity_seeds = positive_count(cfg, "intensity_seeds", 8, 2);
  const double corrector_tol = positive(cfg, "corrector_tol", 1e-10);
  const bool timing = cfg.flag("timing", false);
  const double kappa = cfg.number("kappa", 2.0);
  ctx.seal();
  for (double e : eps) {
    const double inner = 0.5 * e * static_cast<double>(L);
    if (f.envelope(inner) > refpde::kMaxEnvelopeTail)
      throw ConfigError("L", "test function envelope " + num(f.envelope(inner)) + " at half-box radius " +
                                 num(inner) + " for eps = " + num(e) + "; use a larger L");
  }

  const auto e = as_config("model", [&] { return env::generate_environment(model, d, L, ctx.master(), kappa); });
  const auto em = homog::effective_matrix(e, corrector_tol, ctx.threads);
  const auto m = env::intensity_estimate(model, d, L, intensity_seeds, ctx.master());
  if (!m.assumption_ok) throw DomainError("intensity estimate is not finite and positive");
  const refpde::DiffusionSpec spec(em.D, m.estimate.value);
  Table dt{"effective", matrix_header(d)};
  add_matrix_row(dt, e.seed(), L, em);
  report.tables.push_back(std::move(dt));
  report.notes.push_back("intensity m = " + num(m.estimate.value) + " +- " + num(m.estimate.std_error) + " over " +
                         std::to_string(intensity_seeds) + " seeds");

  for (std::size_t o = 0; o < plan.size(); ++o) {
    const auto [op, param] = plan[o];
    const auto rows = refpde::convergence_table(e, spec, f, op, param, eps, timing, ctx.threads);
    Table t{ops[o], {"eps", "err2", "err1", "ref_norm2", "runtime_s", "solver_bound", "envelope_tail",
                     "reference_edge", "seed"}};
    std::vector<double> e2, e1;
    for (const auto& r : rows) {
      t.add({r.epsilon, r.err2, r.err1, r.ref_norm2, r.runtime_s, r.solver_bound, r.envelope_tail,
             r.reference_edge, e.seed()});
      e2.push_back(r.err2);
      e1.push_back(r.err1);
    }
    report.tables.push_back(std::move(t));
    report.check(ops[o] + "_err2_decreasing", ops[o] + " err2 strictly decreasing in eps", strictly_decreasing(e2), join(e2));
    report.check(ops[o] + "_err1_decreasing", ops[o] + " err1 strictly decreasing in eps", strictly_decreasing(e1), join(e1));
    const double rel = rows.back().err2 / rows.back().ref_norm2;
    report.check(ops[o] + "_relative", ops[o] + " final err2 / ref_norm2 within rel_tol", rel <= rel_tol,
                 num(rel) + " <= " + num(rel_tol));
  }
}

// ---------------------------------------------------------------- sep-hydro

namespace {

refpde::Function profile(const std::string& text, const std::string& key) {
  auto [name, args] = split_call(text, key);
  if (name == "constant" && args.size() == 1) {
    const double c = args[0];
    if (c < 0 || c > 1) throw ConfigError(key, "density must lie in [0, 1]");
    return [c](const Point&) { return c; };
  }
  if (name == "wave" && args.size() == 2) {
    const double a = args[0], b = args[1];
    if (a - std::abs(b) < 0 || a + std::abs(b) > 1) throw ConfigError(key, "density must lie in [0, 1]");
    return [a, b](const Point& x) { return a + b * std::sin(2 * std::numbers::pi * x[0]); };
  }
  throw ConfigError(key, "expected constant(c) or wave(a, b), got '" + text + "'");
}

sep::NamedFunction observable(const std::string& id) {
  if (id == "one") return {id, [](const Point&) { return 1.0; }};
  if (id == "sin") return {id, [](const Point& x) { return std::sin(2 * std::numbers::pi * x[0]); }};
  if (id == "cos") return {id, [](const Point& x) { return std::cos(2 * std::numbers::pi * x[0]); }};
  throw ConfigError("phis", "unknown observable '" + id + "' (one, sin, cos)");
}

void hydro_table(Table& t, const sep::HydroReport& r, std::uint64_t master) {
  for (const auto& row : r.rows)
    t.add({row.t, row.phi_id, row.empirical, row.reference, row.gap, row.std_error, row.seed_count, master});
}

}  // namespace

void run_sep_hydro(const Context& ctx, ExperimentReport& report) {
  const Config& cfg = ctx.cfg;
  sep::HydroSpec spec;
  spec.model = model_spec(cfg);
  spec.d = dimension(cfg, 1);
  spec.side = side_of(cfg, 256);
  spec.epsilon = cfg.number("eps", 1.0 / static_cast<double>(spec.side));
  if (std::abs(spec.epsilon * static_cast<double>(spec.side) - 1.0) > 1e-12)
    throw ConfigError("eps", "the exclusion runs on the unit torus: eps must equal 1 / L");
  spec.rho0 = profile(cfg.text("rho0", "wave(0.5, 0.25)"), "rho0");
  spec.times = cfg.numbers("times");
  if (spec.times.empty()) throw ConfigError("times", "no observation times");
  for (double t : spec.times)
    if (!(t >= 0)) throw ConfigError("times", "times must be non-negative");
  for (const auto& id : cfg.texts("phis")) spec.phis.push_back(observable(id));
  spec.n_seeds = positive_count(cfg, "seeds", 20, 2);
  spec.master_seed = ctx.master();
  spec.threads = ctx.threads;
  const double tol = positive(cfg, "tol", 0.05);
  const bool control = cfg.flag("control", true);
  const double sigmas = positive(cfg, "control_sigmas", 3.0);
  if (spec.model.family == env::ModelSpec::Family::triangular_nn)
    throw ConfigError("model.family", "exclusion needs a Z^d lattice model");
  ctx.seal();

  const std::vector<std::string> head{"t", "phi_id", "empirical", "reference", "gap", "stderr", "seed_count", "master_seed"};
  const auto r = sep::hydro_check(spec);
  Table t{"hydro", head};
  hydro_table(t, r, spec.master_seed);
  report.tables.push_back(std::move(t));
  report.notes.push_back("m_hat = " + num(r.m_hat) + ", D11 = " + num(r.D(0, 0)));
  report.check("hydro_gap", "max over rows of |<pi_t, phi> - m_hat int rho(t) phi| within tol", r.max_gap() <= tol,
               num(r.max_gap()) + " <= " + num(tol));
  if (!control) return;
  sep::HydroSpec flat = spec;
  flat.rho0 = [](const Point&) { return 0.5; };
  flat.D = r.D;
  const auto c = sep::hydro_check(flat);
  Table ct{"control", head};
  hydro_table(ct, c, spec.master_seed);
  report.tables.push_back(std::move(ct));
  double worst = 0;
  bool ok = true;
  for (const auto& row : c.rows) {
    const double allowed = sigmas * row.std_error + 1e-12;
    ok = ok && row.gap <= allowed;
    worst = std::max(worst, row.std_error > 0 ? row.gap / row.std_error : (row.gap > 1e-12 ? INFINITY : 0.0));
  }
  report.check("control_flat", "constant profile stays flat within control_sigmas standard errors", ok,
               "worst gap / stderr " + num(worst) + " <= " + num(sigmas));
}

}  // namespace ergolab::harness
