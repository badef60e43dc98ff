#include "ergolab/harness/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>

#include "ergolab/core/error.hpp"

namespace ergolab::harness {

const std::vector<AcceptanceCase>& acceptance_cases() {
  static const std::vector<AcceptanceCase> cases{
      {"AC1", "covering construction: disjoint, covering and cardinality bound on 1000 random instances",
       {{"covering", R"cfg(kind = covering-test
seed = 1
d = 2
instances = 1000
max_points = 50
max_levels = 4
)cfg"}},
       10},
      {"AC2", "weighted ergodic theorem: median relative error <= 5% at n = 256 and below its n = 64 value",
       {{"ergodic", R"cfg(kind = ergodic-avg
seed = 2
d = 2
n = [64, 256]
seeds = 50
tol = 0.05
[weight]
family = power
beta = 8
[field]
law = "bernoulli(0.3)"
)cfg"}},
       120},
      {"AC3", "non-ergodic mixture: >= 90% of seeds within 10% of their own target, none nearer the wrong one",
       {{"mixture", R"cfg(kind = ergodic-avg
seed = 3
d = 2
n = [256]
seeds = 50
tol = 0.1
min_fraction = 0.9
[weight]
family = power
beta = 8
[field]
mixture = ["bernoulli(0.2)", "bernoulli(0.8)"]
)cfg"}},
       0},
      {"AC4", "maximal inequality: max alpha P(sup > alpha) <= 4 times its alpha = 1 value",
       {{"maximal", R"cfg(kind = maximal
seed = 4
d = 1
levels = 64
alphas = [1, 2, 4, 8, 16]
seeds = 500
ratio = 4
[weight]
family = power
beta = 6
[field]
law = "exp(1)"
)cfg"}},
       0},
      {"AC5", "random-measure limit for Poisson(2) points and tail functional trend",
       {{"measure", R"cfg(kind = measure-limit
seed = 5
d = 2
L = 384
eps = [1/8, 1/16, 1/32]
function = "gaussian(1)"
seeds = 100
ell = [1, 4]
z_max = 3
tail_ratio = 0.2
[model]
family = poisson
intensity = 2
)cfg"}},
       0},
      {"AC6", "effective matrix oracles: constant rates, 1d harmonic mean, stacked chains",
       {{"constant", R"cfg(kind = effective-matrix
seed = 61
d = 2
L = 32
seeds = 1
[model]
family = zd_nn
rates = "constant(1.5)"
[assert]
identity_scale = 1.5
identity_tol = 1e-10
)cfg"},
        {"harmonic", R"cfg(kind = effective-matrix
seed = 62
d = 1
L = 4096
seeds = 20
[model]
family = zd_nn
rates = "uniform(1, 2)"
[assert]
harmonic_mean = true
harmonic_tol = 1e-8
mean_target = 1.4426950408889634
mean_sigmas = 3
)cfg"},
        {"stacked", R"cfg(kind = effective-matrix
seed = 63
d = 2
L = 32
seeds = 1
[model]
family = stacked_chains
rates = "uniform(1, 2)"
[assert]
null_axis = 2
null_tol = 1e-8
)cfg"}},
       300},
      {"AC7", "operator identities on 100 random chains",
       {{"operators", R"cfg(kind = operator-check
seed = 7
instances = 100
min_states = 8
max_states = 64
gillespie_instances = 2
paths = 100000
)cfg"}},
       0},
      {"AC8", "homogenization convergence: errors strictly decrease, final err2 / ||ref||^2 <= 10%",
       {{"convergence", R"cfg(kind = homog-convergence
seed = 8
d = 2
L = 768
eps = [1/8, 1/16, 1/32]
function = "gaussian(1)"
ops = [semigroup, resolvent]
t = 0.5
lambda = 1
rel_tol = 0.1
[model]
family = zd_nn
rates = "two_point(1, 2)"
)cfg"}},
       600},
      {"AC9", "2 tr(D) within 10% of the MSD / t slope from 10^4 paths",
       {{"msd", R"cfg(kind = paths
seed = 9
d = 2
L = 128
eps = 1
t = 200
n = 10000
msd = true
tol = 0.1
[model]
family = zd_nn
rates = "two_point(1, 2)"
)cfg"}},
       0},
      {"AC10", "SSEP hydrodynamics: max gap <= 0.05, constant control flat within 3 standard errors",
       {{"hydro", R"cfg(kind = sep-hydro
seed = 10
d = 1
L = 256
eps = 1/256
rho0 = "wave(0.5, 0.25)"
times = [0.02, 0.05]
phis = [one, sin, cos]
seeds = 20
tol = 0.05
control = true
control_sigmas = 3
[model]
family = zd_nn
rates = "constant(1)"
)cfg"}},
       600},
  };
  return cases;
}

namespace {

struct PartRun {
  ExperimentReport report;
  std::string error;
};

PartRun run_part(const AcceptancePart& part, unsigned threads) {
  PartRun out;
  try {
    out.report = run(Config::parse(part.config, part.label), RunOptions{std::nullopt, threads});
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f s", s);
  return buf;
}

}  // namespace

ExperimentReport run_acceptance(const AcceptanceOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport out;
  out.kind = "accept";
  std::string all_configs;
  for (const auto& c : acceptance_cases())
    for (const auto& p : c.parts) all_configs += p.config;
  out.config_hash = fnv1a(all_configs);
  Table table{"acceptance", {"id", "passed", "detail"}};
  auto emit = [&](Criterion c) {
    table.add({c.id, c.passed, c.detail});
    if (options.on_result) options.on_result(c);
    out.criteria.push_back(std::move(c));
  };
  auto wanted = [&](const std::string& id) {
    return options.only.empty() || std::find(options.only.begin(), options.only.end(), id) != options.only.end();
  };

  std::size_t compared = 0;
  std::vector<std::string> mismatches;
  for (const auto& c : acceptance_cases()) {
    if (!wanted(c.id)) continue;
    bool ok = true;
    std::string detail;
    double seconds = 0;
    for (const auto& p : c.parts) {
      auto first = run_part(p, options.threads);
      if (!first.error.empty()) {
        ok = false;
        detail += p.label + ": error: " + first.error + "; ";
        continue;
      }
      seconds += first.report.wall_clock_s;
      for (const auto& cr : first.report.criteria) {
        if (!cr.passed) ok = false;
        detail += (cr.passed ? "" : "FAILED ") + cr.id + " " + cr.detail + "; ";
      }
      if (!options.out_dir.empty())
        write_report(first.report, (std::filesystem::path(options.out_dir) / c.id / p.label).string());
      if (options.determinism) {
        auto second = run_part(p, options.threads);
        bool same = second.error.empty() && second.report.tables.size() == first.report.tables.size();
        for (std::size_t t = 0; same && t < first.report.tables.size(); ++t)
          same = first.report.tables[t].csv() == second.report.tables[t].csv();
        for (std::size_t f = 0; same && f < first.report.files.size(); ++f)
          same = first.report.files[f] == second.report.files[f];
        ++compared;
        if (!same) mismatches.push_back(c.id + "/" + p.label);
      }
    }
    if (c.budget_s > 0) {
      const bool fast = seconds <= c.budget_s;
      ok = ok && fast;
      detail += "runtime " + fmt_seconds(seconds) + (fast ? " <= " : " > ") + fmt_seconds(c.budget_s);
    } else {
      detail += "runtime " + fmt_seconds(seconds);
    }
    emit({c.id, c.description, ok, detail});
  }
  if (options.determinism && compared > 0) {
    std::string detail = std::to_string(compared - mismatches.size()) + " of " + std::to_string(compared) +
                         " experiments reproduced bit-identical CSVs";
    for (const auto& m : mismatches) detail += "; differs: " + m;
    emit({"AC11", "rerunning each acceptance experiment with the same config gives bit-identical CSV",
          mismatches.empty(), detail});
  }
  out.tables.push_back(std::move(table));
  out.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!options.out_dir.empty()) write_report(out, options.out_dir);
  return out;
}

}  // namespace ergolab::harness
