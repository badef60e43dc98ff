#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "ergolab/core/error.hpp"
#include "ergolab/harness/acceptance.hpp"
#include "ergolab/harness/config.hpp"
#include "ergolab/harness/experiment.hpp"

using namespace ergolab;
using namespace ergolab::harness;

namespace {

// Shortcut flags that map onto configuration keys.
const std::map<std::string, std::string> kShortcuts{
    {"env", "env"},   {"eps", "eps"}, {"lambda", "lambda"},         {"t", "t"},
    {"f", "function"}, {"n", "n"},    {"instances", "instances"},
};

struct Common {
  std::string config;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::map<std::string, std::string> overrides;
};

int run_verb(const std::string& verb, const Common& c) {
  Config cfg = c.config.empty() ? Config{} : Config::load(c.config);
  if (cfg.has("kind") && cfg.text("kind") != verb)
    throw ConfigError("kind", "configuration is for '" + cfg.text("kind") + "', not '" + verb + "'");
  cfg.set("kind", verb);
  for (const auto& [key, value] : c.overrides) cfg.set(key, value);
  const auto report = run(cfg, RunOptions{c.seed, c.threads});
  write_report(report, c.out_dir);
  std::cout << summary_text(report);
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergolab: random environments, weighted ergodic averages and homogenization experiments"};
  app.require_subcommand(1);
  Common common;
  std::map<std::string, std::string> shortcut_values;
  std::string verb;

  for (const auto& kind : experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "run a " + kind + " experiment");
    sub->add_option("--config", common.config, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out-dir", common.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", common.seed, "master seed (overrides the configuration)");
    sub->add_option("--threads", common.threads, "worker threads")->capture_default_str();
    for (const auto& [flag, key] : kShortcuts)
      sub->add_option("--" + flag, shortcut_values[flag], "sets configuration key '" + key + "'");
    sub->callback([&verb, kind] { verb = kind; });
  }

  AcceptanceOptions accept;
  bool skip_rerun = false;
  auto* acc = app.add_subcommand("accept", "run the acceptance suite");
  acc->add_option("--out-dir", accept.out_dir, "output directory")->default_val("accept_out");
  acc->add_option("--threads", accept.threads, "worker threads")->capture_default_str();
  acc->add_option("--only", accept.only, "restrict to these criterion ids (AC1 ... AC10)");
  acc->add_flag("--no-rerun", skip_rerun, "skip the determinism reruns (AC11)");
  acc->callback([&verb] { verb = "accept"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (verb == "accept") {
      accept.determinism = !skip_rerun;
      accept.on_result = [](const Criterion& c) {
        std::cout << c.id << (c.passed ? " PASS " : " FAIL ") << c.description << " [" << c.detail << "]"
                  << std::endl;
      };
      const auto report = run_acceptance(accept);
      std::cout << (report.passed() ? "all acceptance criteria passed" : "some acceptance criteria failed") << "\n";
      return report.passed() ? 0 : 1;
    }
    for (const auto& [flag, value] : shortcut_values)
      if (!value.empty()) common.overrides[kShortcuts.at(flag)] = value;
    return run_verb(verb, common);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
