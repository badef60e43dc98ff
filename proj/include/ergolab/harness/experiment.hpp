#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ergolab/harness/config.hpp"

namespace ergolab::harness {

// One CSV cell. Doubles are written in shortest round-trip form.
struct Cell {
  std::variant<double, std::int64_t, std::uint64_t, std::string> v;
  Cell(double x) : v(x) {}
  Cell(int x) : v(std::int64_t{x}) {}
  Cell(long x) : v(std::int64_t{x}) {}
  Cell(long long x) : v(static_cast<std::int64_t>(x)) {}
  Cell(unsigned x) : v(std::uint64_t{x}) {}
  Cell(unsigned long x) : v(static_cast<std::uint64_t>(x)) {}
  Cell(unsigned long long x) : v(static_cast<std::uint64_t>(x)) {}
  Cell(bool x) : v(std::string(x ? "true" : "false")) {}
  Cell(std::string s) : v(std::move(s)) {}
  Cell(const char* s) : v(std::string(s)) {}
  std::string str() const;
};

struct Table {
  Table(std::string name, std::vector<std::string> header) : name(std::move(name)), header(std::move(header)) {}

  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(const std::vector<Cell>& row);
  std::string csv() const;
};

std::string format_double(double x);

struct Criterion {
  std::string id;
  std::string description;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  std::string kind;
  std::uint64_t config_hash = 0;
  std::vector<Table> tables;
  // Extra artifacts: (file name, contents).
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<Criterion> criteria;
  std::vector<std::string> notes;
  double wall_clock_s = 0.0;

  bool passed() const;
  const Table& table(const std::string& name) const;
  void check(std::string id, std::string description, bool ok, std::string detail);
};

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config's master seed
  unsigned threads = 1;
};

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{
      "gen-env",        "ergodic-avg",      "maximal",      "covering-test",
      "measure-limit",  "resolvent",        "semigroup",    "paths",
      "effective-matrix", "homog-convergence", "sep-hydro", "operator-check"};
  return kinds;
}

// Validates the configuration, dispatches on `kind` and times the run. Any
// configuration problem raises ConfigError naming the key; keys that were
// never read are rejected as likely typos.
ExperimentReport run(Config config, const RunOptions& options = {});

// CSV per table, extra files, and summary.txt.
void write_report(const ExperimentReport& report, const std::string& out_dir);

std::string summary_text(const ExperimentReport& report);

}  // namespace ergolab::harness
