#include "ergolab/harness/experiment.hpp"

#include <chrono>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ergolab/core/error.hpp"
#include "ergolab/core/parallel.hpp"
#include "runners.hpp"

namespace ergolab::harness {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::logic_error("to_chars failed");
  return {buf, ptr};
}

std::string Cell::str() const {
  struct Visit {
    std::string operator()(double x) const { return format_double(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(std::uint64_t x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) {
        if (c == '"') q += '"';
        q += c;
      }
      return q + '"';
    }
  };
  return std::visit(Visit{}, v);
}

void Table::add(const std::vector<Cell>& row) {
  if (row.size() != header.size())
    throw std::logic_error("table " + name + ": row has " + std::to_string(row.size()) +
                           " cells, header has " + std::to_string(header.size()));
  std::vector<std::string> out;
  out.reserve(row.size());
  for (const auto& c : row) out.push_back(c.str());
  rows.push_back(std::move(out));
}

std::string Table::csv() const {
  std::string s;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    s += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return s;
}

bool ExperimentReport::passed() const {
  for (const auto& c : criteria)
    if (!c.passed) return false;
  return true;
}

const Table& ExperimentReport::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw std::out_of_range("no table named " + name);
}

void ExperimentReport::check(std::string id, std::string description, bool ok, std::string detail) {
  criteria.push_back({std::move(id), std::move(description), ok, std::move(detail)});
}

ExperimentReport run(Config config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (options.seed) config.set("seed", std::to_string(*options.seed));
  const std::string kind = config.text("kind");
  config.seed("seed", 0);  // validated and marked used up front
  const unsigned threads = options.threads == 0 ? 1 : options.threads;
  const unsigned saved = default_threads();
  set_default_threads(threads);
  ExperimentReport report;
  report.kind = kind;
  report.config_hash = fnv1a(config.canonical());
  try {
    const Context ctx{config, threads};
    if (kind == "gen-env") run_gen_env(ctx, report);
    else if (kind == "ergodic-avg") run_ergodic_avg(ctx, report);
    else if (kind == "maximal") run_maximal(ctx, report);
    else if (kind == "covering-test") run_covering(ctx, report);
    else if (kind == "measure-limit") run_measure_limit(ctx, report);
    else if (kind == "resolvent") run_operator(ctx, report, false);
    else if (kind == "semigroup") run_operator(ctx, report, true);
    else if (kind == "paths") run_paths(ctx, report);
    else if (kind == "effective-matrix") run_effective_matrix(ctx, report);
    else if (kind == "homog-convergence") run_homog_convergence(ctx, report);
    else if (kind == "sep-hydro") run_sep_hydro(ctx, report);
    else if (kind == "operator-check") run_operator_check(ctx, report);
    else throw ConfigError("kind", "unknown experiment kind '" + kind + "'");
  } catch (...) {
    set_default_threads(saved);
    throw;
  }
  set_default_threads(saved);
  report.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string summary_text(const ExperimentReport& report) {
  std::ostringstream os;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(report.config_hash));
  os << "kind: " << report.kind << "\n"
     << "config_hash: " << hash << "\n"
     << "wall_clock_s: " << format_double(report.wall_clock_s) << "\n"
     << "status: " << (report.passed() ? "PASS" : "FAIL") << "\n";
  for (const auto& t : report.tables) os << "table: " << t.name << ".csv (" << t.rows.size() << " rows)\n";
  for (const auto& c : report.criteria)
    os << (c.passed ? "PASS " : "FAIL ") << c.id << ": " << c.description << " [" << c.detail << "]\n";
  for (const auto& n : report.notes) os << "note: " << n << "\n";
  return os.str();
}

void write_report(const ExperimentReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (fs::path(out_dir) / name).string());
    out << body;
  };
  for (const auto& t : report.tables) put(t.name + ".csv", t.csv());
  for (const auto& [name, body] : report.files) put(name, body);
  put("summary.txt", summary_text(report));
}

}  // namespace ergolab::harness
