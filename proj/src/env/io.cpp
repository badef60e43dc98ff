#include "ergolab/env/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "ergolab/core/error.hpp"

namespace ergolab::env {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool next_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    return true;
  }
  return false;
}

[[noreturn]] void bad(std::size_t lineno, const std::string& what) {
  throw DomainError("environment file line " + std::to_string(lineno) + ": " + what);
}

}  // namespace

void write_environment(std::ostream& out, const Environment& env) {
  const int d = env.dim();
  out << d << ' ' << env.side() << ' ' << fmt(env.kappa()) << ' ' << env.model_tag() << ' '
      << env.seed() << '\n';
  const LatticeMap& v = env.torus().lattice();
  if (!v.is_identity()) {
    out << "# V";
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) out << ' ' << fmt(v.entry(r, c));
    out << '\n';
  }
  out << "# atoms " << env.size() << '\n';
  for (std::size_t i = 0; i < env.size(); ++i) {
    out << i;
    for (int k = 0; k < d; ++k) out << ' ' << fmt(env.position(i)[k]);
    out << ' ' << fmt(env.multiplicity(i)) << '\n';
  }
  out << "# edges " << env.bonds().size() << '\n';
  for (const auto& b : env.bonds()) out << b.from << ' ' << b.to << ' ' << fmt(b.rate_forward) << '\n';
}

Environment read_environment(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_line(in, line, lineno)) throw DomainError("environment file is empty");
  int d = 0;
  std::int64_t side = 0;
  double kappa = 2.0;
  std::string tag;
  std::uint64_t seed = 0;
  {
    std::istringstream hs(line);
    std::string kappa_text;
    if (!(hs >> d >> side >> kappa_text >> tag >> seed)) bad(lineno, "malformed header");
    kappa = kappa_text == "inf" ? kInfNorm : std::stod(kappa_text);
  }
  check_dimension(d);
  LatticeMap lattice = LatticeMap::identity(d);
  std::size_t n_atoms = 0;
  bool have_atoms = false;
  while (!have_atoms && next_line(in, line, lineno)) {
    std::istringstream ls(line);
    std::string hash, word;
    ls >> hash >> word;
    if (hash != "#") bad(lineno, "expected '# atoms N'");
    if (word == "V") {
      std::array<std::array<double, kMaxDim>, kMaxDim> rows{};
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
          if (!(ls >> rows[r][c])) bad(lineno, "malformed lattice map");
      lattice = LatticeMap(d, rows);
    } else if (word == "atoms") {
      if (!(ls >> n_atoms)) bad(lineno, "malformed atom count");
      have_atoms = true;
    }
  }
  if (!have_atoms) throw DomainError("environment file has no atom section");
  std::vector<Point> pos(n_atoms, Point{0, 0, 0});
  std::vector<double> mult(n_atoms, 0.0);
  for (std::size_t k = 0; k < n_atoms; ++k) {
    if (!next_line(in, line, lineno)) bad(lineno, "missing atom lines");
    std::istringstream ls(line);
    std::size_t id = 0;
    if (!(ls >> id) || id != k) bad(lineno, "atom ids must be 0..N-1 in order");
    for (int i = 0; i < d; ++i)
      if (!(ls >> pos[k][i])) bad(lineno, "malformed atom position");
    if (!(ls >> mult[k])) bad(lineno, "missing multiplicity");
  }
  std::size_t n_edges = 0;
  bool have_edges = false;
  while (!have_edges && next_line(in, line, lineno)) {
    std::istringstream ls(line);
    std::string hash, word;
    ls >> hash >> word;
    if (hash != "#") bad(lineno, "expected '# edges M'");
    if (word == "edges") {
      if (!(ls >> n_edges)) bad(lineno, "malformed edge count");
      have_edges = true;
    }
  }
  if (!have_edges) throw DomainError("environment file has no edge section");
  const Torus torus(d, side, lattice);
  std::vector<Bond> bonds(n_edges);
  for (std::size_t k = 0; k < n_edges; ++k) {
    if (!next_line(in, line, lineno)) bad(lineno, "missing edge lines");
    std::istringstream ls(line);
    Bond& b = bonds[k];
    if (!(ls >> b.from >> b.to >> b.rate_forward)) bad(lineno, "malformed edge");
    if (b.from >= n_atoms || b.to >= n_atoms) bad(lineno, "edge refers to a missing atom");
    b.rate_backward = mult[b.from] * b.rate_forward / mult[b.to];
    Point delta{0, 0, 0};
    for (int i = 0; i < d; ++i) delta[i] = pos[b.to][i] - pos[b.from][i];
    b.displacement = torus.minimal_image(delta);
  }
  Environment env(torus, kappa, seed, tag, std::move(pos), std::move(mult), std::move(bonds));
  env.validate(false);
  return env;
}

void save_environment(const std::string& path, const Environment& env) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_environment(out, env);
  if (!out) throw Error("failed writing '" + path + "'");
}

Environment load_environment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_environment(in);
}

}  // namespace ergolab::env
