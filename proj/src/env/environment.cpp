#include "ergolab/env/environment.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ergolab/core/error.hpp"

namespace ergolab::env {

Environment::Environment(Torus torus, double kappa, std::uint64_t seed, std::string model_tag,
                         std::vector<Point> positions, std::vector<double> multiplicity,
                         std::vector<Bond> bonds)
    : torus_(std::move(torus)),
      kappa_(kappa),
      seed_(seed),
      model_tag_(std::move(model_tag)),
      positions_(std::move(positions)),
      multiplicity_(std::move(multiplicity)),
      bonds_(std::move(bonds)) {
  check_kappa(kappa_);
  if (positions_.size() != multiplicity_.size())
    throw DomainError("positions and multiplicities differ in length");
  const std::size_t n = positions_.size();
  std::vector<std::size_t> degree(n, 0);
  for (const auto& b : bonds_) {
    if (b.from >= n || b.to >= n) throw DomainError("bond refers to a missing atom");
    if (b.rate_forward > 0) ++degree[b.from];
    if (b.rate_backward > 0) ++degree[b.to];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& b : bonds_) {
    if (b.rate_forward > 0) adjacency_[fill[b.from]++] = {b.to, b.rate_forward, b.displacement};
    if (b.rate_backward > 0) {
      Point back{-b.displacement[0], -b.displacement[1], -b.displacement[2]};
      adjacency_[fill[b.to]++] = {b.from, b.rate_backward, back};
    }
  }
}

double Environment::escape_rate(std::size_t i) const {
  double r = 0.0;
  for (const auto& nb : neighbors(i)) r += nb.rate;
  return r;
}

double Environment::total_mass() const {
  return std::accumulate(multiplicity_.begin(), multiplicity_.end(), 0.0);
}

bool Environment::simple() const {
  for (double m : multiplicity_)
    if (m != 1.0) return false;
  return true;
}

bool Environment::connected() const {
  const std::size_t n = size();
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (const auto& nb : neighbors(i)) {
      if (!seen[nb.atom]) {
        seen[nb.atom] = 1;
        ++count;
        stack.push_back(nb.atom);
      }
    }
  }
  return count == n;
}

bool Environment::detailed_balance_exact() const {
  for (const auto& b : bonds_)
    if (multiplicity_[b.from] * b.rate_forward != multiplicity_[b.to] * b.rate_backward)
      return false;
  return true;
}

void Environment::validate(bool require_connected) const {
  auto fail = [](const std::string& what) { throw DomainError("invalid environment: " + what); };
  if (size() == 0) fail("no atoms");
  for (std::size_t i = 0; i < size(); ++i)
    if (!(multiplicity_[i] > 0) || !std::isfinite(multiplicity_[i]))
      fail("non-positive multiplicity at atom " + std::to_string(i));
  for (std::size_t k = 0; k < bonds_.size(); ++k) {
    const auto& b = bonds_[k];
    if (b.from == b.to) fail("self-loop at bond " + std::to_string(k));
    if (!(b.rate_forward >= 0) || !(b.rate_backward >= 0) || !std::isfinite(b.rate_forward) ||
        !std::isfinite(b.rate_backward))
      fail("negative or non-finite rate at bond " + std::to_string(k));
    if (multiplicity_[b.from] * b.rate_forward != multiplicity_[b.to] * b.rate_backward) {
      std::ostringstream os;
      os << "detailed balance violated on bond " << k << " (" << b.from << "," << b.to << ")";
      fail(os.str());
    }
  }
  if (require_connected && !connected()) fail("rate graph is disconnected");
}

}  // namespace ergolab::env
