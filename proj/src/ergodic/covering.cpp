#include "ergolab/ergodic/covering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "ergolab/core/error.hpp"
#include "ergolab/core/rng.hpp"

namespace ergolab::ergodic {

namespace {

struct SiteHash {
  std::size_t operator()(const Site& s) const noexcept {
    std::uint64_t h = kGolden;
    for (auto v : s) h = hash_step(h, v);
    return static_cast<std::size_t>(h);
  }
};

using SiteSet = std::unordered_set<Site, SiteHash>;

Site add(const Site& a, const Site& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Site sub(const Site& a, const Site& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

std::vector<Site> difference_set(const std::vector<Site>& set) {
  SiteSet diff;
  for (const auto& a : set)
    for (const auto& b : set) diff.insert(sub(a, b));
  std::vector<Site> out(diff.begin(), diff.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

NestedSets::NestedSets(int d, std::vector<std::vector<Site>> sets) : d_(d), sets_(std::move(sets)) {
  check_dimension(d);
  if (sets_.empty()) throw DomainError("nested sets need at least one level");
  for (auto& s : sets_) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.empty()) throw DomainError("nested sets must be non-empty");
    for (const auto& x : s)
      for (int i = d; i < kMaxDim; ++i)
        if (x[i] != 0) throw DomainError("set point has components beyond the dimension");
  }
  for (std::size_t r = 1; r < sets_.size(); ++r)
    if (!std::includes(sets_[r].begin(), sets_[r].end(), sets_[r - 1].begin(), sets_[r - 1].end()))
      throw DomainError("sets are not nested at level " + std::to_string(r + 1));
  for (const auto& s : sets_) differences_.push_back(difference_set(s));
}

NestedSets NestedSets::shells(int d, int levels, int m, double kappa) {
  check_dimension(d);
  check_kappa(kappa);
  if (levels < 1 || m < 0) throw DomainError("shell sets need N >= 1 and m >= 0");
  std::vector<std::vector<Site>> sets;
  for (int r = 1; r <= levels; ++r) {
    const double bound = static_cast<double>((m + 1) * r);
    std::vector<Site> s;
    for_each_site_in_ball(d, kappa, static_cast<std::int64_t>(bound), [&](const Site& x) {
      if (norm(x, d, kappa) < bound) s.push_back(x);
    });
    sets.push_back(std::move(s));
  }
  return NestedSets(d, std::move(sets));
}

NestedSets NestedSets::explicit_sets(int d, std::vector<std::vector<Site>> levels) {
  return NestedSets(d, std::move(levels));
}

const std::vector<Site>& NestedSets::level(int r) const {
  if (r < 1 || r > levels()) throw DomainError("level out of range");
  return sets_[r - 1];
}

const std::vector<Site>& NestedSets::difference(int r) const {
  if (r < 1 || r > levels()) throw DomainError("level out of range");
  return differences_[r - 1];
}

CoveringResult covering_select(const std::vector<Site>& points, const std::vector<int>& levels,
                               const NestedSets& sets, bool certify) {
  if (points.size() != levels.size()) throw DomainError("every point needs a level");
  for (int k : levels)
    if (k < 1 || k > sets.levels()) throw DomainError("point level outside 1..N");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (levels[a] != levels[b]) return levels[a] > levels[b];
    return points[a] < points[b];
  });
  if (SiteSet(points.begin(), points.end()).size() != points.size())
    throw DomainError("duplicate point in B");
  CoveringResult out;
  SiteSet occupied;
  for (std::size_t idx : order) {
    const Site& z = points[idx];
    const auto& set = sets.level(levels[idx]);
    bool free = true;
    for (const auto& x : set)
      if (occupied.count(add(z, x))) {
        free = false;
        break;
      }
    if (!free) continue;
    for (const auto& x : set) occupied.insert(add(z, x));
    out.selected.push_back(z);
    out.level.push_back(levels[idx]);
  }
  for (int k : out.level) out.difference_total += sets.difference(k).size();
  if (!certify) {
    out.disjoint = out.covers = out.cardinality = true;
    return out;
  }
  // Disjointness recounted from scratch.
  std::unordered_map<Site, int, SiteHash> count;
  out.disjoint = true;
  for (std::size_t s = 0; s < out.selected.size(); ++s)
    for (const auto& x : sets.level(out.level[s]))
      if (++count[add(out.selected[s], x)] > 1) out.disjoint = false;
  // Covering by the difference translates.
  std::vector<SiteSet> diff_sets;
  for (int r = 1; r <= sets.levels(); ++r)
    diff_sets.emplace_back(sets.difference(r).begin(), sets.difference(r).end());
  out.covers = true;
  for (const auto& b : points) {
    bool hit = false;
    for (std::size_t s = 0; s < out.selected.size() && !hit; ++s)
      hit = diff_sets[out.level[s] - 1].count(sub(b, out.selected[s])) > 0;
    if (!hit) out.covers = false;
  }
  out.cardinality = points.size() <= out.difference_total;
  return out;
}

}  // namespace ergolab::ergodic
