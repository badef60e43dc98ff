#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ergolab/core/geometry.hpp"

namespace ergolab::ergodic {

// Nested finite sets I_1 <= I_2 <= ... <= I_N in Z^d.
class NestedSets {
 public:
  // I_r = {x : |x|_kappa < (m + 1) r}.
  static NestedSets shells(int d, int levels, int m, double kappa = 2.0);
  // Explicit point lists; nesting is checked.
  static NestedSets explicit_sets(int d, std::vector<std::vector<Site>> levels);

  int dim() const { return d_; }
  int levels() const { return static_cast<int>(sets_.size()); }
  // r in 1..N
  const std::vector<Site>& level(int r) const;
  // I_r - I_r
  const std::vector<Site>& difference(int r) const;

 private:
  NestedSets(int d, std::vector<std::vector<Site>> sets);
  int d_;
  std::vector<std::vector<Site>> sets_;
  std::vector<std::vector<Site>> differences_;
};

struct CoveringResult {
  std::vector<Site> selected;
  std::vector<int> level;  // k(z) for each selected z
  // Certificates; all true on a correct run.
  bool disjoint = false;
  bool covers = false;
  bool cardinality = false;
  std::size_t difference_total = 0;  // sum over selected z of |I_k(z) - I_k(z)|
  bool certified() const { return disjoint && covers && cardinality; }
};

// Greedy selection from level N down to 1, candidates of each level scanned in
// lexicographic order; z is kept iff z + I_k(z) misses every translate kept so far.
// With `certify` the disjointness, covering and cardinality conclusions are checked.
CoveringResult covering_select(const std::vector<Site>& points, const std::vector<int>& levels,
                               const NestedSets& sets, bool certify = true);

}  // namespace ergolab::ergodic
