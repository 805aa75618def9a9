#pragma once

#include <cstdint>
#include <vector>

namespace ringheom {

// Multi-index set {n_s >= 0 : sum_s n_s <= n_trunc} over n_slots slots,
// enumerated level by level (lexicographic within a level), so index 0 is
// the root. Neighbor tables give the position of n +- e_s or -1 when the
// neighbor leaves the set.
class HierarchySpace {
 public:
  HierarchySpace(int n_slots, int n_trunc);

  int n_slots() const { return n_slots_; }
  int n_trunc() const { return n_trunc_; }
  std::int64_t size() const { return static_cast<std::int64_t>(level_.size()); }

  const std::uint8_t* counts(std::int64_t i) const { return counts_.data() + i * n_slots_; }
  int level(std::int64_t i) const { return level_[i]; }
  std::int64_t raised(std::int64_t i, int slot) const { return raise_[i * n_slots_ + slot]; }
  std::int64_t lowered(std::int64_t i, int slot) const { return lower_[i * n_slots_ + slot]; }

 private:
  int n_slots_;
  int n_trunc_;
  std::vector<std::uint8_t> counts_;
  std::vector<std::uint8_t> level_;
  std::vector<std::int64_t> raise_;
  std::vector<std::int64_t> lower_;
};

// Number of multi-indices, C(n_slots + n_trunc, n_trunc); throws a capacity
// error when it cannot be represented.
std::int64_t hierarchy_count(int n_slots, int n_trunc);

HierarchySpace make_hierarchy(int n_slots, int n_trunc);

// Ring bath-pair layout: slot = alpha * (K + 1) + k with alpha in {x = 0, y = 1},
// k = 0 the cutoff pole and k >= 1 the Pade poles.
HierarchySpace enumerate_hierarchy(int K, int n_trunc);

}  // namespace ringheom
