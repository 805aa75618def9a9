#include "ringheom/hierarchy.hpp"

#include <map>
#include <stdexcept>

namespace ringheom {

std::int64_t hierarchy_count(int n_slots, int n_trunc) {
  if (n_slots < 1) throw std::invalid_argument("hierarchy_count: n_slots must be >= 1");
  if (n_trunc < 0) throw std::invalid_argument("hierarchy_count: n_trunc must be >= 0");
  // C(n_slots + n_trunc, n_trunc) with overflow guard.
  std::int64_t c = 1;
  for (int i = 1; i <= n_trunc; ++i) {
    const std::int64_t num = n_slots + i;
    if (c > (int64_t(1) << 40)) throw std::length_error("hierarchy_count: index set too large");
    c = c * num / i;  // exact: C(n+i, i) = C(n+i-1, i-1) * (n+i) / i divides evenly
  }
  return c;
}

HierarchySpace::HierarchySpace(int n_slots, int n_trunc)
    : n_slots_(n_slots), n_trunc_(n_trunc) {
  const std::int64_t total = hierarchy_count(n_slots, n_trunc);
  if (n_trunc > 255) throw std::invalid_argument("HierarchySpace: n_trunc must fit in a byte");
  counts_.reserve(total * n_slots);
  level_.reserve(total);

  // Level-by-level enumeration: all compositions of L into n_slots parts in
  // lexicographic order.
  std::map<std::vector<std::uint8_t>, std::int64_t> id;
  std::vector<std::uint8_t> idx(n_slots, 0);
  for (int L = 0; L <= n_trunc; ++L) {
    // first composition of L: everything in the last slot
    std::fill(idx.begin(), idx.end(), 0);
    idx[n_slots - 1] = static_cast<std::uint8_t>(L);
    // iterate compositions in colex-style order; ordering within a level is
    // immaterial as long as it is deterministic
    while (true) {
      id.emplace(idx, static_cast<std::int64_t>(level_.size()));
      counts_.insert(counts_.end(), idx.begin(), idx.end());
      level_.push_back(static_cast<std::uint8_t>(L));
      // next composition: find rightmost movable unit
      int s = n_slots - 1;
      while (s > 0 && idx[s] == 0) --s;
      if (s == 0) break;
      const int rem = idx[s] - 1;
      idx[s] = 0;
      ++idx[s - 1];
      idx[n_slots - 1] = static_cast<std::uint8_t>(rem);
    }
  }
  if (static_cast<std::int64_t>(level_.size()) != total) {
    throw std::runtime_error("HierarchySpace: enumeration count mismatch");
  }

  raise_.assign(total * n_slots, -1);
  lower_.assign(total * n_slots, -1);
  std::vector<std::uint8_t> probe(n_slots);
  for (std::int64_t i = 0; i < total; ++i) {
    const std::uint8_t* c = counts(i);
    for (int s = 0; s < n_slots; ++s) {
      probe.assign(c, c + n_slots);
      if (level_[i] < n_trunc) {
        ++probe[s];
        auto it = id.find(probe);
        if (it != id.end()) raise_[i * n_slots + s] = it->second;
        --probe[s];
      }
      if (c[s] > 0) {
        --probe[s];
        auto it = id.find(probe);
        if (it != id.end()) lower_[i * n_slots + s] = it->second;
      }
    }
  }
}

HierarchySpace make_hierarchy(int n_slots, int n_trunc) {
  return HierarchySpace(n_slots, n_trunc);
}

HierarchySpace enumerate_hierarchy(int K, int n_trunc) {
  if (K < 0) throw std::invalid_argument("enumerate_hierarchy: K must be >= 0");
  return HierarchySpace(2 * (K + 1), n_trunc);
}

}  // namespace ringheom
