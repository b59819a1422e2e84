#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace regbp {

/// Sorted, duplicate-free set of column indices. All set algebra is merge-based
/// so that column order (and therefore every derived matrix) is deterministic.
class IndexSet {
 public:
  using value_type = std::size_t;
  using const_iterator = std::vector<std::size_t>::const_iterator;

  IndexSet() = default;
  IndexSet(std::initializer_list<std::size_t> idx);
  /// Sorts and deduplicates.
  static IndexSet from_unsorted(std::vector<std::size_t> idx);
  /// Every index in [0, n).
  static IndexSet range(std::size_t n);

  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  std::size_t operator[](std::size_t i) const { return idx_[i]; }
  const_iterator begin() const { return idx_.begin(); }
  const_iterator end() const { return idx_.end(); }
  const std::vector<std::size_t>& values() const { return idx_; }

  bool contains(std::size_t i) const;
  /// Largest index + 1, or 0 for the empty set.
  std::size_t bound() const { return idx_.empty() ? 0 : idx_.back() + 1; }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<std::size_t> idx_;
};

IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet set_difference(const IndexSet& a, const IndexSet& b);
IndexSet set_intersection(const IndexSet& a, const IndexSet& b);
/// [0, n) minus s.
IndexSet complement(const IndexSet& s, std::size_t n);
bool disjoint(const IndexSet& a, const IndexSet& b);
bool is_subset(const IndexSet& sub, const IndexSet& super);

}  // namespace regbp
