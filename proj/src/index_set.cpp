#include "regbp/index_set.hpp"

#include <algorithm>
#include <iterator>

namespace regbp {

IndexSet::IndexSet(std::initializer_list<std::size_t> idx) : idx_(idx) {
  std::sort(idx_.begin(), idx_.end());
  idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
}

IndexSet IndexSet::from_unsorted(std::vector<std::size_t> idx) {
  IndexSet s;
  s.idx_ = std::move(idx);
  std::sort(s.idx_.begin(), s.idx_.end());
  s.idx_.erase(std::unique(s.idx_.begin(), s.idx_.end()), s.idx_.end());
  return s;
}

IndexSet IndexSet::range(std::size_t n) {
  IndexSet s;
  s.idx_.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.idx_[i] = i;
  return s;
}

bool IndexSet::contains(std::size_t i) const {
  return std::binary_search(idx_.begin(), idx_.end(), i);
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  std::vector<std::size_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return IndexSet::from_unsorted(std::move(out));
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  std::vector<std::size_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return IndexSet::from_unsorted(std::move(out));
}

IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return IndexSet::from_unsorted(std::move(out));
}

IndexSet complement(const IndexSet& s, std::size_t n) {
  return set_difference(IndexSet::range(n), s);
}

bool disjoint(const IndexSet& a, const IndexSet& b) {
  return set_intersection(a, b).empty();
}

bool is_subset(const IndexSet& sub, const IndexSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

}  // namespace regbp
