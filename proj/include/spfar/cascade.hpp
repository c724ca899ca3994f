#pragma once

#include <vector>

#include "spfar/length.hpp"
#include "spfar/probes.hpp"

namespace spfar {

class UnsortedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fractional cascading over several sorted key lists, classic
/// every-second-element promotion.  A query locates the predecessor
/// (largest key <= query) in every list with O(#lists + log total) probes.
class CascadeStructure {
 public:
  explicit CascadeStructure(std::vector<std::vector<Length>> lists)
      : lists_(std::move(lists)) {
    for (const auto& l : lists_)
      for (std::size_t i = 1; i < l.size(); ++i)
        if (l[i] < l[i - 1]) throw UnsortedInput("cascade list not sorted");
    aug_.resize(lists_.size());
    if (lists_.empty()) return;
    build_level(0);
  }

  std::size_t list_count() const { return lists_.size(); }

  /// Predecessor index per original list; -1 when key precedes all entries.
  std::vector<int> query(Length key) const {
    std::vector<int> out(lists_.size(), -1);
    if (lists_.empty()) return out;
    // One binary search in the top augmented list.
    const auto& top = aug_[0];
    int pos = -1;
    {
      int lo = 0, hi = static_cast<int>(top.size()) - 1;
      while (lo <= hi) {
        int mid = (lo + hi) / 2;
        probe();
        if (top[mid].key <= key) {
          pos = mid;
          lo = mid + 1;
        } else {
          hi = mid - 1;
        }
      }
    }
    for (std::size_t i = 0; i < lists_.size(); ++i) {
      const auto& a = aug_[i];
      out[i] = pos >= 0 ? a[pos].pred_own : -1;
      if (i + 1 < lists_.size()) {
        int nxt = pos >= 0 ? a[pos].down : -1;
        const auto& b = aug_[i + 1];
        while (nxt + 1 < static_cast<int>(b.size()) &&
               b[nxt + 1].key <= key) {
          probe();
          ++nxt;
        }
        pos = nxt;
      }
    }
    return out;
  }

 private:
  struct Node {
    Length key;
    int pred_own;  // predecessor index in the original list at this level
    int down;      // predecessor index in the next augmented list
  };

  void build_level(int i) {
    auto& a = aug_[i];
    const auto& own = lists_[i];
    std::vector<Length> promoted;
    if (i + 1 < static_cast<int>(lists_.size())) {
      build_level(i + 1);
      const auto& below = aug_[i + 1];
      for (std::size_t j = 1; j < below.size(); j += 2)
        promoted.push_back(below[j].key);
    }
    std::size_t oi = 0, pi = 0;
    while (oi < own.size() || pi < promoted.size()) {
      Length k;
      if (pi >= promoted.size() || (oi < own.size() && own[oi] <= promoted[pi]))
        k = own[oi++];
      else
        k = promoted[pi++];
      a.push_back({k, static_cast<int>(oi) - 1, 0});
    }
    // down pointers: predecessor position in the next augmented list.
    if (i + 1 < static_cast<int>(lists_.size())) {
      const auto& below = aug_[i + 1];
      int d = -1;
      std::size_t bi = 0;
      for (auto& node : a) {
        while (bi < below.size() && below[bi].key <= node.key) {
          d = static_cast<int>(bi);
          ++bi;
        }
        node.down = d;
      }
    }
  }

  std::vector<std::vector<Length>> lists_;
  std::vector<std::vector<Node>> aug_;
};

}  // namespace spfar
