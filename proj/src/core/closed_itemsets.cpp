#include <algorithm>
#include <bit>
#include <functional>

#include "maxent/assessment.hpp"
#include "maxent/error.hpp"

namespace maxent {
namespace {

using Word = std::uint64_t;
using Tidset = std::vector<Word>;

class ClosedMiner {
 public:
  using Visitor = std::function<void(const std::vector<Index>&, std::size_t)>;

  ClosedMiner(const DataMatrix& data, std::size_t min_support, Visitor visit)
      : words_((data.rows() + 63) / 64), min_support_(min_support), visit_(std::move(visit)) {
    std::vector<Tidset> tids(data.cols(), Tidset(words_, 0));
    std::vector<std::size_t> support(data.cols(), 0);
    for (const auto& [c, v] : data.entries()) {
      tids[c.col][c.row / 64] |= Word{1} << (c.row % 64);
      ++support[c.col];
    }
    // Only frequent items can appear in the closure of a frequent tidset.
    for (Index j = 0; j < data.cols(); ++j)
      if (support[j] >= min_support_) {
        items_.push_back(j);
        tids_.push_back(std::move(tids[j]));
      }
    rows_ = data.rows();
  }

  void run() {
    if (rows_ < min_support_ || min_support_ == 0) return;
    Tidset all(words_, ~Word{0});
    if (rows_ % 64 != 0) all.back() = (Word{1} << (rows_ % 64)) - 1;
    std::vector<char> in_set(items_.size(), 0);
    for (std::size_t x = 0; x < items_.size(); ++x) in_set[x] = contains(all, x);
    std::vector<std::size_t> members;
    for (std::size_t x = 0; x < items_.size(); ++x)
      if (in_set[x]) members.push_back(x);
    if (!members.empty()) emit(members, rows_);
    extend(in_set, all, 0);
  }

 private:
  bool contains(const Tidset& t, std::size_t x) const {
    const Tidset& ix = tids_[x];
    for (std::size_t w = 0; w < words_; ++w)
      if (t[w] & ~ix[w]) return false;
    return true;
  }

  void emit(const std::vector<std::size_t>& members, std::size_t support) {
    labels_.clear();
    for (std::size_t x : members) labels_.push_back(items_[x]);
    visit_(labels_, support);
  }

  // `in_set` marks the current closed itemset; extensions use items >= first.
  void extend(const std::vector<char>& in_set, const Tidset& tids, std::size_t first) {
    Tidset next(words_);
    for (std::size_t e = first; e < items_.size(); ++e) {
      if (in_set[e]) continue;
      std::size_t support = 0;
      for (std::size_t w = 0; w < words_; ++w) {
        next[w] = tids[w] & tids_[e][w];
        support += static_cast<std::size_t>(std::popcount(next[w]));
      }
      if (support < min_support_) continue;
      // Prefix-preserving: the closure may not add any item before e.
      bool canonical = true;
      for (std::size_t x = 0; x < e && canonical; ++x)
        if (!in_set[x] && contains(next, x)) canonical = false;
      if (!canonical) continue;
      std::vector<char> closed = in_set;
      closed[e] = 1;
      for (std::size_t x = e + 1; x < items_.size(); ++x)
        if (!closed[x] && contains(next, x)) closed[x] = 1;
      std::vector<std::size_t> members;
      for (std::size_t x = 0; x < items_.size(); ++x)
        if (closed[x]) members.push_back(x);
      emit(members, support);
      extend(closed, next, e + 1);
    }
  }

  std::size_t words_;
  std::size_t rows_ = 0;
  std::size_t min_support_;
  Visitor visit_;
  std::vector<Index> items_;
  std::vector<Tidset> tids_;
  std::vector<Index> labels_;
};

void require_binary_database(const DataMatrix& data) {
  if (data.domain() != Domain::Binary || data.structure().kind != StructureKind::Database)
    fail(ErrorKind::Input, "closed itemset mining requires a binary database");
}

}  // namespace

ClosedItemsetResult mine_closed(const DataMatrix& data, std::size_t min_support) {
  require_binary_database(data);
  if (min_support < 1) fail(ErrorKind::Usage, "minimum support must be at least 1");
  ClosedItemsetResult result;
  ClosedMiner miner(data, min_support, [&](const std::vector<Index>& items, std::size_t support) {
    result.itemsets.push_back({items, support});
    ++result.counts_by_size[items.size()];
  });
  miner.run();
  std::sort(result.itemsets.begin(), result.itemsets.end(),
            [](const ClosedItemset& a, const ClosedItemset& b) { return a.items < b.items; });
  return result;
}

SizeCounts count_closed(const DataMatrix& data, std::size_t min_support) {
  require_binary_database(data);
  if (min_support < 1) fail(ErrorKind::Usage, "minimum support must be at least 1");
  SizeCounts counts;
  ClosedMiner miner(data, min_support,
                    [&](const std::vector<Index>& items, std::size_t) { ++counts[items.size()]; });
  miner.run();
  return counts;
}

}  // namespace maxent
