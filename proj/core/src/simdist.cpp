#include "schurlr/simdist.hpp"

#include <stdexcept>

namespace schurlr {

RowLayout RowLayout::balanced(Index n, int ranks) {
  if (ranks < 1) throw std::invalid_argument("RowLayout: ranks must be >= 1");
  if (n < 0) throw std::invalid_argument("RowLayout: negative size");
  RowLayout l;
  l.offsets_.assign(ranks + 1, 0);
  const Index base = n / ranks, extra = n % ranks;
  for (int r = 0; r < ranks; ++r) l.offsets_[r + 1] = l.offsets_[r] + base + (r < extra ? 1 : 0);
  return l;
}

RowLayout RowLayout::from_offsets(std::vector<Index> offsets) {
  if (offsets.size() < 2 || offsets.front() != 0) throw std::invalid_argument("RowLayout: bad offsets");
  for (std::size_t i = 1; i < offsets.size(); ++i)
    if (offsets[i] < offsets[i - 1]) throw std::invalid_argument("RowLayout: offsets must be non-decreasing");
  RowLayout l;
  l.offsets_ = std::move(offsets);
  return l;
}

Index RowLayout::max_local_size() const noexcept {
  Index m = 0;
  for (int r = 0; r < ranks(); ++r) m = std::max(m, local_size(r));
  return m;
}

int RowLayout::owner(Index global) const {
  if (global < 0 || global >= size()) throw std::out_of_range("RowLayout::owner: index out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

Fabric::Fabric(int ranks) : ranks_(ranks) {
  if (ranks < 1) throw std::invalid_argument("Fabric: ranks must be >= 1");
}

void Fabric::record_p2p(int from, int to, Index words) {
  if (from == to) return;
  ++trace_.p2p_messages;
  trace_.p2p_words += words;
}

void Fabric::record_allreduce(Index words) {
  ++trace_.allreduce_count;
  trace_.allreduce_words += words;
}

void Fabric::record_gather(Index words) {
  ++trace_.gather_count;
  trace_.gather_words += words;
}

void Fabric::record_flops(std::int64_t critical_path_flops) { trace_.flops += critical_path_flops; }

}  // namespace schurlr
