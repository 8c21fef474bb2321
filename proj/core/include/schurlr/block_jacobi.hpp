#pragma once

#include <span>
#include <vector>

#include "schurlr/ilut.hpp"

namespace schurlr {

/// RCM-reordered matrix cut into contiguous diagonal blocks; everything
/// outside the blocks is discarded.
template <Scalar T>
class BlockJacobi {
 public:
  BlockJacobi() = default;

  static BlockJacobi build(const CsrMatrix<T>& c, Index n_blocks, Real tau, Index lfil,
                           Real shift_factor = 0.0);

  Vector<T> apply(std::span<const T> b) const;

  Index size() const noexcept { return static_cast<Index>(perm_.size()); }
  Index block_count() const noexcept { return static_cast<Index>(blocks_.size()); }
  std::span<const Index> perm() const noexcept { return perm_; }
  std::span<const Index> offsets() const noexcept { return offsets_; }
  const IlutFactors<T>& block(Index b) const { return blocks_[b]; }
  Index nnz() const noexcept;

 private:
  std::vector<Index> perm_;  // new -> old
  std::vector<Index> offsets_;
  std::vector<IlutFactors<T>> blocks_;
};

}  // namespace schurlr
