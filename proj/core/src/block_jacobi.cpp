#include "schurlr/block_jacobi.hpp"

#include <string>

#include "schurlr/reorder.hpp"
#include "schurlr/simdist.hpp"

namespace schurlr {

template <Scalar T>
BlockJacobi<T> BlockJacobi<T>::build(const CsrMatrix<T>& c, Index n_blocks, Real tau, Index lfil,
                                     Real shift_factor) {
  if (n_blocks < 1) throw std::invalid_argument("block_jacobi: n_blocks must be >= 1");
  if (c.rows() != c.cols()) throw DimensionMismatch("block_jacobi: matrix not square");
  BlockJacobi bj;
  const Index n = c.rows();
  bj.perm_ = rcm(build_graph(c));
  const CsrMatrix<T> pc = permute_symmetric(c, std::span<const Index>(bj.perm_));
  const Index nb = std::min(n_blocks, n);
  const RowLayout split = RowLayout::balanced(n, static_cast<int>(std::max<Index>(nb, 1)));
  bj.offsets_.assign(split.offsets().begin(), split.offsets().end());
  if (n == 0) return bj;
  for (Index b = 0; b < nb; ++b) {
    const Index lo = bj.offsets_[b], hi = bj.offsets_[b + 1];
    try {
      bj.blocks_.push_back(ilut(extract_block(pc, lo, hi, lo, hi), tau, lfil, shift_factor));
    } catch (const ZeroPivotError& e) {
      throw NumericalError("block_jacobi: block " + std::to_string(b) + ": " + e.what());
    }
  }
  return bj;
}

template <Scalar T>
Vector<T> BlockJacobi<T>::apply(std::span<const T> b) const {
  require_same_size(b.size(), perm_.size(), "block_jacobi apply");
  Vector<T> x(b.size());
  for (std::size_t i = 0; i < perm_.size(); ++i) x[i] = b[perm_[i]];
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const Index lo = offsets_[k], hi = offsets_[k + 1];
    lu_solve_inplace<T>(blocks_[k], std::span<T>(x.data() + lo, static_cast<std::size_t>(hi - lo)));
  }
  Vector<T> y(b.size());
  for (std::size_t i = 0; i < perm_.size(); ++i) y[perm_[i]] = x[i];
  return y;
}

template <Scalar T>
Index BlockJacobi<T>::nnz() const noexcept {
  Index s = 0;
  for (const auto& f : blocks_) s += f.nnz();
  return s;
}

template class BlockJacobi<Real>;
template class BlockJacobi<Complex>;

}  // namespace schurlr
