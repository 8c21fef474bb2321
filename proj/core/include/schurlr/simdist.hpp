#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "schurlr/cost_model.hpp"
#include "schurlr/csr.hpp"
#include "schurlr/vector_ops.hpp"

namespace schurlr {

/// Contiguous ownership of global rows [offset(r), offset(r+1)) by rank r.
class RowLayout {
 public:
  RowLayout() : offsets_{0} {}

  /// First n mod p ranks own ceil(n/p) rows, the rest floor(n/p).
  static RowLayout balanced(Index n, int ranks);
  static RowLayout from_offsets(std::vector<Index> offsets);

  int ranks() const noexcept { return static_cast<int>(offsets_.size()) - 1; }
  Index size() const noexcept { return offsets_.back(); }
  Index begin(int r) const noexcept { return offsets_[r]; }
  Index end(int r) const noexcept { return offsets_[r + 1]; }
  Index local_size(int r) const noexcept { return offsets_[r + 1] - offsets_[r]; }
  Index max_local_size() const noexcept;
  int owner(Index global) const;
  std::span<const Index> offsets() const noexcept { return offsets_; }

  friend bool operator==(const RowLayout&, const RowLayout&) = default;

 private:
  std::vector<Index> offsets_;
};

/// The simulated message fabric. All ranks live in this process; every
/// collective is evaluated in fixed rank order and every message is counted.
class Fabric {
 public:
  explicit Fabric(int ranks);

  int ranks() const noexcept { return ranks_; }
  CommTrace& trace() noexcept { return trace_; }
  const CommTrace& trace() const noexcept { return trace_; }
  void reset_trace() noexcept { trace_.reset(); }

  /// Element-wise sum of one equal-length contribution per rank.
  template <Scalar T>
  std::vector<T> allreduce_sum(std::span<const std::vector<T>> contributions) {
    record_allreduce(contributions.empty() ? 0 : static_cast<Index>(contributions.front().size()));
    return sum_in_rank_order(contributions);
  }

  template <Scalar T>
  T allreduce_sum(std::span<const T> contributions) {
    record_allreduce(1);
    T s(0);
    for (const T& c : contributions) s += c;
    return s;
  }

  void record_p2p(int from, int to, Index words);
  void record_allreduce(Index words);
  void record_gather(Index words);
  void record_flops(std::int64_t critical_path_flops);

  template <Scalar T>
  static std::vector<T> sum_in_rank_order(std::span<const std::vector<T>> contributions) {
    if (contributions.empty()) return {};
    std::vector<T> out(contributions.front());
    for (std::size_t r = 1; r < contributions.size(); ++r) {
      require_same_size(contributions[r].size(), out.size(), "allreduce contribution");
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += contributions[r][i];
    }
    return out;
  }

 private:
  int ranks_;
  CommTrace trace_;
};

/// Sums per-rank contributions in rank order; counted on `fabric` when one is
/// attached. Results are bit-identical with and without a fabric.
template <Scalar T>
std::vector<T> reduce_sum(Fabric* fabric, std::span<const std::vector<T>> contributions) {
  if (fabric) return fabric->allreduce_sum<T>(contributions);
  return Fabric::sum_in_rank_order<T>(contributions);
}

template <Scalar T>
class DistVector {
 public:
  DistVector() = default;
  explicit DistVector(RowLayout layout) : layout_(std::move(layout)), local_(layout_.ranks()) {
    for (int r = 0; r < layout_.ranks(); ++r) local_[r].assign(layout_.local_size(r), T(0));
  }

  static DistVector from_global(RowLayout layout, std::span<const T> global) {
    require_same_size(global.size(), static_cast<std::size_t>(layout.size()), "DistVector::from_global");
    DistVector v(std::move(layout));
    for (int r = 0; r < v.layout_.ranks(); ++r)
      std::copy(global.begin() + v.layout_.begin(r), global.begin() + v.layout_.end(r), v.local_[r].begin());
    return v;
  }

  std::vector<T> to_global() const {
    std::vector<T> g;
    g.reserve(layout_.size());
    for (const auto& l : local_) g.insert(g.end(), l.begin(), l.end());
    return g;
  }

  const RowLayout& layout() const noexcept { return layout_; }
  std::vector<T>& local(int r) { return local_[r]; }
  const std::vector<T>& local(int r) const { return local_[r]; }

 private:
  RowLayout layout_;
  std::vector<std::vector<T>> local_;
};

/// Entries rank `receiver` needs from `owner` (global indices, ascending).
struct GatherRequest {
  int owner = 0;
  std::vector<Index> indices;
};

template <Scalar T>
struct RankBlock {
  CsrMatrix<T> diag;             ///< local rows x local cols
  CsrMatrix<T> offd;             ///< local rows x compacted exterior cols
  std::vector<Index> col_map;    ///< exterior column k -> global index
  std::vector<GatherRequest> recv;
};

/// Row-distributed matrix split into diagonal and off-diagonal parts.
template <Scalar T>
struct PartitionedSystem {
  RowLayout layout;
  std::vector<RankBlock<T>> ranks;

  /// Reassembles the global matrix from the per-rank parts.
  CsrMatrix<T> assemble() const {
    std::vector<Triplet<T>> entries;
    for (int r = 0; r < layout.ranks(); ++r) {
      const auto& blk = ranks[r];
      for (Index i = 0; i < blk.diag.rows(); ++i) {
        const Index gi = layout.begin(r) + i;
        const auto dc = blk.diag.row_cols(i);
        const auto dv = blk.diag.row_values(i);
        for (std::size_t k = 0; k < dc.size(); ++k) entries.push_back({gi, layout.begin(r) + dc[k], dv[k]});
        const auto oc = blk.offd.row_cols(i);
        const auto ov = blk.offd.row_values(i);
        for (std::size_t k = 0; k < oc.size(); ++k) entries.push_back({gi, blk.col_map[oc[k]], ov[k]});
      }
    }
    return CsrMatrix<T>::from_triplets(layout.size(), layout.size(), entries);
  }
};

template <Scalar T>
PartitionedSystem<T> partition_rows(const CsrMatrix<T>& a, const RowLayout& layout) {
  if (a.rows() != a.cols()) throw DimensionMismatch("partition_rows: matrix not square");
  require_same_size(static_cast<std::size_t>(layout.size()), static_cast<std::size_t>(a.rows()),
                    "partition_rows layout");
  PartitionedSystem<T> sys{layout, std::vector<RankBlock<T>>(layout.ranks())};
  for (int r = 0; r < layout.ranks(); ++r) {
    const Index lo = layout.begin(r), hi = layout.end(r);
    std::vector<Index> exterior;
    for (Index i = lo; i < hi; ++i)
      for (Index c : a.row_cols(i))
        if (c < lo || c >= hi) exterior.push_back(c);
    std::sort(exterior.begin(), exterior.end());
    exterior.erase(std::unique(exterior.begin(), exterior.end()), exterior.end());

    std::vector<Triplet<T>> diag, offd;
    for (Index i = lo; i < hi; ++i) {
      const auto cols = a.row_cols(i);
      const auto vals = a.row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] >= lo && cols[k] < hi) {
          diag.push_back({i - lo, cols[k] - lo, vals[k]});
        } else {
          const Index e = std::lower_bound(exterior.begin(), exterior.end(), cols[k]) - exterior.begin();
          offd.push_back({i - lo, e, vals[k]});
        }
      }
    }
    auto& blk = sys.ranks[r];
    blk.diag = CsrMatrix<T>::from_triplets(hi - lo, hi - lo, diag);
    blk.offd = CsrMatrix<T>::from_triplets(hi - lo, static_cast<Index>(exterior.size()), offd);
    for (Index g : exterior) {
      const int owner = layout.owner(g);
      if (blk.recv.empty() || blk.recv.back().owner != owner) blk.recv.push_back({owner, {}});
      blk.recv.back().indices.push_back(g);
    }
    blk.col_map = std::move(exterior);
  }
  return sys;
}

/// Default balanced row split over p ranks.
template <Scalar T>
PartitionedSystem<T> partition_rows(const CsrMatrix<T>& a, int p) {
  if (p < 1) throw std::invalid_argument("partition_rows: p must be >= 1");
  if (p > a.rows()) throw std::invalid_argument("partition_rows: more ranks than rows");
  return partition_rows(a, RowLayout::balanced(a.rows(), p));
}

/// y = A x. Each receiving rank gets one message per owner it needs entries
/// from; the message carries exactly those entries.
template <Scalar T>
DistVector<T> dist_spmv(const PartitionedSystem<T>& sys, const DistVector<T>& x, Fabric& fabric) {
  if (!(x.layout() == sys.layout)) throw DimensionMismatch("dist_spmv: layout mismatch");
  DistVector<T> y(sys.layout);
  std::int64_t max_flops = 0;
  for (int r = 0; r < sys.layout.ranks(); ++r) {
    const auto& blk = sys.ranks[r];
    std::vector<T> ext(blk.col_map.size());
    std::size_t pos = 0;
    for (const auto& req : blk.recv) {
      for (Index g : req.indices) ext[pos++] = x.local(req.owner)[g - sys.layout.begin(req.owner)];
      fabric.record_p2p(req.owner, r, static_cast<Index>(req.indices.size()));
    }
    auto& out = y.local(r);
    spmv_into<T>(blk.diag, x.local(r), out);
    if (blk.offd.cols() > 0) {
      std::vector<T> tmp(out.size());
      spmv_into<T>(blk.offd, ext, tmp);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += tmp[i];
    }
    max_flops = std::max<std::int64_t>(max_flops, 2 * (blk.diag.nnz() + blk.offd.nnz()));
  }
  fabric.record_flops(max_flops);
  return y;
}

/// Local partial dots followed by one single-word allreduce.
template <Scalar T>
T dist_dot(const DistVector<T>& x, const DistVector<T>& y, Fabric& fabric) {
  if (!(x.layout() == y.layout())) throw DimensionMismatch("dist_dot: layout mismatch");
  std::vector<T> partial(x.layout().ranks());
  for (int r = 0; r < x.layout().ranks(); ++r) partial[r] = dot<T>(x.local(r), y.local(r));
  fabric.record_flops(2 * x.layout().max_local_size());
  return fabric.allreduce_sum<T>(std::span<const T>(partial));
}

/// alpha x + y, purely local.
template <Scalar T>
DistVector<T> dist_axpy(T alpha, const DistVector<T>& x, const DistVector<T>& y, Fabric& fabric) {
  if (!(x.layout() == y.layout())) throw DimensionMismatch("dist_axpy: layout mismatch");
  DistVector<T> out(x.layout());
  for (int r = 0; r < x.layout().ranks(); ++r) out.local(r) = axpy<T>(alpha, x.local(r), y.local(r));
  fabric.record_flops(x.layout().max_local_size());
  return out;
}

/// Collects the whole vector on every rank (counted as one gather of the
/// global length per destination).
template <Scalar T>
std::vector<T> dist_gather(const DistVector<T>& x, Fabric& fabric) {
  fabric.record_gather(x.layout().size());
  return x.to_global();
}

/// Distributes a replicated vector into `layout` (counted as one scatter).
template <Scalar T>
DistVector<T> dist_scatter(const RowLayout& layout, std::span<const T> global, Fabric& fabric) {
  fabric.record_gather(layout.max_local_size());
  return DistVector<T>::from_global(layout, global);
}

}  // namespace schurlr
