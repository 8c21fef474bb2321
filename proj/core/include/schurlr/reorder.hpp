#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "schurlr/csr.hpp"

namespace schurlr {

/// Undirected graph without self loops, stored as sorted adjacency lists.
class AdjGraph {
 public:
  AdjGraph() : ptr_{0} {}
  /// Adjacency lists are sorted and deduplicated; self loops are removed.
  /// Throws if the lists are not symmetric.
  explicit AdjGraph(std::vector<std::vector<Index>> adjacency);

  Index size() const noexcept { return static_cast<Index>(ptr_.size()) - 1; }
  Index edge_count() const noexcept { return static_cast<Index>(adj_.size()) / 2; }
  Index degree(Index v) const noexcept { return ptr_[v + 1] - ptr_[v]; }
  std::span<const Index> neighbors(Index v) const noexcept {
    return {adj_.data() + ptr_[v], static_cast<std::size_t>(ptr_[v + 1] - ptr_[v])};
  }

  /// Subgraph induced by `vertices`; vertex k of the result is vertices[k].
  AdjGraph induced(std::span<const Index> vertices) const;

 private:
  std::vector<Index> ptr_;
  std::vector<Index> adj_;
};

/// Edge (i, j), i != j, iff A(i, j) or A(j, i) is stored.
template <Scalar T>
AdjGraph build_graph(const CsrMatrix<T>& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("build_graph: matrix not square");
  std::vector<std::vector<Index>> adj(a.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j : a.row_cols(i))
      if (i != j) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
  return AdjGraph(std::move(adj));
}

inline constexpr int kSeparator = -1;

/// p disjoint parts plus a vertex separator.
struct SeparatorPartition {
  int parts = 0;
  std::vector<int> part_of;  ///< 0..parts-1, or kSeparator
  std::vector<std::vector<Index>> part_vertices;
  std::vector<Index> separator;
  bool degenerate = false;  ///< some part is empty although |V| >= parts

  /// Largest over smallest non-empty part size.
  double imbalance() const;
};

/// Recursive BFS bisection; each edge cut is turned into a vertex separator
/// by taking the smaller boundary side. Ties go to the lowest vertex index.
SeparatorPartition pway_separator(const AdjGraph& g, int p);

/// Number of edges joining two distinct non-separator parts.
Index count_cross_edges(const AdjGraph& g, const SeparatorPartition& sp);
/// Cover, disjointness and zero cross edges.
bool is_valid_separator(const AdjGraph& g, const SeparatorPartition& sp);

/// Vertex of (near) maximal eccentricity in the component of `start`.
Index pseudo_peripheral_vertex(const AdjGraph& g, Index start);

/// Reverse Cuthill-McKee ordering (new position -> old vertex), every
/// component ordered from a pseudo-peripheral vertex.
std::vector<Index> rcm(const AdjGraph& g);

/// max |pos(i) - pos(j)| over edges for the ordering perm (new -> old).
Index bandwidth(const AdjGraph& g, std::span<const Index> perm);

struct LevelOrdering {
  Index size = 0;                 ///< n_l: size of C_{l-1}
  std::vector<Index> part_sizes;  ///< d_i per part, in block order
  Index separator_size = 0;       ///< s_l
  std::vector<Index> perm;        ///< new -> old, in C_{l-1} local indices
  double imbalance = 1.0;
  bool degenerate = false;

  Index interior_size() const;
};

/// Multilevel p-way ordering: interiors of level l come before its
/// interface, and level l+1 re-partitions that interface.
struct MultilevelOrdering {
  int requested_levels = 0;
  int parts = 0;
  std::vector<LevelOrdering> levels;
  std::vector<Index> perm;  ///< global new -> old

  int achieved_levels() const noexcept { return static_cast<int>(levels.size()); }
  /// Global offset where each level starts, plus the start of the last
  /// interface block and n.
  std::vector<Index> level_offsets() const;
};

/// Stops before level l >= 1 when the interface has fewer than 2p vertices
/// or partitioning it would not shrink it.
MultilevelOrdering multilevel_reorder(const AdjGraph& g, int levels, int p);

template <Scalar T>
MultilevelOrdering multilevel_reorder(const CsrMatrix<T>& a, int levels, int p) {
  return multilevel_reorder(build_graph(a), levels, p);
}

/// Text dump: header, one line per level, then the global permutation.
void write_ordering(std::ostream& out, const MultilevelOrdering& ord);

}  // namespace schurlr
