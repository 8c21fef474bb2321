#include "schurlr/reorder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <queue>

namespace schurlr {

AdjGraph::AdjGraph(std::vector<std::vector<Index>> adjacency) {
  const Index n = static_cast<Index>(adjacency.size());
  ptr_.assign(n + 1, 0);
  for (Index v = 0; v < n; ++v) {
    auto& list = adjacency[v];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    list.erase(std::remove(list.begin(), list.end(), v), list.end());
    for (Index u : list)
      if (u < 0 || u >= n) throw std::out_of_range("AdjGraph: neighbor out of range");
    ptr_[v + 1] = ptr_[v] + static_cast<Index>(list.size());
  }
  adj_.reserve(ptr_[n]);
  for (auto& list : adjacency) adj_.insert(adj_.end(), list.begin(), list.end());
  for (Index v = 0; v < n; ++v)
    for (Index u : neighbors(v)) {
      const auto nb = neighbors(u);
      if (!std::binary_search(nb.begin(), nb.end(), v)) throw std::invalid_argument("AdjGraph: adjacency not symmetric");
    }
}

AdjGraph AdjGraph::induced(std::span<const Index> vertices) const {
  std::vector<Index> local(size(), -1);
  for (std::size_t k = 0; k < vertices.size(); ++k) local[vertices[k]] = static_cast<Index>(k);
  std::vector<std::vector<Index>> adj(vertices.size());
  for (std::size_t k = 0; k < vertices.size(); ++k)
    for (Index u : neighbors(vertices[k]))
      if (local[u] >= 0) adj[k].push_back(local[u]);
  return AdjGraph(std::move(adj));
}

double SeparatorPartition::imbalance() const {
  Index lo = std::numeric_limits<Index>::max(), hi = 0;
  for (const auto& p : part_vertices) {
    const Index s = static_cast<Index>(p.size());
    if (s == 0) continue;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return hi == 0 ? 1.0 : static_cast<double>(hi) / static_cast<double>(lo);
}

namespace {

// BFS from root over vertices not yet marked; returns the visit order and
// fills level[] for visited vertices. Neighbors are visited in index order.
std::vector<Index> bfs(const AdjGraph& g, Index root, std::vector<Index>& level) {
  std::vector<Index> order{root};
  level[root] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const Index v = order[head];
    for (Index u : g.neighbors(v))
      if (level[u] < 0) {
        level[u] = level[v] + 1;
        order.push_back(u);
      }
  }
  return order;
}

struct Bisection {
  std::vector<int> side;  // 0, 1 or kSeparator, per local vertex
  Index cut_edges = 0;
  Index separator = 0;

  bool better_than(const Bisection& o) const {
    return cut_edges != o.cut_edges ? cut_edges < o.cut_edges : separator < o.separator;
  }
};

// Splits `order` at `cut` and turns the edge cut into a vertex separator by
// taking the smaller boundary side (the side holding the lowest index on ties).
Bisection cut_order(const AdjGraph& h, const std::vector<Index>& order, Index cut) {
  const Index n = h.size();
  Bisection out;
  out.side.assign(n, 1);
  for (Index k = 0; k < cut; ++k) out.side[order[k]] = 0;
  std::vector<Index> boundary0, boundary1;
  for (Index v = 0; v < n; ++v) {
    bool on_boundary = false;
    for (Index u : h.neighbors(v))
      if (out.side[u] != out.side[v]) {
        on_boundary = true;
        if (out.side[v] == 0) ++out.cut_edges;
      }
    if (on_boundary) (out.side[v] == 0 ? boundary0 : boundary1).push_back(v);
  }
  bool take0 = boundary0.size() < boundary1.size();
  if (boundary0.size() == boundary1.size()) take0 = boundary0.empty() || boundary0.front() < boundary1.front();
  for (Index v : (take0 ? boundary0 : boundary1)) out.side[v] = kSeparator;
  out.separator = static_cast<Index>(take0 ? boundary0.size() : boundary1.size());
  return out;
}

std::vector<Index> sorted_by_key(const std::vector<Index>& key) {
  std::vector<Index> order(key.size());
  for (std::size_t v = 0; v < order.size(); ++v) order[v] = static_cast<Index>(v);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return key[a] < key[b]; });
  return order;
}

// Candidate level functions on a connected graph: BFS distance from a few
// extremal landmarks, and differences of two such distances. The difference
// acts as a coordinate along the landmark pair, which on grids gives
// axis-aligned cuts. The candidate with the fewest cut edges wins.
Bisection bisect_connected(const AdjGraph& h, Index cut) {
  const Index n = h.size();
  constexpr int kLandmarks = 6;
  std::vector<Index> landmarks{pseudo_peripheral_vertex(h, 0)};
  std::vector<std::vector<Index>> dist;
  auto distances = [&](Index root) {
    std::vector<Index> level(n, -1);
    bfs(h, root, level);
    return level;
  };
  dist.push_back(distances(landmarks[0]));

  Index min_degree = std::numeric_limits<Index>::max();
  for (Index v = 0; v < n; ++v) min_degree = std::min(min_degree, h.degree(v));
  while (static_cast<int>(landmarks.size()) < kLandmarks) {
    Index best = -1, best_d = 0;
    for (Index v = 0; v < n; ++v) {
      if (h.degree(v) != min_degree) continue;
      Index d = std::numeric_limits<Index>::max();
      for (const auto& dl : dist) d = std::min(d, dl[v]);
      if (d > best_d) {
        best_d = d;
        best = v;
      }
    }
    if (best < 0) break;
    landmarks.push_back(best);
    dist.push_back(distances(best));
  }

  Bisection best = cut_order(h, sorted_by_key(dist[0]), cut);
  auto consider = [&](const std::vector<Index>& key) {
    Bisection b = cut_order(h, sorted_by_key(key), cut);
    if (b.better_than(best)) best = std::move(b);
  };
  for (std::size_t a = 1; a < dist.size(); ++a) consider(dist[a]);
  std::vector<Index> key(n);
  for (std::size_t a = 0; a < dist.size(); ++a)
    for (std::size_t b = 0; b < dist.size(); ++b) {
      if (a == b) continue;
      for (Index v = 0; v < n; ++v) key[v] = dist[a][v] - dist[b][v];
      consider(key);
    }
  return best;
}

Bisection bisect(const AdjGraph& h, double fraction) {
  const Index n = h.size();
  Index cut = static_cast<Index>(std::ceil(fraction * static_cast<double>(n)));
  cut = std::clamp<Index>(cut, n > 1 ? 1 : 0, n > 1 ? n - 1 : n);

  std::vector<Index> order;
  std::vector<Index> boundaries;  // positions where a new component starts
  std::vector<Index> level(n, -1);
  for (Index v = 0; v < n; ++v) {
    if (level[v] >= 0) continue;
    const Index root = pseudo_peripheral_vertex(h, v);
    if (!order.empty()) boundaries.push_back(static_cast<Index>(order.size()));
    for (Index u : bfs(h, root, level)) order.push_back(u);
  }
  if (boundaries.empty()) return bisect_connected(h, cut);

  Index best = -1;
  for (Index b : boundaries) {
    if (std::abs(static_cast<double>(b - cut)) <= n / 4.0 &&
        (best < 0 || std::abs(b - cut) < std::abs(best - cut))) {
      best = b;
    }
  }
  return cut_order(h, order, best >= 0 ? best : cut);
}

void split(const AdjGraph& g, std::vector<Index> vertices, int nparts, int base, SeparatorPartition& sp) {
  if (vertices.empty()) return;
  if (nparts == 1) {
    for (Index v : vertices) sp.part_of[v] = base;
    return;
  }
  const int p0 = (nparts + 1) / 2;
  const AdjGraph h = g.induced(vertices);
  const Bisection b = bisect(h, static_cast<double>(p0) / nparts);
  std::vector<Index> side0, side1;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    if (b.side[k] == kSeparator) {
      sp.part_of[vertices[k]] = kSeparator;
    } else {
      (b.side[k] == 0 ? side0 : side1).push_back(vertices[k]);
    }
  }
  split(g, std::move(side0), p0, base, sp);
  split(g, std::move(side1), nparts - p0, base + p0, sp);
}

}  // namespace

SeparatorPartition pway_separator(const AdjGraph& g, int p) {
  if (p < 1) throw std::invalid_argument("pway_separator: p must be >= 1");
  if (g.size() == 0) throw std::invalid_argument("pway_separator: empty graph");
  SeparatorPartition sp;
  sp.parts = p;
  sp.part_of.assign(g.size(), 0);
  std::vector<Index> all(g.size());
  for (Index v = 0; v < g.size(); ++v) all[v] = v;
  split(g, std::move(all), p, 0, sp);
  sp.part_vertices.assign(p, {});
  for (Index v = 0; v < g.size(); ++v) {
    if (sp.part_of[v] == kSeparator) {
      sp.separator.push_back(v);
    } else {
      sp.part_vertices[sp.part_of[v]].push_back(v);
    }
  }
  if (g.size() >= p)
    for (const auto& part : sp.part_vertices)
      if (part.empty()) sp.degenerate = true;
  return sp;
}

Index count_cross_edges(const AdjGraph& g, const SeparatorPartition& sp) {
  Index cross = 0;
  for (Index v = 0; v < g.size(); ++v)
    for (Index u : g.neighbors(v))
      if (u > v && sp.part_of[u] != kSeparator && sp.part_of[v] != kSeparator && sp.part_of[u] != sp.part_of[v])
        ++cross;
  return cross;
}

bool is_valid_separator(const AdjGraph& g, const SeparatorPartition& sp) {
  if (static_cast<Index>(sp.part_of.size()) != g.size()) return false;
  std::vector<int> seen(g.size(), 0);
  for (std::size_t p = 0; p < sp.part_vertices.size(); ++p)
    for (Index v : sp.part_vertices[p]) {
      if (v < 0 || v >= g.size() || sp.part_of[v] != static_cast<int>(p)) return false;
      ++seen[v];
    }
  for (Index v : sp.separator) {
    if (v < 0 || v >= g.size() || sp.part_of[v] != kSeparator) return false;
    ++seen[v];
  }
  for (int s : seen)
    if (s != 1) return false;
  return count_cross_edges(g, sp) == 0;
}

Index pseudo_peripheral_vertex(const AdjGraph& g, Index start) {
  std::vector<Index> level(g.size(), -1);
  Index root = start;
  auto order = bfs(g, root, level);
  Index ecc = level[order.back()];
  while (true) {
    // lowest-degree vertex of the last level, lowest index on ties
    Index cand = -1;
    for (Index v : order)
      if (level[v] == ecc && (cand < 0 || g.degree(v) < g.degree(cand) ||
                              (g.degree(v) == g.degree(cand) && v < cand)))
        cand = v;
    for (Index v : order) level[v] = -1;
    auto next = bfs(g, cand, level);
    const Index next_ecc = level[next.back()];
    if (next_ecc <= ecc) {
      for (Index v : next) level[v] = -1;
      return root;
    }
    root = cand;
    ecc = next_ecc;
    order = std::move(next);
  }
}

std::vector<Index> rcm(const AdjGraph& g) {
  const Index n = g.size();
  std::vector<Index> order;
  order.reserve(n);
  std::vector<char> visited(n, 0);
  std::vector<Index> nb;
  for (Index v = 0; v < n; ++v) {
    if (visited[v]) continue;
    const Index root = pseudo_peripheral_vertex(g, v);
    std::size_t head = order.size();
    order.push_back(root);
    visited[root] = 1;
    for (; head < order.size(); ++head) {
      nb.clear();
      for (Index u : g.neighbors(order[head]))
        if (!visited[u]) nb.push_back(u);
      std::sort(nb.begin(), nb.end(), [&](Index a, Index b) {
        return g.degree(a) != g.degree(b) ? g.degree(a) < g.degree(b) : a < b;
      });
      for (Index u : nb) {
        visited[u] = 1;
        order.push_back(u);
      }
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

Index bandwidth(const AdjGraph& g, std::span<const Index> perm) {
  std::vector<Index> pos(g.size());
  for (std::size_t k = 0; k < perm.size(); ++k) pos[perm[k]] = static_cast<Index>(k);
  Index bw = 0;
  for (Index v = 0; v < g.size(); ++v)
    for (Index u : g.neighbors(v)) bw = std::max(bw, std::abs(pos[u] - pos[v]));
  return bw;
}

Index LevelOrdering::interior_size() const { return size - separator_size; }

std::vector<Index> MultilevelOrdering::level_offsets() const {
  std::vector<Index> off{0};
  for (const auto& l : levels) off.push_back(off.back() + l.interior_size());
  off.push_back(static_cast<Index>(perm.size()));
  return off;
}

MultilevelOrdering multilevel_reorder(const AdjGraph& g, int levels, int p) {
  if (levels < 1) throw std::invalid_argument("multilevel_reorder: levels must be >= 1");
  if (p < 1) throw std::invalid_argument("multilevel_reorder: p must be >= 1");
  MultilevelOrdering ord;
  ord.requested_levels = levels;
  ord.parts = p;
  ord.perm.reserve(g.size());

  std::vector<Index> current(g.size());
  for (Index v = 0; v < g.size(); ++v) current[v] = v;

  for (int l = 0; l < levels; ++l) {
    const Index n_l = static_cast<Index>(current.size());
    if (l > 0 && n_l < 2 * static_cast<Index>(p)) break;
    if (n_l == 0) break;
    const AdjGraph h = g.induced(current);
    const SeparatorPartition sp = pway_separator(h, p);
    if (l > 0 && static_cast<Index>(sp.separator.size()) >= n_l) break;

    LevelOrdering lev;
    lev.size = n_l;
    lev.separator_size = static_cast<Index>(sp.separator.size());
    lev.imbalance = sp.imbalance();
    lev.degenerate = sp.degenerate;
    lev.perm.reserve(n_l);
    for (const auto& part : sp.part_vertices) {
      lev.part_sizes.push_back(static_cast<Index>(part.size()));
      if (part.empty()) continue;
      const auto local = rcm(h.induced(part));
      for (Index k : local) lev.perm.push_back(part[k]);
    }
    for (Index v : sp.separator) lev.perm.push_back(v);
    for (Index k = 0; k < lev.interior_size(); ++k) ord.perm.push_back(current[lev.perm[k]]);

    std::vector<Index> next;
    next.reserve(sp.separator.size());
    for (Index v : sp.separator) next.push_back(current[v]);
    current = std::move(next);
    ord.levels.push_back(std::move(lev));
  }
  ord.perm.insert(ord.perm.end(), current.begin(), current.end());
  return ord;
}

void write_ordering(std::ostream& out, const MultilevelOrdering& ord) {
  out << "# multilevel ordering\n";
  out << "n " << ord.perm.size() << "\nparts " << ord.parts << "\nlevels " << ord.achieved_levels() << '\n';
  const auto offsets = ord.level_offsets();
  for (int l = 0; l < ord.achieved_levels(); ++l) {
    const auto& lev = ord.levels[l];
    out << "level " << l << " start " << offsets[l] << " size " << lev.size << " interface " << lev.separator_size
        << " parts";
    for (Index d : lev.part_sizes) out << ' ' << d;
    out << '\n';
  }
  out << "last_interface_start " << offsets[ord.achieved_levels()] << '\n';
  out << "perm\n";
  for (Index v : ord.perm) out << v << '\n';
}

}  // namespace schurlr
