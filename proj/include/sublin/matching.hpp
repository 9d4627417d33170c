#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sublin/graph.hpp"

namespace sublin {

struct Matching {
  std::vector<Edge> edges;
  std::size_t size() const noexcept { return edges.size(); }
};

/// True when no vertex id occurs in two pairs.
inline bool is_matching(std::span<const Edge> edges) {
  std::vector<VertexId> ids;
  ids.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    ids.push_back(e.left);
    ids.push_back(e.right);
  }
  std::sort(ids.begin(), ids.end());
  return std::adjacent_find(ids.begin(), ids.end()) == ids.end();
}

namespace detail {

/// Hopcroft-Karp state over the left side; mate arrays are indexed by global id.
class HopcroftKarp {
 public:
  explicit HopcroftKarp(const BipartiteMultigraph& g)
      : g_(g),
        mate_(g.vertex_count(), kNullVertex),
        layer_(g.left_count(), kUnreached),
        cursor_(g.left_count(), 0) {}

  void run() {
    // Greedy warm start shortens the phase count on large instances.
    for (VertexId u = 0; u < g_.left_count(); ++u)
      for (VertexId w : g_.neighbors(u))
        if (mate_[w] == kNullVertex) {
          mate_[u] = w;
          mate_[w] = u;
          break;
        }
    while (build_layers()) {
      std::fill(cursor_.begin(), cursor_.end(), 0);
      for (VertexId u = 0; u < g_.left_count(); ++u)
        if (mate_[u] == kNullVertex) augment_from(u);
    }
  }

  const std::vector<VertexId>& mates() const { return mate_; }

 private:
  static constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

  bool build_layers() {
    std::vector<VertexId> queue;
    queue.reserve(g_.left_count());
    for (VertexId u = 0; u < g_.left_count(); ++u) {
      if (mate_[u] == kNullVertex) {
        layer_[u] = 0;
        queue.push_back(u);
      } else {
        layer_[u] = kUnreached;
      }
    }
    bool found_free = false;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const VertexId u = queue[head];
      for (VertexId w : g_.neighbors(u)) {
        const VertexId next = mate_[w];
        if (next == kNullVertex) {
          found_free = true;
        } else if (layer_[next] == kUnreached) {
          layer_[next] = layer_[u] + 1;
          queue.push_back(next);
        }
      }
    }
    return found_free;
  }

  // Iterative layered DFS; augmenting paths can be long on large instances.
  bool augment_from(VertexId root) {
    std::vector<VertexId> path{root};
    std::vector<VertexId> via;
    while (!path.empty()) {
      const VertexId u = path.back();
      const auto nbrs = g_.neighbors(u);
      bool advanced = false;
      while (cursor_[u] < nbrs.size()) {
        const VertexId w = nbrs[cursor_[u]++];
        const VertexId next = mate_[w];
        if (next == kNullVertex) {
          via.push_back(w);
          for (std::size_t i = 0; i < path.size(); ++i) {
            mate_[path[i]] = via[i];
            mate_[via[i]] = path[i];
          }
          return true;
        }
        if (layer_[next] == layer_[u] + 1) {
          via.push_back(w);
          path.push_back(next);
          advanced = true;
          break;
        }
      }
      if (!advanced) {
        layer_[u] = kUnreached;
        path.pop_back();
        if (!via.empty()) via.pop_back();
      }
    }
    return false;
  }

  const BipartiteMultigraph& g_;
  std::vector<VertexId> mate_;
  std::vector<std::uint32_t> layer_;
  std::vector<std::size_t> cursor_;
};

}  // namespace detail

/// Maximum matching via Hopcroft-Karp phases. Deterministic for a fixed graph;
/// edges are reported in increasing left-vertex order.
inline Matching maximum_matching(const BipartiteMultigraph& g) {
  detail::HopcroftKarp hk(g);
  hk.run();
  Matching m;
  const auto& mate = hk.mates();
  for (VertexId u = 0; u < g.left_count(); ++u)
    if (mate[u] != kNullVertex) m.edges.push_back({u, mate[u]});
  return m;
}

/// Greedy maximal matching over an edge stream, processed in stream order.
/// Ids are treated as one global id space, so an edge is skipped when either
/// endpoint is already matched.
inline Matching greedy_maximal_matching(std::span<const Edge> stream) {
  Matching m;
  if (stream.empty()) return m;
  VertexId max_id = 0;
  for (const Edge& e : stream) max_id = std::max({max_id, e.left, e.right});
  std::vector<char> used(static_cast<std::size_t>(max_id) + 1, 0);
  for (const Edge& e : stream) {
    if (e.left == e.right || used[e.left] || used[e.right]) continue;
    used[e.left] = used[e.right] = 1;
    m.edges.push_back(e);
  }
  return m;
}

/// Minimum vertex cover of a bipartite graph by König's construction from a
/// maximum matching: with Z the vertices reachable from free left vertices by
/// alternating paths, the cover is (L \ Z) ∪ (R ∩ Z). Sorted ids.
inline std::vector<VertexId> minimum_vertex_cover(const BipartiteMultigraph& g) {
  detail::HopcroftKarp hk(g);
  hk.run();
  const auto& mate = hk.mates();
  std::vector<char> reached(g.vertex_count(), 0);
  std::vector<VertexId> queue;
  for (VertexId u = 0; u < g.left_count(); ++u)
    if (mate[u] == kNullVertex) {
      reached[u] = 1;
      queue.push_back(u);
    }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VertexId u = queue[head];
    for (VertexId w : g.neighbors(u)) {
      if (reached[w]) continue;
      reached[w] = 1;
      const VertexId back = mate[w];
      if (back != kNullVertex && !reached[back]) {
        reached[back] = 1;
        queue.push_back(back);
      }
    }
  }
  std::vector<VertexId> cover;
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (g.is_left(v) ? !reached[v] : reached[v]) cover.push_back(v);
  return cover;
}

inline std::size_t min_vertex_cover_size(const BipartiteMultigraph& g) {
  return minimum_vertex_cover(g).size();
}

inline bool is_vertex_cover(const BipartiteMultigraph& g, std::span<const VertexId> cover) {
  std::vector<char> in(g.vertex_count(), 0);
  for (VertexId v : cover) in[v] = 1;
  for (VertexId u = 0; u < g.left_count(); ++u)
    for (VertexId w : g.neighbors(u))
      if (!in[u] && !in[w]) return false;
  return true;
}

}  // namespace sublin
