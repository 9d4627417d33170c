#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace sublin {

using VertexId = std::uint32_t;

/// Sentinel for "no vertex" (a NULL oracle answer, or an unmatched slot).
inline constexpr VertexId kNullVertex = std::numeric_limits<VertexId>::max();

enum class Side : std::uint8_t { left, right };

struct Edge {
  VertexId left = 0;
  VertexId right = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Bipartite multigraph with ordered adjacency lists.
 *
 * Vertex ids are dense: [0, left_count) is side L, [left_count,
 * left_count + right_count) is side R. Each vertex owns a contiguous block of
 * the entry array; the order inside a block is the adjacency-list oracle's
 * answer order and is part of the graph's identity. Blocks may be laid out
 * in any order, which lets generators fill them without an intermediate edge
 * list.
 *
 * Immutable after construction.
 */
class BipartiteMultigraph {
 public:
  BipartiteMultigraph() = default;

  BipartiteMultigraph(std::size_t left_count, std::size_t right_count,
                      std::vector<std::uint64_t> block_start,
                      std::vector<std::uint32_t> degree,
                      std::vector<VertexId> entries)
      : left_count_(left_count),
        right_count_(right_count),
        block_start_(std::move(block_start)),
        degree_(std::move(degree)),
        entries_(std::move(entries)) {
    if (block_start_.size() != vertex_count() || degree_.size() != vertex_count())
      throw GraphError("block table size does not match vertex count");
    for (std::size_t v = 0; v < vertex_count(); ++v)
      if (block_start_[v] + degree_[v] > entries_.size())
        throw GraphError("adjacency block of vertex " + std::to_string(v) +
                         " exceeds entry array");
  }

  /// Adjacency order follows the order of `edges`, per endpoint.
  static BipartiteMultigraph from_edges(std::size_t left_count,
                                        std::size_t right_count,
                                        std::span<const Edge> edges) {
    const std::size_t n = left_count + right_count;
    std::vector<std::uint32_t> degree(n, 0);
    for (const Edge& e : edges) {
      if (e.left >= left_count || e.right < left_count || e.right >= n)
        throw GraphError("edge (" + std::to_string(e.left) + ", " +
                         std::to_string(e.right) + ") is not L-R");
      ++degree[e.left];
      ++degree[e.right];
    }
    std::vector<std::uint64_t> start(n, 0);
    std::uint64_t cursor = 0;
    for (std::size_t v = 0; v < n; ++v) {
      start[v] = cursor;
      cursor += degree[v];
    }
    std::vector<VertexId> entries(cursor);
    std::vector<std::uint32_t> fill(n, 0);
    for (const Edge& e : edges) {
      entries[start[e.left] + fill[e.left]++] = e.right;
      entries[start[e.right] + fill[e.right]++] = e.left;
    }
    return BipartiteMultigraph(left_count, right_count, std::move(start),
                               std::move(degree), std::move(entries));
  }

  /// Builds from explicit per-vertex lists and checks every invariant.
  static BipartiteMultigraph from_adjacency(
      std::size_t left_count, std::size_t right_count,
      const std::vector<std::vector<VertexId>>& lists) {
    const std::size_t n = left_count + right_count;
    if (lists.size() != n)
      throw GraphError("expected " + std::to_string(n) + " adjacency lists, got " +
                       std::to_string(lists.size()));
    std::vector<std::uint64_t> start(n, 0);
    std::vector<std::uint32_t> degree(n, 0);
    std::vector<VertexId> entries;
    for (std::size_t v = 0; v < n; ++v) {
      start[v] = entries.size();
      degree[v] = static_cast<std::uint32_t>(lists[v].size());
      entries.insert(entries.end(), lists[v].begin(), lists[v].end());
    }
    BipartiteMultigraph g(left_count, right_count, std::move(start),
                          std::move(degree), std::move(entries));
    g.validate();
    return g;
  }

  std::size_t left_count() const noexcept { return left_count_; }
  std::size_t right_count() const noexcept { return right_count_; }
  std::size_t vertex_count() const noexcept { return left_count_ + right_count_; }
  /// Number of edges counted with multiplicity.
  std::size_t edge_count() const noexcept { return entries_.size() / 2; }

  bool contains(VertexId v) const noexcept { return v < vertex_count(); }
  bool is_left(VertexId v) const noexcept { return v < left_count_; }
  Side side(VertexId v) const noexcept { return is_left(v) ? Side::left : Side::right; }

  std::size_t degree(VertexId v) const { return degree_[v]; }
  std::span<const std::uint32_t> degrees() const noexcept { return degree_; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {entries_.data() + block_start_[v], degree_[v]};
  }

  /// The `index`-th neighbor of v, 1-based; nullopt when index > deg(v).
  std::optional<VertexId> neighbor(VertexId v, std::uint64_t index) const {
    if (index == 0 || index > degree_[v]) return std::nullopt;
    return entries_[block_start_[v] + index - 1];
  }

  /// Every edge once, enumerated from the left side in adjacency order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (VertexId u = 0; u < left_count_; ++u)
      for (VertexId w : neighbors(u)) out.push_back({u, w});
    return out;
  }

  /// Throws GraphError on a bipartiteness or reverse-entry violation.
  void validate() const {
    const std::size_t n = vertex_count();
    std::size_t total = 0;
    for (VertexId v = 0; v < n; ++v) {
      total += degree_[v];
      for (VertexId w : neighbors(v)) {
        if (w >= n)
          throw GraphError("vertex " + std::to_string(v) + " lists unknown id " +
                           std::to_string(w));
        if (is_left(v) == is_left(w))
          throw GraphError("edge (" + std::to_string(v) + ", " + std::to_string(w) +
                           ") joins vertices on the same side");
      }
    }
    if (total % 2 != 0) throw GraphError("odd number of adjacency entries");
    // Multiplicity of (u, w) seen from u must equal multiplicity seen from w.
    std::unordered_map<std::uint64_t, std::int64_t> balance;
    balance.reserve(total / 2);
    for (VertexId u = 0; u < left_count_; ++u)
      for (VertexId w : neighbors(u)) ++balance[key(u, w)];
    for (VertexId w = static_cast<VertexId>(left_count_); w < n; ++w)
      for (VertexId u : neighbors(w)) --balance[key(u, w)];
    for (const auto& [k, count] : balance)
      if (count != 0)
        throw GraphError("edge (" + std::to_string(k >> 32) + ", " +
                         std::to_string(k & 0xffffffffULL) +
                         ") has asymmetric multiplicity");
  }

  friend bool operator==(const BipartiteMultigraph& a, const BipartiteMultigraph& b) {
    if (a.left_count_ != b.left_count_ || a.right_count_ != b.right_count_) return false;
    for (VertexId v = 0; v < a.vertex_count(); ++v) {
      auto x = a.neighbors(v);
      auto y = b.neighbors(v);
      if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return false;
    }
    return true;
  }

 private:
  static std::uint64_t key(VertexId u, VertexId w) {
    return (static_cast<std::uint64_t>(u) << 32) | w;
  }

  std::size_t left_count_ = 0;
  std::size_t right_count_ = 0;
  std::vector<std::uint64_t> block_start_;
  std::vector<std::uint32_t> degree_;
  std::vector<VertexId> entries_;
};

// Text format: "n_left n_right", then one line per vertex (left side first,
// then right side) listing neighbor ids in adjacency order. A file carrying
// only the n_left left lines is also accepted; the right-side order is then
// the order in which each right vertex appears while scanning the left lines.

inline void write_text(std::ostream& out, const BipartiteMultigraph& g) {
  out << g.left_count() << ' ' << g.right_count() << '\n';
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    bool first = true;
    for (VertexId w : g.neighbors(v)) {
      if (!first) out << ' ';
      out << w;
      first = false;
    }
    out << '\n';
  }
}

inline BipartiteMultigraph read_text(std::istream& in) {
  std::string line;
  std::size_t left = 0, right = 0;
  if (!std::getline(in, line)) throw GraphError("empty graph file");
  {
    std::istringstream header(line);
    if (!(header >> left >> right)) throw GraphError("bad header line: " + line);
  }
  std::vector<std::vector<VertexId>> lists;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::vector<VertexId> nbrs;
    std::uint64_t id = 0;
    while (row >> id) {
      if (id >= left + right)
        throw GraphError("neighbor id " + std::to_string(id) + " out of range");
      nbrs.push_back(static_cast<VertexId>(id));
    }
    if (!row.eof()) throw GraphError("malformed adjacency line: " + line);
    lists.push_back(std::move(nbrs));
  }
  // Trailing blank lines are written for isolated vertices, so only trim
  // beyond the expected count.
  while (lists.size() > left + right && lists.back().empty()) lists.pop_back();
  if (lists.size() == left) {
    lists.resize(left + right);
    for (VertexId u = 0; u < left; ++u)
      for (VertexId w : lists[u]) {
        if (w < left) throw GraphError("left vertex lists a left neighbor");
        lists[w].push_back(u);
      }
  } else if (lists.size() != left + right) {
    throw GraphError("expected " + std::to_string(left) + " or " +
                     std::to_string(left + right) + " adjacency lines, got " +
                     std::to_string(lists.size()));
  }
  return BipartiteMultigraph::from_adjacency(left, right, lists);
}

}  // namespace sublin
