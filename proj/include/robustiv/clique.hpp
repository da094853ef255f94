#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace robustiv {

/// Undirected graph over at most 64 vertices with bitset adjacency rows.
/// Every vertex is adjacent to itself.
class VoteGraph {
 public:
  static constexpr int kMaxVertices = 64;

  /// Throws InvalidArgument if `adj` is not square, not symmetric, lacks a
  /// true diagonal, or exceeds kMaxVertices; EmptyGraph if it has no rows.
  explicit VoteGraph(const std::vector<std::vector<bool>>& adj,
                     std::vector<std::string> labels = {});

  int size() const { return static_cast<int>(rows_.size()); }
  bool adjacent(int a, int b) const { return (rows_[a] >> b) & 1u; }
  std::uint64_t row(int v) const { return rows_[v]; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::uint64_t> rows_;
  std::vector<std::string> labels_;
};

/// Every clique of maximum cardinality, each sorted ascending, the list
/// sorted lexicographically. Bron-Kerbosch with pivoting over bitsets.
std::vector<std::vector<int>> max_cliques(const VoteGraph& g);

}  // namespace robustiv
