#include "robustiv/clique.hpp"

#include <algorithm>
#include <bit>

#include "robustiv/error.hpp"

namespace robustiv {

VoteGraph::VoteGraph(const std::vector<std::vector<bool>>& adj, std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  const auto n = adj.size();
  if (n == 0) throw Error(ErrorCode::EmptyGraph, "vote graph has no vertices");
  if (n > static_cast<std::size_t>(kMaxVertices))
    throw Error(ErrorCode::InvalidArgument, "vote graph is limited to 64 vertices");
  rows_.assign(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    if (adj[a].size() != n) throw Error(ErrorCode::InvalidArgument, "adjacency matrix must be square");
    if (!adj[a][a]) throw Error(ErrorCode::InvalidArgument, "adjacency diagonal must be true");
    for (std::size_t b = 0; b < n; ++b) {
      if (adj[a][b] != adj[b][a]) throw Error(ErrorCode::InvalidArgument, "adjacency matrix must be symmetric");
      if (adj[a][b]) rows_[a] |= std::uint64_t{1} << b;
    }
  }
  if (labels_.empty())
    for (std::size_t a = 0; a < n; ++a) labels_.push_back(std::to_string(a + 1));
  if (labels_.size() != n) throw Error(ErrorCode::InvalidArgument, "one label per vertex required");
}

namespace {

struct CliqueSearch {
  std::vector<std::uint64_t> nbr;  // adjacency without self loops
  std::vector<std::uint64_t> best;
  int best_size = 0;

  void expand(std::uint64_t r, std::uint64_t p, std::uint64_t x) {
    const int r_size = std::popcount(r);
    if (p == 0) {
      if (x != 0) return;  // not maximal
      if (r_size > best_size) {
        best_size = r_size;
        best.clear();
      }
      if (r_size == best_size) best.push_back(r);
      return;
    }
    // Maximal cliques smaller than the best found cannot matter.
    if (r_size + std::popcount(p) < best_size) return;

    // Pivot: the vertex of P u X with most neighbours in P.
    const std::uint64_t px = p | x;
    int pivot = std::countr_zero(px);
    int most = -1;
    for (std::uint64_t m = px; m; m &= m - 1) {
      const int u = std::countr_zero(m);
      const int c = std::popcount(p & nbr[u]);
      if (c > most) {
        most = c;
        pivot = u;
      }
    }
    for (std::uint64_t cand = p & ~nbr[pivot]; cand; cand &= cand - 1) {
      const int v = std::countr_zero(cand);
      const std::uint64_t bit = std::uint64_t{1} << v;
      expand(r | bit, p & nbr[v], x & nbr[v]);
      p &= ~bit;
      x |= bit;
    }
  }
};

}  // namespace

std::vector<std::vector<int>> max_cliques(const VoteGraph& g) {
  const int n = g.size();
  CliqueSearch search;
  search.nbr.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) search.nbr[v] = g.row(v) & ~(std::uint64_t{1} << v);
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  search.expand(0, all, 0);

  std::vector<std::vector<int>> out;
  for (std::uint64_t set : search.best) {
    std::vector<int> members;
    for (std::uint64_t m = set; m; m &= m - 1) members.push_back(std::countr_zero(m));
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace robustiv
