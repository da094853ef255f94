#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "oracle.hpp"
#include "robustiv/clique.hpp"
#include "robustiv/rng.hpp"
#include "voting_patterns.hpp"

using namespace robustiv;

namespace {

using Adj = std::vector<std::vector<bool>>;

Adj random_graph(Rng& rng, int n, double p) {
  Adj a(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    a[i][i] = true;
    for (int j = i + 1; j < n; ++j) a[i][j] = a[j][i] = rng.uniform() < p;
  }
  return a;
}

}  // namespace

TEST_CASE("two maximum cliques in the overlapping pattern") {
  const auto c = max_cliques(VoteGraph(voting_patterns::overlapping()));
  REQUIRE(c.size() == 2);
  CHECK(c[0] == std::vector<int>{0, 1, 2, 3});
  CHECK(c[1] == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("one maximum clique in the separated pattern") {
  const auto c = max_cliques(VoteGraph(voting_patterns::separated()));
  REQUIRE(c.size() == 1);
  CHECK(c[0] == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("complete graph is its own clique") {
  const auto c = max_cliques(VoteGraph(Adj(5, std::vector<bool>(5, true))));
  REQUIRE(c.size() == 1);
  CHECK(c[0] == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("edgeless graph has one singleton clique per vertex") {
  Adj a(4, std::vector<bool>(4, false));
  for (int i = 0; i < 4; ++i) a[i][i] = true;
  CHECK(max_cliques(VoteGraph(a)).size() == 4);
}

TEST_CASE("invalid graphs are rejected") {
  CHECK_THROWS_AS(VoteGraph(Adj{}), Error);
  Adj asym = voting_patterns::separated();
  asym[0][5] = true;
  CHECK_THROWS_AS(VoteGraph{asym}, Error);
  Adj nodiag = voting_patterns::separated();
  nodiag[2][2] = false;
  CHECK_THROWS_AS(VoteGraph{nodiag}, Error);
  CHECK_THROWS_AS(VoteGraph(Adj(65, std::vector<bool>(65, true))), Error);
}

TEST_CASE("random graphs match exhaustive enumeration") {
  Rng rng(11);
  for (int g = 0; g < 100; ++g) {
    const int n = 1 + static_cast<int>(rng.below(14));
    const double p = 0.2 + 0.6 * rng.uniform();
    const Adj a = random_graph(rng, n, p);
    const auto got = max_cliques(VoteGraph(a));
    CHECK(got == oracle::brute_max_cliques(a));
    // Each clique is complete and cannot be extended.
    for (const auto& c : got) {
      for (int v = 0; v < n; ++v) {
        if (std::find(c.begin(), c.end(), v) != c.end()) continue;
        bool extends = true;
        for (int u : c) extends = extends && a[u][v];
        CHECK_FALSE(extends);
      }
    }
  }
}

TEST_CASE("relabeling vertices permutes the cliques") {
  Rng rng(12);
  for (int g = 0; g < 30; ++g) {
    const int n = 10;
    const Adj a = random_graph(rng, n, 0.5);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    Adj b(n, std::vector<bool>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b[perm[i]][perm[j]] = a[i][j];
    auto ca = max_cliques(VoteGraph(a));
    for (auto& c : ca) {
      for (int& v : c) v = perm[v];
      std::sort(c.begin(), c.end());
    }
    std::sort(ca.begin(), ca.end());
    CHECK(ca == max_cliques(VoteGraph(b)));
  }
}

TEST_CASE("64-vertex graphs are supported") {
  Rng rng(13);
  const Adj a = random_graph(rng, 64, 0.3);
  const auto c = max_cliques(VoteGraph(a));
  REQUIRE_FALSE(c.empty());
  for (const auto& s : c)
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j) CHECK(a[s[i]][s[j]]);
}
