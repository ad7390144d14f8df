#pragma once

#include <utility>
#include <vector>

#include "simpush/graph.hpp"
#include "simpush/rng.hpp"

namespace simpush::testutil {

// Erdos-Renyi digraph: each ordered pair (a,b), a != b, is an edge with
// probability p.
inline DirectedGraph er_digraph(std::size_t n, double p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  for (std::uint64_t a = 0; a < n; ++a)
    for (std::uint64_t b = 0; b < n; ++b)
      if (a != b && rng.bernoulli(p)) edges.emplace_back(a, b);
  return build_graph(n, std::move(edges));
}

// Preferential-attachment flavored digraph: node v attaches `deg` out-edges
// to earlier nodes, picking either a uniform earlier node or the source of a
// previously placed edge (which biases toward high in-degree). Seed clique
// of size deg+1.
inline DirectedGraph powerlaw_digraph(std::size_t n, std::size_t deg, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  std::vector<std::uint64_t> targets;  // multiset of past edge heads
  std::size_t n0 = deg + 1;
  for (std::uint64_t a = 0; a < n0; ++a)
    for (std::uint64_t b = 0; b < n0; ++b)
      if (a != b) {
        edges.emplace_back(a, b);
        targets.push_back(b);
      }
  for (std::uint64_t v = n0; v < n; ++v) {
    for (std::size_t e = 0; e < deg; ++e) {
      std::uint64_t t = rng.bernoulli(0.5)
                            ? targets[rng.below(static_cast<std::uint32_t>(targets.size()))]
                            : rng.below(static_cast<std::uint32_t>(v));
      edges.emplace_back(v, t);
      targets.push_back(t);
    }
  }
  return build_graph(n, std::move(edges));
}

inline DirectedGraph from_edges(std::size_t n,
                                std::vector<std::pair<std::uint64_t, std::uint64_t>> edges) {
  return build_graph(n, std::move(edges));
}

}  // namespace simpush::testutil
