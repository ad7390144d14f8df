#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "simpush/engine.hpp"
#include "simpush/graph.hpp"

namespace simpush {

// Converged SimRank values from iterating the defining recursion.
struct ExactSimRank {
  std::size_t n = 0;
  int iterations = 0;
  double c = 0.0;
  std::vector<double> values;  // row-major n*n, symmetric, unit diagonal

  double at(NodeId a, NodeId b) const { return values[static_cast<std::size_t>(a) * n + b]; }
};

// Iterates S_{k+1}(a,b) = c/(d_I(a) d_I(b)) * sum over in-neighbor pairs,
// with S(v,v) = 1 and zero rows for zero in-degree nodes. Refuses graphs
// larger than node_cap (quadratic memory). Symmetry is enforced by computing
// the upper triangle once and mirroring.
ExactSimRank exact_simrank(const DirectedGraph& g, double c, int iterations,
                           std::size_t node_cap = 2000);

struct PairEstimate {
  double value = 0.0;
  std::uint64_t samples = 0;
  double radius = 0.0;  // Hoeffding radius for the reported delta
};

// Monte-Carlo estimate of s(u,v): fraction of independent sqrt(c)-walk pairs
// that ever occupy the same node at the same step. Sample batches have fixed
// boundaries and per-batch RNG substreams, so the result does not depend on
// the number of worker threads.
PairEstimate mc_pair(const DirectedGraph& g, NodeId u, NodeId v, double c,
                     std::uint64_t n_samples, std::uint64_t seed, double delta_o = 1e-6,
                     int threads = 0);

// Batched mc_pair over every candidate target (nodes sharing a walk-reachable
// ancestor with u); everything else is zero.
SimRankVector mc_single_source(const DirectedGraph& g, NodeId u, double c,
                               std::uint64_t samples_per_target, std::uint64_t seed,
                               int threads = 0);

// CSV rows "u,v,s" with 12 significant digits.
void write_simrank_csv(const ExactSimRank& m, std::ostream& out);
void write_simrank_csv(const SimRankVector& v, std::ostream& out);

}  // namespace simpush
