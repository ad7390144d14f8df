#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "simpush/graph.hpp"
#include "simpush/params.hpp"
#include "simpush/rng.hpp"

namespace simpush {

// Per-step visit counts over the sampled sqrt(c)-walks; levels[l] is sorted
// by node id. levels[0] is always {(u, n_walks)}.
struct WalkLevelCounts {
  std::vector<std::vector<std::pair<NodeId, std::uint64_t>>> levels;
};

// One level of the source graph: nodes sorted ascending with their hitting
// probabilities h^(l)(u, node). The level edge set is implicit: an edge runs
// from a level-(l+1) node x to a level-l node v exactly when v in O(x) and v
// occurs at level l (level-l nodes below the max level are always expanded
// toward all their in-neighbors).
struct SourceLevel {
  std::vector<NodeId> nodes;
  std::vector<double> hit;

  // Returns -1 when the node does not occur at this level.
  std::ptrdiff_t index_of(NodeId v) const;
  bool contains(NodeId v) const { return index_of(v) >= 0; }
  double hit_of(NodeId v) const;
};

struct SourceGraph {
  int max_level = 0;  // L actually used
  std::vector<SourceLevel> levels;  // size max_level + 1
};

struct AttentionOccurrence {
  NodeId node = 0;
  double hit = 0.0;      // h^(l)(u, node)
  double gamma = 1.0;    // last-meeting probability, filled by stage 2
  double residue = 0.0;  // hit * gamma, filled by compute_residues
};

// Attention occurrences per level (level 0 stays empty). Each occurrence has
// a dense id: offsets[l] + index within the level.
struct AttentionSets {
  std::vector<std::vector<AttentionOccurrence>> levels;
  std::vector<std::uint32_t> offsets;

  std::uint32_t total() const { return offsets.empty() ? 0 : offsets.back(); }
  std::uint32_t id_of(int level, std::size_t idx) const {
    return offsets[level] + static_cast<std::uint32_t>(idx);
  }
  int level_of(std::uint32_t id) const;
  const AttentionOccurrence& occurrence(std::uint32_t id) const;
  AttentionOccurrence& occurrence(std::uint32_t id);
  // Id of the occurrence (level, node), or -1 if it is not an attention node.
  std::ptrdiff_t find(int level, NodeId node) const;

  void rebuild_offsets();
};

// In-source-graph hitting probabilities, dense per row. rows[l][node] is
// indexed by attention occurrence id; the entry at an id living on level
// l+i holds h~^(i)(node at level l, target). Dense rows keep the level
// sweep and the first-meeting recursion cache-friendly.
struct HitTable {
  std::uint32_t width = 0;  // att.total()
  std::vector<std::unordered_map<NodeId, std::vector<double>>> rows;

  const std::vector<double>* row(int level, NodeId node) const;
  double value(int level, NodeId node, std::uint32_t att_id) const;
  // The row of an attention occurrence itself.
  const std::vector<double>* attention_row(const AttentionSets& att,
                                           std::uint32_t att_id) const;
};

struct SimRankVector {
  NodeId query = 0;
  std::vector<double> scores;  // dense, scores[query] == 1
};

struct QueryStats {
  int level = 0;                       // sampled L
  std::uint64_t attention_occurrences = 0;
  double seconds_sampling = 0.0;
  double seconds_source_push = 0.0;
  double seconds_gamma = 0.0;          // hitting table + last-meeting stage
  double seconds_reverse_push = 0.0;
};

// Stage 1a: simulate params.n_walks sqrt(c)-walks from u, counting visits per
// (step, node) up to params.max_level steps. The walk population is advanced
// level-synchronously (survivor counts are binomial, neighbor choices
// multinomial), which draws from exactly the same distribution as independent
// per-walk simulation. Deterministic for a given rng state.
WalkLevelCounts sample_level_counts(const DirectedGraph& g, NodeId u,
                                    const QueryParams& params, SplitMix64& rng);

// Stage 1b: largest step l <= L* where some node's empirical frequency
// reaches eps_h / 2 (inclusive); 0 when no level qualifies.
int detect_max_level(const WalkLevelCounts& counts, const QueryParams& params);

struct SourcePushResult {
  SourceGraph sg;
  AttentionSets att;
};

// Stage 1c: deterministic level-wise propagation of hitting probabilities
// from u for at most L levels, collecting attention occurrences
// (h^(l)(u,w) >= eps_h) on the way.
SourcePushResult source_push(const DirectedGraph& g, NodeId u, int L,
                             const QueryParams& params);

// Stage 2a: hitting probabilities between attention nodes inside the source
// graph, swept from level L down to 2. Entries below 1e-15 are dropped.
HitTable hitting_in_source_graph(const DirectedGraph& g, const SourceGraph& sg,
                                 const AttentionSets& att, const QueryParams& params);

struct LastMeetingResult {
  double gamma = 1.0;
  // rho[i][att_id] (id on level l+i): probability that two in-source-graph
  // walks from w first meet at an attention node there; rho[0] unused.
  std::vector<std::vector<double>> rho;
};

// Stage 2b: last-meeting probability of attention occurrence (level, w).
// Throws std::logic_error when a first-meeting probability falls below -1e-9
// (which indicates a corrupted hit table).
LastMeetingResult last_meeting_detail(const SourceGraph& sg, const AttentionSets& att,
                                      const HitTable& hit, int level, NodeId w);
double last_meeting(const SourceGraph& sg, const AttentionSets& att, const HitTable& hit,
                    int level, NodeId w);

// Fills gamma for every attention occurrence.
void compute_gammas(const SourceGraph& sg, AttentionSets& att, const HitTable& hit);

// r^(l)(w) = h^(l)(u,w) * gamma^(l)(w) for every occurrence.
void compute_residues(AttentionSets& att);

// Stage 3: push residues along out-edges of G; residues reaching level 0
// accumulate into the SimRank estimates. Finally scores[u] = 1.
SimRankVector reverse_push(const DirectedGraph& g, const AttentionSets& att,
                           const QueryParams& params, NodeId u);

// Full pipeline. Deterministic given (g, u, params).
SimRankVector single_source(const DirectedGraph& g, NodeId u, const QueryParams& params,
                            QueryStats* stats = nullptr);
SimRankVector single_source(const DirectedGraph& g, NodeId u, double c, double eps,
                            double delta, std::uint64_t seed);

}  // namespace simpush
