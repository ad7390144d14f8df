#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "simpush/engine.hpp"
#include "simpush/graph.hpp"
#include "simpush/oracle.hpp"
#include "simpush/params.hpp"

namespace simpush {

struct QuerySet {
  std::vector<NodeId> queries;
  std::uint64_t seed = 0;
};

// Uniform query sample; without replacement when count <= n (count == n gives
// a permutation), with replacement when count > n or when forced.
QuerySet gen_queries(const DirectedGraph& g, std::size_t count, std::uint64_t seed,
                     bool with_replacement = false);

void write_queries(const QuerySet& qs, std::ostream& out);
QuerySet load_queries(std::istream& in, std::size_t n);

// Top-k node ids of a score vector, excluding the query node itself; ties
// broken by ascending node id. Nodes with zero truth score never enter a
// truth top-k, so the result may be shorter than k.
std::vector<NodeId> truth_top_k(const SimRankVector& vec, std::size_t k);
// Estimate-side top-k of exactly the requested size (zeros allowed).
std::vector<NodeId> top_k(const SimRankVector& vec, std::size_t k);

// (1/k') * sum |est(v) - truth(v)| over the truth top-k', where k' is k
// truncated to the nonzero truth support; *truncated flags k' < k.
double avg_error_at_k(const SimRankVector& truth, const SimRankVector& est, std::size_t k,
                      bool* truncated = nullptr);
// |V_k' ∩ V'_k'| / k' with the same truncation rule.
double precision_at_k(const SimRankVector& truth, const SimRankVector& est, std::size_t k,
                      bool* truncated = nullptr);

// Ground-truth single-source rows keyed by query node.
struct TruthTable {
  std::unordered_map<NodeId, std::vector<double>> rows;
};

TruthTable truth_from_exact(const ExactSimRank& m);
// Parses "u,v,s" CSV (header optional); rows for nodes >= n are rejected.
TruthTable load_truth_csv(std::istream& in, std::size_t n);

struct QueryReport {
  NodeId query = 0;
  double avg_error = 0.0;
  double precision = 0.0;
  bool truncated_k = false;
  QueryStats stats;
  double seconds_total = 0.0;
};

struct MetricsReport {
  QueryParams params;
  std::size_t k = 0;
  std::size_t n = 0;
  std::uint64_t m = 0;
  int threads = 0;
  std::vector<QueryReport> per_query;  // sorted by query id
  double mean_avg_error = 0.0;
  double mean_precision = 0.0;
  double mean_seconds = 0.0;
  long peak_rss_kb = 0;  // best effort, 0 when unavailable
};

// Runs the engine for every query and scores it against truth. Throws
// std::invalid_argument when a query has no truth row.
MetricsReport run_eval(const DirectedGraph& g, const QuerySet& qs, const QueryParams& params,
                       std::size_t k, const TruthTable& truth);

// CSV with header "query,metric,value": parameter echo rows (query column
// "param"), per-query metric rows, aggregate rows (query column "all").
// Timing and memory metrics are prefixed time_ / mem_ so they can be
// filtered out when comparing runs.
void write_report_csv(const MetricsReport& report, std::ostream& out);

// SIMPUSH_THREADS env var, or 0 when unset/invalid (meaning "let the
// implementation pick").
int env_thread_cap();

}  // namespace simpush
