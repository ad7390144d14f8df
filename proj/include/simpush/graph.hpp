#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace simpush {

using NodeId = std::uint32_t;

// Immutable directed graph in CSR form, forward and backward.
// Construction happens in the loaders below; after that the structure is
// read-only and safe for concurrent readers.
struct DirectedGraph {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::vector<std::uint64_t> out_off;  // n+1 offsets
  std::vector<NodeId> out_adj;         // m targets, sorted per node
  std::vector<std::uint64_t> in_off;   // n+1 offsets
  std::vector<NodeId> in_adj;          // m sources, sorted per node

  // Maps internal id -> external id. Empty when input ids were dense and
  // used as-is.
  std::vector<std::uint64_t> external_ids;

  std::span<const NodeId> out(NodeId v) const {
    return {out_adj.data() + out_off[v], out_adj.data() + out_off[v + 1]};
  }
  std::span<const NodeId> in(NodeId v) const {
    return {in_adj.data() + in_off[v], in_adj.data() + in_off[v + 1]};
  }
  std::uint64_t out_degree(NodeId v) const { return out_off[v + 1] - out_off[v]; }
  std::uint64_t in_degree(NodeId v) const { return in_off[v + 1] - in_off[v]; }
};

struct Degrees {
  std::uint64_t in;
  std::uint64_t out;
};

// Throws std::out_of_range when v >= g.n.
Degrees degrees(const DirectedGraph& g, NodeId v);

// Parses whitespace-separated "src dst" integer pairs. Lines starting with
// '#' or '%' are comments. Multi-edges are deduplicated, self-loops kept.
// In undirected mode every input edge yields both directions.
// Node ids are kept as-is (n = 1 + max id) unless the id space is sparse,
// in which case ids are densified and the external->internal mapping is
// recorded in external_ids.
// Throws std::runtime_error with a line number on malformed input.
DirectedGraph load_edge_list(std::istream& src, bool directed);

// Builds a graph from an explicit (already deduplicated or not) edge list.
DirectedGraph build_graph(std::uint64_t n_hint,
                          std::vector<std::pair<std::uint64_t, std::uint64_t>> edges);

// Canonical edge-list text: one "src dst" per line, sorted by (src, dst),
// external ids when a densification table exists.
void write_edge_list(const DirectedGraph& g, std::ostream& out);

// Binary cache: magic, n, m, both offset arrays, both target arrays, the
// external id table; little-endian 64-bit integers throughout.
void save_binary(const DirectedGraph& g, const std::string& path);
DirectedGraph load_binary(const std::string& path);

// Loads either format: binary cache when the file starts with the cache
// magic, edge-list text otherwise.
DirectedGraph load_graph(const std::string& path, bool directed = true);

}  // namespace simpush
