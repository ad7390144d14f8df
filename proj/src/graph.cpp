#include "simpush/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace simpush {

namespace {

constexpr char kCacheMagic[8] = {'S', 'P', 'U', 'S', 'H', 'G', 'R', '1'};

// Densify only when the id space is much larger than the set of ids that
// actually occur; small gaps stay as isolated nodes.
bool should_densify(std::uint64_t max_id, std::size_t distinct) {
  return max_id + 1 > 2 * static_cast<std::uint64_t>(distinct) && max_id >= 65536;
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw std::runtime_error("graph cache: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

Degrees degrees(const DirectedGraph& g, NodeId v) {
  if (v >= g.n) throw std::out_of_range("degrees: node id out of range");
  return {g.in_degree(v), g.out_degree(v)};
}

DirectedGraph build_graph(std::uint64_t n_hint,
                          std::vector<std::pair<std::uint64_t, std::uint64_t>> edges) {
  std::uint64_t max_id = n_hint == 0 ? 0 : n_hint - 1;
  for (const auto& [a, b] : edges) max_id = std::max({max_id, a, b});

  // Distinct endpoint count decides densification.
  std::vector<std::uint64_t> ids;
  ids.reserve(edges.size() * 2);
  for (const auto& [a, b] : edges) {
    ids.push_back(a);
    ids.push_back(b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  DirectedGraph g;
  std::unordered_map<std::uint64_t, NodeId> remap;
  if (!edges.empty() && should_densify(max_id, ids.size())) {
    g.external_ids = ids;
    remap.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) remap[ids[i]] = static_cast<NodeId>(i);
    for (auto& [a, b] : edges) {
      a = remap[a];
      b = remap[b];
    }
    g.n = ids.size();
  } else {
    g.n = edges.empty() ? n_hint : max_id + 1;
  }

  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.m = edges.size();

  g.out_off.assign(g.n + 1, 0);
  g.in_off.assign(g.n + 1, 0);
  for (const auto& [a, b] : edges) {
    ++g.out_off[a + 1];
    ++g.in_off[b + 1];
  }
  for (std::uint64_t v = 0; v < g.n; ++v) {
    g.out_off[v + 1] += g.out_off[v];
    g.in_off[v + 1] += g.in_off[v];
  }
  g.out_adj.resize(g.m);
  g.in_adj.resize(g.m);
  std::vector<std::uint64_t> out_pos(g.out_off.begin(), g.out_off.end() - 1);
  std::vector<std::uint64_t> in_pos(g.in_off.begin(), g.in_off.end() - 1);
  // Edges sorted by (src, dst): out lists come out sorted by target and in
  // lists sorted by source.
  for (const auto& [a, b] : edges) {
    g.out_adj[out_pos[a]++] = static_cast<NodeId>(b);
    g.in_adj[in_pos[b]++] = static_cast<NodeId>(a);
  }
  return g;
}

DirectedGraph load_edge_list(std::istream& src, bool directed) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  std::string line;
  std::size_t line_no = 0;
  bool saw_edge = false;
  std::uint64_t pending = 0;
  bool have_pending = false;

  while (std::getline(src, line)) {
    ++line_no;
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i < line.size() && (line[i] == '#' || line[i] == '%')) continue;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size()) break;
      std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::string tok = line.substr(start, i - start);
      std::uint64_t val = 0;
      std::size_t used = 0;
      try {
        val = std::stoull(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size())
        throw std::runtime_error("edge list: malformed token '" + tok + "' at line " +
                                 std::to_string(line_no));
      if (have_pending) {
        edges.emplace_back(pending, val);
        if (!directed) edges.emplace_back(val, pending);
        have_pending = false;
        saw_edge = true;
      } else {
        pending = val;
        have_pending = true;
      }
    }
  }
  if (have_pending)
    throw std::runtime_error("edge list: dangling source token at line " +
                             std::to_string(line_no));
  if (!saw_edge) throw std::runtime_error("edge list: empty input");
  return build_graph(0, std::move(edges));
}

void write_edge_list(const DirectedGraph& g, std::ostream& out) {
  auto ext = [&](NodeId v) -> std::uint64_t {
    return g.external_ids.empty() ? v : g.external_ids[v];
  };
  for (NodeId v = 0; v < g.n; ++v)
    for (NodeId t : g.out(v)) out << ext(v) << ' ' << ext(t) << '\n';
}

void save_binary(const DirectedGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out.write(kCacheMagic, 8);
  write_u64(out, g.n);
  write_u64(out, g.m);
  for (std::uint64_t v : g.out_off) write_u64(out, v);
  for (NodeId v : g.out_adj) write_u64(out, v);
  for (std::uint64_t v : g.in_off) write_u64(out, v);
  for (NodeId v : g.in_adj) write_u64(out, v);
  write_u64(out, g.external_ids.size());
  for (std::uint64_t v : g.external_ids) write_u64(out, v);
  if (!out) throw std::runtime_error("write failed: " + path);
}

DirectedGraph load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCacheMagic, 8) != 0)
    throw std::runtime_error("graph cache: bad magic in " + path);
  DirectedGraph g;
  g.n = read_u64(in);
  g.m = read_u64(in);
  g.out_off.resize(g.n + 1);
  for (auto& v : g.out_off) v = read_u64(in);
  g.out_adj.resize(g.m);
  for (auto& v : g.out_adj) v = static_cast<NodeId>(read_u64(in));
  g.in_off.resize(g.n + 1);
  for (auto& v : g.in_off) v = read_u64(in);
  g.in_adj.resize(g.m);
  for (auto& v : g.in_adj) v = static_cast<NodeId>(read_u64(in));
  g.external_ids.resize(read_u64(in));
  for (auto& v : g.external_ids) v = read_u64(in);
  return g;
}

DirectedGraph load_graph(const std::string& path, bool directed) {
  {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw std::runtime_error("cannot open: " + path);
    char magic[8] = {};
    probe.read(magic, 8);
    if (probe.gcount() == 8 && std::memcmp(magic, kCacheMagic, 8) == 0)
      return load_binary(path);
  }
  std::ifstream in(path);
  return load_edge_list(in, directed);
}

}  // namespace simpush
