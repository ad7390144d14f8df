#include "simpush/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "simpush/rng.hpp"

namespace simpush {
namespace {

constexpr int kReachDepth = 64;  // walks beyond this depth carry < 1e-7 mass

// One joint sqrt(c)-walk pair from (a, b); true when the walks ever occupy
// the same node at the same step. Both walks survive a step together with
// probability c, so a single Bernoulli(c) draw gates each joint step.
bool pair_walk_meets(const DirectedGraph& g, NodeId a, NodeId b, double c,
                     SplitMix64& rng) {
  while (true) {
    if (!rng.bernoulli(c)) return false;
    auto ia = g.in(a);
    auto ib = g.in(b);
    if (ia.empty() || ib.empty()) return false;
    a = ia[rng.below(static_cast<std::uint32_t>(ia.size()))];
    b = ib[rng.below(static_cast<std::uint32_t>(ib.size()))];
    if (a == b) return true;
  }
}

std::uint64_t run_pair_batch(const DirectedGraph& g, NodeId u, NodeId v, double c,
                             std::uint64_t count, std::uint64_t seed,
                             std::uint64_t stream) {
  SplitMix64 rng(SplitMix64::substream(seed, stream));
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < count; ++i)
    if (pair_walk_meets(g, u, v, c, rng)) ++hits;
  return hits;
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

ExactSimRank exact_simrank(const DirectedGraph& g, double c, int iterations,
                           std::size_t node_cap) {
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("exact_simrank: c must be in (0,1)");
  if (iterations < 1) throw std::invalid_argument("exact_simrank: iterations must be >= 1");
  if (g.n > node_cap)
    throw std::invalid_argument("exact_simrank: graph exceeds node cap (" +
                                std::to_string(g.n) + " > " + std::to_string(node_cap) + ")");

  const std::size_t n = g.n;
  ExactSimRank out;
  out.n = n;
  out.iterations = iterations;
  out.c = c;
  out.values.assign(n * n, 0.0);
  if (n == 0) return out;

  std::vector<double>& s = out.values;
  for (std::size_t i = 0; i < n; ++i) s[i * n + i] = 1.0;

  std::vector<double> t(n * n), next(n * n);
  for (int it = 0; it < iterations; ++it) {
    // t = W s, where W is the row-normalized in-adjacency matrix
    for (std::size_t a = 0; a < n; ++a) {
      double* trow = t.data() + a * n;
      std::fill(trow, trow + n, 0.0);
      auto ia = g.in(static_cast<NodeId>(a));
      if (ia.empty()) continue;
      double inv = 1.0 / static_cast<double>(ia.size());
      for (NodeId ap : ia) {
        const double* srow = s.data() + static_cast<std::size_t>(ap) * n;
        for (std::size_t j = 0; j < n; ++j) trow[j] += srow[j];
      }
      for (std::size_t j = 0; j < n; ++j) trow[j] *= inv;
    }
    // next = c * t W^T, then unit diagonal; the upper triangle is mirrored so
    // the result is bitwise symmetric despite row-wise rounding.
    for (std::size_t a = 0; a < n; ++a) {
      const double* trow = t.data() + a * n;
      double* nrow = next.data() + a * n;
      for (std::size_t b = a + 1; b < n; ++b) {
        auto ib = g.in(static_cast<NodeId>(b));
        if (ib.empty()) {
          nrow[b] = 0.0;
          continue;
        }
        double acc = 0.0;
        for (NodeId bp : ib) acc += trow[bp];
        nrow[b] = c * acc / static_cast<double>(ib.size());
      }
      nrow[a] = 1.0;
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) next[b * n + a] = next[a * n + b];
    s.swap(next);
  }
  return out;
}

PairEstimate mc_pair(const DirectedGraph& g, NodeId u, NodeId v, double c,
                     std::uint64_t n_samples, std::uint64_t seed, double delta_o,
                     int threads) {
  if (u >= g.n || v >= g.n) throw std::out_of_range("mc_pair: node id out of range");
  if (n_samples == 0) throw std::invalid_argument("mc_pair: n_samples must be > 0");

  PairEstimate est;
  est.samples = n_samples;
  est.radius = std::sqrt(std::log(2.0 / delta_o) / (2.0 * static_cast<double>(n_samples)));
  if (u == v) {
    est.value = 1.0;
    est.radius = 0.0;
    return est;
  }
  if (g.in(u).empty() || g.in(v).empty()) {
    est.value = 0.0;
    return est;
  }

  // Fixed batch boundaries keyed by batch index, so the estimate is
  // independent of how many workers run them.
  constexpr std::uint64_t kBatch = 1 << 16;
  const std::uint64_t n_batches = (n_samples + kBatch - 1) / kBatch;
  int workers = std::min<std::uint64_t>(resolve_threads(threads), n_batches);

  std::uint64_t hits = 0;
  auto batch_count = [&](std::uint64_t b) {
    return b + 1 == n_batches ? n_samples - b * kBatch : kBatch;
  };
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < n_batches; ++b)
      hits += run_pair_batch(g, u, v, c, batch_count(b), seed, b);
  } else {
    std::vector<std::uint64_t> partial(workers, 0);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        std::uint64_t acc = 0;
        for (std::uint64_t b = w; b < n_batches; b += workers)
          acc += run_pair_batch(g, u, v, c, batch_count(b), seed, b);
        partial[w] = acc;
      });
    }
    for (auto& th : pool) th.join();
    for (std::uint64_t p : partial) hits += p;
  }
  est.value = static_cast<double>(hits) / static_cast<double>(n_samples);
  return est;
}

SimRankVector mc_single_source(const DirectedGraph& g, NodeId u, double c,
                               std::uint64_t samples_per_target, std::uint64_t seed,
                               int threads) {
  if (u >= g.n) throw std::out_of_range("mc_single_source: node id out of range");

  SimRankVector out;
  out.query = u;
  out.scores.assign(g.n, 0.0);
  out.scores[u] = 1.0;

  // s(u,v) > 0 needs a node reachable backwards from both u and v in the
  // same number of steps; candidates are forward-reachable from u's
  // bounded-depth ancestor set, everything else stays zero.
  std::vector<char> ancestor(g.n, 0), candidate(g.n, 0);
  std::deque<std::pair<NodeId, int>> queue;
  ancestor[u] = 1;
  queue.emplace_back(u, 0);
  while (!queue.empty()) {
    auto [v, d] = queue.front();
    queue.pop_front();
    if (d == kReachDepth) continue;
    for (NodeId p : g.in(v))
      if (!ancestor[p]) {
        ancestor[p] = 1;
        queue.emplace_back(p, d + 1);
      }
  }
  for (NodeId a = 0; a < g.n; ++a)
    if (ancestor[a] && !candidate[a]) {
      candidate[a] = 1;
      queue.emplace_back(a, 0);
    }
  while (!queue.empty()) {
    auto [v, d] = queue.front();
    queue.pop_front();
    if (d == kReachDepth) continue;
    for (NodeId t : g.out(v))
      if (!candidate[t]) {
        candidate[t] = 1;
        queue.emplace_back(t, d + 1);
      }
  }

  for (NodeId v = 0; v < g.n; ++v) {
    if (v == u || !candidate[v]) continue;
    // Per-target seed stream keeps targets independent and order-insensitive.
    out.scores[v] = mc_pair(g, u, v, c, samples_per_target,
                            SplitMix64::substream(seed, v), 1e-6, threads)
                        .value;
  }
  return out;
}

void write_simrank_csv(const ExactSimRank& m, std::ostream& out) {
  out << "u,v,s\n";
  char buf[64];
  for (std::size_t a = 0; a < m.n; ++a)
    for (std::size_t b = 0; b < m.n; ++b) {
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%.12g\n", a, b, m.at(static_cast<NodeId>(a),
                                                                   static_cast<NodeId>(b)));
      out << buf;
    }
}

void write_simrank_csv(const SimRankVector& v, std::ostream& out) {
  out << "u,v,s\n";
  char buf[64];
  for (std::size_t b = 0; b < v.scores.size(); ++b) {
    std::snprintf(buf, sizeof(buf), "%u,%zu,%.12g\n", v.query, b, v.scores[b]);
    out << buf;
  }
}

}  // namespace simpush
