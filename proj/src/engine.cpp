#include "simpush/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace simpush {

namespace {

constexpr double kHitDropThreshold = 1e-15;
constexpr double kRhoTolerance = 1e-9;

std::uint64_t binomial(std::uint64_t trials, double p, SplitMix64& rng) {
  if (trials == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  if (trials <= 32) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < trials; ++i) hits += rng.bernoulli(p);
    return hits;
  }
  std::binomial_distribution<std::uint64_t> dist(trials, p);
  return dist(rng);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::ptrdiff_t SourceLevel::index_of(NodeId v) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
  if (it == nodes.end() || *it != v) return -1;
  return it - nodes.begin();
}

double SourceLevel::hit_of(NodeId v) const {
  auto idx = index_of(v);
  return idx < 0 ? 0.0 : hit[idx];
}

int AttentionSets::level_of(std::uint32_t id) const {
  auto it = std::upper_bound(offsets.begin(), offsets.end(), id);
  return static_cast<int>(it - offsets.begin()) - 1;
}

const AttentionOccurrence& AttentionSets::occurrence(std::uint32_t id) const {
  int l = level_of(id);
  return levels[l][id - offsets[l]];
}

AttentionOccurrence& AttentionSets::occurrence(std::uint32_t id) {
  int l = level_of(id);
  return levels[l][id - offsets[l]];
}

std::ptrdiff_t AttentionSets::find(int level, NodeId node) const {
  if (level < 0 || level >= static_cast<int>(levels.size())) return -1;
  const auto& occ = levels[level];
  auto it = std::lower_bound(occ.begin(), occ.end(), node,
                             [](const AttentionOccurrence& o, NodeId v) { return o.node < v; });
  if (it == occ.end() || it->node != node) return -1;
  return id_of(level, it - occ.begin());
}

void AttentionSets::rebuild_offsets() {
  offsets.assign(levels.size() + 1, 0);
  for (std::size_t l = 0; l < levels.size(); ++l)
    offsets[l + 1] = offsets[l] + static_cast<std::uint32_t>(levels[l].size());
}

const std::vector<double>* HitTable::row(int level, NodeId node) const {
  if (level < 0 || level >= static_cast<int>(rows.size())) return nullptr;
  auto it = rows[level].find(node);
  return it == rows[level].end() ? nullptr : &it->second;
}

double HitTable::value(int level, NodeId node, std::uint32_t att_id) const {
  const auto* r = row(level, node);
  return r == nullptr ? 0.0 : (*r)[att_id];
}

const std::vector<double>* HitTable::attention_row(
    const AttentionSets& att, std::uint32_t att_id) const {
  const auto& occ = att.occurrence(att_id);
  return row(att.level_of(att_id), occ.node);
}

WalkLevelCounts sample_level_counts(const DirectedGraph& g, NodeId u,
                                    const QueryParams& params, SplitMix64& rng) {
  if (u >= g.n) throw std::out_of_range("sample_level_counts: query node out of range");

  WalkLevelCounts counts;
  counts.levels.push_back({{u, params.n_walks}});

  std::vector<std::uint64_t> scratch(g.n, 0);
  std::vector<NodeId> touched;

  for (int l = 0; l < params.max_level; ++l) {
    const auto& cur = counts.levels[l];
    touched.clear();
    for (const auto& [v, walkers] : cur) {
      auto nbrs = g.in(v);
      std::uint32_t d = static_cast<std::uint32_t>(nbrs.size());
      if (d == 0) continue;  // dangling: walks terminate here
      std::uint64_t survivors = binomial(walkers, params.sqrt_c, rng);
      if (survivors == 0) continue;
      auto deposit = [&](NodeId w, std::uint64_t k) {
        if (scratch[w] == 0) touched.push_back(w);
        scratch[w] += k;
      };
      if (survivors < d) {
        for (std::uint64_t t = 0; t < survivors; ++t) deposit(nbrs[rng.below(d)], 1);
      } else {
        // Multinomial split via conditional binomials.
        std::uint64_t rem = survivors;
        for (std::uint32_t i = 0; i + 1 < d && rem > 0; ++i) {
          std::uint64_t k = binomial(rem, 1.0 / static_cast<double>(d - i), rng);
          if (k > 0) deposit(nbrs[i], k);
          rem -= k;
        }
        if (rem > 0) deposit(nbrs[d - 1], rem);
      }
    }
    if (touched.empty()) break;
    std::sort(touched.begin(), touched.end());
    std::vector<std::pair<NodeId, std::uint64_t>> next;
    next.reserve(touched.size());
    for (NodeId w : touched) {
      next.emplace_back(w, scratch[w]);
      scratch[w] = 0;
    }
    counts.levels.push_back(std::move(next));
  }
  return counts;
}

int detect_max_level(const WalkLevelCounts& counts, const QueryParams& params) {
  int L = 0;
  int top = std::min<int>(params.max_level, static_cast<int>(counts.levels.size()) - 1);
  double threshold = params.eps_h * static_cast<double>(params.n_walks);
  for (int l = 1; l <= top; ++l)
    for (const auto& [v, cnt] : counts.levels[l])
      if (static_cast<double>(cnt) * 2.0 >= threshold) {
        L = l;
        break;
      }
  return L;
}

SourcePushResult source_push(const DirectedGraph& g, NodeId u, int L,
                             const QueryParams& params) {
  if (u >= g.n) throw std::out_of_range("source_push: query node out of range");

  SourcePushResult res;
  auto& sg = res.sg;
  sg.levels.push_back(SourceLevel{{u}, {1.0}});

  std::vector<double> scratch(g.n, 0.0);
  std::vector<NodeId> touched;

  for (int l = 0; l < L; ++l) {
    const auto& cur = sg.levels[l];
    touched.clear();
    for (std::size_t i = 0; i < cur.nodes.size(); ++i) {
      NodeId v = cur.nodes[i];
      auto nbrs = g.in(v);
      if (nbrs.empty()) continue;
      double push = params.sqrt_c * cur.hit[i] / static_cast<double>(nbrs.size());
      for (NodeId w : nbrs) {
        if (scratch[w] == 0.0) touched.push_back(w);
        scratch[w] += push;
      }
    }
    if (touched.empty()) break;
    std::sort(touched.begin(), touched.end());
    SourceLevel next;
    next.nodes.reserve(touched.size());
    next.hit.reserve(touched.size());
    for (NodeId w : touched) {
      next.nodes.push_back(w);
      next.hit.push_back(scratch[w]);
      scratch[w] = 0.0;
    }
    sg.levels.push_back(std::move(next));
  }
  sg.max_level = static_cast<int>(sg.levels.size()) - 1;

  auto& att = res.att;
  att.levels.resize(sg.levels.size());
  for (int l = 1; l <= sg.max_level; ++l) {
    const auto& lvl = sg.levels[l];
    for (std::size_t i = 0; i < lvl.nodes.size(); ++i)
      if (lvl.hit[i] >= params.eps_h)
        att.levels[l].push_back({lvl.nodes[i], lvl.hit[i], 1.0, 0.0});
  }
  att.rebuild_offsets();
  return res;
}

HitTable hitting_in_source_graph(const DirectedGraph& g, const SourceGraph& sg,
                                 const AttentionSets& att, const QueryParams& params) {
  const int L = sg.max_level;
  HitTable hit;
  hit.width = att.total();
  hit.rows.resize(sg.levels.size());
  if (L < 1) return hit;

  // A row only matters if it can feed an attention occurrence's row through
  // downward pushes; everything else is skipped.
  std::vector<std::vector<char>> useful(sg.levels.size());
  for (int l = 1; l <= L; ++l) {
    const auto& lvl = sg.levels[l];
    useful[l].assign(lvl.nodes.size(), 0);
    for (std::size_t i = 0; i < lvl.nodes.size(); ++i) {
      if (att.find(l, lvl.nodes[i]) >= 0) {
        useful[l][i] = 1;
        continue;
      }
      if (l >= 2) {
        for (NodeId a : g.out(lvl.nodes[i])) {
          auto j = sg.levels[l - 1].index_of(a);
          if (j >= 0 && useful[l - 1][j]) {
            useful[l][i] = 1;
            break;
          }
        }
      }
    }
  }

  for (int l = L; l >= 2; --l) {
    for (std::size_t i = 0; i < att.levels[l].size(); ++i) {
      const auto& occ = att.levels[l][i];
      auto& self = hit.rows[l][occ.node];
      if (self.empty()) self.assign(hit.width, 0.0);
      self[att.id_of(l, i)] = 1.0;  // h~^(0)(w,w)
    }
    // a level-l row only carries ids on levels >= l
    const std::uint32_t lo = att.offsets[l];
    for (const auto& [w, row] : hit.rows[l]) {
      for (NodeId a : g.out(w)) {
        auto j = sg.levels[l - 1].index_of(a);
        if (j < 0 || !useful[l - 1][j]) continue;
        double scale = params.sqrt_c / static_cast<double>(g.in_degree(a));
        auto& target = hit.rows[l - 1][a];
        if (target.empty()) target.assign(hit.width, 0.0);
        for (std::uint32_t id = lo; id < hit.width; ++id) {
          double val = row[id];
          if (val < kHitDropThreshold) continue;
          target[id] += scale * val;
        }
      }
    }
  }
  return hit;
}

LastMeetingResult last_meeting_detail(const SourceGraph& sg, const AttentionSets& att,
                                      const HitTable& hit, int level, NodeId w) {
  if (att.find(level, w) < 0)
    throw std::invalid_argument("last_meeting: (level, node) is not an attention occurrence");

  const int depth = sg.max_level - level;
  LastMeetingResult res;
  res.rho.assign(depth + 1, {});
  const auto* row_w = hit.row(level, w);

  double total = 0.0;
  for (int i = 1; i <= depth; ++i) {
    auto& cur = res.rho[i];
    cur.assign(hit.width, 0.0);
    const std::uint32_t beg = att.offsets[level + i];
    const std::uint32_t end = att.offsets[level + i + 1];
    if (row_w)
      for (std::uint32_t id = beg; id < end; ++id) cur[id] = (*row_w)[id] * (*row_w)[id];
    for (int j = 1; j < i; ++j) {
      const std::uint32_t jb = att.offsets[level + j];
      const std::uint32_t je = att.offsets[level + j + 1];
      for (std::uint32_t s = jb; s < je; ++s) {
        double rho_j = res.rho[j][s];
        if (rho_j == 0.0) continue;
        const auto* row_j = hit.attention_row(att, s);
        if (!row_j) continue;
        for (std::uint32_t id = beg; id < end; ++id) {
          double hv = (*row_j)[id];
          cur[id] -= rho_j * hv * hv;
        }
      }
    }
    for (std::uint32_t id = beg; id < end; ++id) {
      if (cur[id] < 0.0) {
        if (cur[id] < -kRhoTolerance)
          throw std::logic_error("last_meeting: negative first-meeting probability");
        cur[id] = 0.0;  // tolerated rounding, keep later terms nonnegative
      }
      total += cur[id];
    }
  }

  res.gamma = 1.0 - total;
  if (res.gamma < 0.0) {
    if (res.gamma < -kRhoTolerance)
      throw std::logic_error("last_meeting: gamma below zero beyond tolerance");
    res.gamma = 0.0;
  } else if (res.gamma > 1.0) {
    if (res.gamma > 1.0 + kRhoTolerance)
      throw std::logic_error("last_meeting: gamma above one beyond tolerance");
    res.gamma = 1.0;
  }
  return res;
}

double last_meeting(const SourceGraph& sg, const AttentionSets& att, const HitTable& hit,
                    int level, NodeId w) {
  return last_meeting_detail(sg, att, hit, level, w).gamma;
}

void compute_gammas(const SourceGraph& sg, AttentionSets& att, const HitTable& hit) {
  for (int l = 1; l < static_cast<int>(att.levels.size()); ++l)
    for (auto& occ : att.levels[l]) occ.gamma = last_meeting(sg, att, hit, l, occ.node);
}

void compute_residues(AttentionSets& att) {
  for (auto& lvl : att.levels)
    for (auto& occ : lvl) occ.residue = occ.hit * occ.gamma;
}

SimRankVector reverse_push(const DirectedGraph& g, const AttentionSets& att,
                           const QueryParams& params, NodeId u) {
  SimRankVector out;
  out.query = u;
  out.scores.assign(g.n, 0.0);

  const int L = static_cast<int>(att.levels.size()) - 1;
  std::vector<std::unordered_map<NodeId, double>> residue(std::max(L + 1, 1));
  for (int l = 1; l <= L; ++l)
    for (const auto& occ : att.levels[l]) residue[l][occ.node] += occ.residue;

  std::vector<NodeId> order;
  for (int l = L; l >= 1; --l) {
    order.clear();
    order.reserve(residue[l].size());
    for (const auto& [v, r] : residue[l]) order.push_back(v);
    std::sort(order.begin(), order.end());
    for (NodeId v : order) {
      double r = residue[l][v];
      if (params.sqrt_c * r < params.eps_h) continue;  // push gate
      for (NodeId t : g.out(v)) {
        double contrib = params.sqrt_c * r / static_cast<double>(g.in_degree(t));
        if (l > 1)
          residue[l - 1][t] += contrib;
        else
          out.scores[t] += contrib;
      }
    }
  }

  out.scores[u] = 1.0;
  for (double& s : out.scores) s = std::clamp(s, 0.0, 1.0);
  return out;
}

SimRankVector single_source(const DirectedGraph& g, NodeId u, const QueryParams& params,
                            QueryStats* stats) {
  SplitMix64 rng(params.seed);

  auto t0 = std::chrono::steady_clock::now();
  WalkLevelCounts counts = sample_level_counts(g, u, params, rng);
  int L = detect_max_level(counts, params);
  if (stats) {
    stats->seconds_sampling = seconds_since(t0);
    stats->level = L;
  }

  if (L == 0) {
    SimRankVector out;
    out.query = u;
    out.scores.assign(g.n, 0.0);
    out.scores[u] = 1.0;
    return out;
  }

  t0 = std::chrono::steady_clock::now();
  SourcePushResult sp = source_push(g, u, L, params);
  if (stats) {
    stats->seconds_source_push = seconds_since(t0);
    stats->attention_occurrences = sp.att.total();
  }

  t0 = std::chrono::steady_clock::now();
  HitTable hit = hitting_in_source_graph(g, sp.sg, sp.att, params);
  compute_gammas(sp.sg, sp.att, hit);
  compute_residues(sp.att);
  if (stats) stats->seconds_gamma = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  SimRankVector out = reverse_push(g, sp.att, params, u);
  if (stats) stats->seconds_reverse_push = seconds_since(t0);
  return out;
}

SimRankVector single_source(const DirectedGraph& g, NodeId u, double c, double eps,
                            double delta, std::uint64_t seed) {
  return single_source(g, u, derive_params(c, eps, delta, seed), nullptr);
}

}  // namespace simpush
