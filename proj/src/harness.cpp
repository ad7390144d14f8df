#include "simpush/harness.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "simpush/rng.hpp"

namespace simpush {
namespace {

long peak_rss_kb() {
  struct rusage ru {};
  if (getrusage(RUSAGE_SELF, &ru) != 0) return 0;
  return ru.ru_maxrss;  // kilobytes on Linux
}

void append_row(std::ostream& out, const std::string& query, const std::string& metric,
                double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  out << query << ',' << metric << ',' << buf << '\n';
}

// Indices of the k largest scores excluding `skip`; ties by ascending id.
std::vector<NodeId> ranked_ids(const std::vector<double>& scores, NodeId skip,
                               std::size_t k, bool positive_only) {
  std::vector<NodeId> ids;
  ids.reserve(scores.size());
  for (NodeId v = 0; v < scores.size(); ++v)
    if (v != skip && (!positive_only || scores[v] > 0.0)) ids.push_back(v);
  k = std::min(k, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + k, ids.end(), [&](NodeId a, NodeId b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  ids.resize(k);
  return ids;
}

std::size_t effective_k(const SimRankVector& truth, std::size_t k) {
  std::size_t support = 0;
  for (NodeId v = 0; v < truth.scores.size(); ++v)
    if (v != truth.query && truth.scores[v] > 0.0) ++support;
  return std::min(k, support);
}

}  // namespace

QuerySet gen_queries(const DirectedGraph& g, std::size_t count, std::uint64_t seed,
                     bool with_replacement) {
  if (count == 0) throw std::invalid_argument("gen_queries: count must be >= 1");
  if (g.n == 0) throw std::invalid_argument("gen_queries: empty graph");

  QuerySet qs;
  qs.seed = seed;
  qs.queries.reserve(count);
  SplitMix64 rng(seed);
  if (with_replacement || count > g.n) {
    for (std::size_t i = 0; i < count; ++i)
      qs.queries.push_back(static_cast<NodeId>(rng.below(static_cast<std::uint32_t>(g.n))));
  } else {
    // Partial Fisher-Yates: first `count` entries of a random permutation.
    std::vector<NodeId> pool(g.n);
    std::iota(pool.begin(), pool.end(), NodeId{0});
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t j = i + rng.below(static_cast<std::uint32_t>(pool.size() - i));
      std::swap(pool[i], pool[j]);
      qs.queries.push_back(pool[i]);
    }
  }
  return qs;
}

void write_queries(const QuerySet& qs, std::ostream& out) {
  for (NodeId q : qs.queries) out << q << '\n';
}

QuerySet load_queries(std::istream& in, std::size_t n) {
  QuerySet qs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::uint64_t id = 0;
    try {
      id = std::stoull(line.substr(pos));
    } catch (const std::exception&) {
      throw std::runtime_error("query file line " + std::to_string(line_no) +
                               ": expected a node id");
    }
    if (id >= n)
      throw std::runtime_error("query file line " + std::to_string(line_no) +
                               ": node id " + std::to_string(id) + " out of range");
    qs.queries.push_back(static_cast<NodeId>(id));
  }
  if (qs.queries.empty()) throw std::runtime_error("query file contains no queries");
  return qs;
}

std::vector<NodeId> truth_top_k(const SimRankVector& vec, std::size_t k) {
  return ranked_ids(vec.scores, vec.query, k, /*positive_only=*/true);
}

std::vector<NodeId> top_k(const SimRankVector& vec, std::size_t k) {
  return ranked_ids(vec.scores, vec.query, k, /*positive_only=*/false);
}

double avg_error_at_k(const SimRankVector& truth, const SimRankVector& est, std::size_t k,
                      bool* truncated) {
  if (truth.scores.size() != est.scores.size() || truth.query != est.query)
    throw std::invalid_argument("avg_error_at_k: mismatched vectors");
  if (k == 0) throw std::invalid_argument("avg_error_at_k: k must be >= 1");
  std::size_t ek = effective_k(truth, k);
  if (truncated) *truncated = ek < k;
  if (ek == 0) return 0.0;
  double sum = 0.0;
  for (NodeId v : truth_top_k(truth, ek)) sum += std::abs(est.scores[v] - truth.scores[v]);
  return sum / static_cast<double>(ek);
}

double precision_at_k(const SimRankVector& truth, const SimRankVector& est, std::size_t k,
                      bool* truncated) {
  if (truth.scores.size() != est.scores.size() || truth.query != est.query)
    throw std::invalid_argument("precision_at_k: mismatched vectors");
  if (k == 0) throw std::invalid_argument("precision_at_k: k must be >= 1");
  std::size_t ek = effective_k(truth, k);
  if (truncated) *truncated = ek < k;
  if (ek == 0) return 1.0;  // nothing to retrieve
  std::vector<NodeId> vk = truth_top_k(truth, ek);
  std::vector<NodeId> vk_est = top_k(est, ek);
  std::sort(vk.begin(), vk.end());
  std::sort(vk_est.begin(), vk_est.end());
  std::vector<NodeId> both;
  std::set_intersection(vk.begin(), vk.end(), vk_est.begin(), vk_est.end(),
                        std::back_inserter(both));
  return static_cast<double>(both.size()) / static_cast<double>(ek);
}

TruthTable truth_from_exact(const ExactSimRank& m) {
  TruthTable t;
  t.rows.reserve(m.n);
  for (std::size_t u = 0; u < m.n; ++u) {
    auto& row = t.rows[static_cast<NodeId>(u)];
    row.assign(m.values.begin() + u * m.n, m.values.begin() + (u + 1) * m.n);
  }
  return t;
}

TruthTable load_truth_csv(std::istream& in, std::size_t n) {
  TruthTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "u,v,s" || line[0] == '#') continue;
    unsigned long long u = 0, v = 0;
    double s = 0.0;
    if (std::sscanf(line.c_str(), "%llu,%llu,%lf", &u, &v, &s) != 3)
      throw std::runtime_error("truth CSV line " + std::to_string(line_no) +
                               ": expected u,v,s");
    if (u >= n || v >= n)
      throw std::runtime_error("truth CSV line " + std::to_string(line_no) +
                               ": node id out of range");
    auto& row = t.rows[static_cast<NodeId>(u)];
    if (row.empty()) row.assign(n, 0.0);
    row[v] = s;
  }
  return t;
}

MetricsReport run_eval(const DirectedGraph& g, const QuerySet& qs, const QueryParams& params,
                       std::size_t k, const TruthTable& truth) {
  if (k == 0) throw std::invalid_argument("run_eval: k must be >= 1");

  MetricsReport report;
  report.params = params;
  report.k = k;
  report.n = g.n;
  report.m = g.m;
  report.threads = env_thread_cap();

  for (NodeId u : qs.queries) {
    auto it = truth.rows.find(u);
    if (it == truth.rows.end())
      throw std::invalid_argument("run_eval: no truth row for query " + std::to_string(u));
    SimRankVector truth_vec{u, it->second};

    QueryReport qr;
    qr.query = u;
    auto t0 = std::chrono::steady_clock::now();
    SimRankVector est = single_source(g, u, params, &qr.stats);
    qr.seconds_total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                           .count();
    bool trunc_a = false, trunc_p = false;
    qr.avg_error = avg_error_at_k(truth_vec, est, k, &trunc_a);
    qr.precision = precision_at_k(truth_vec, est, k, &trunc_p);
    qr.truncated_k = trunc_a || trunc_p;
    report.per_query.push_back(qr);
  }

  std::sort(report.per_query.begin(), report.per_query.end(),
            [](const QueryReport& a, const QueryReport& b) { return a.query < b.query; });
  if (!report.per_query.empty()) {
    double inv = 1.0 / static_cast<double>(report.per_query.size());
    for (const QueryReport& qr : report.per_query) {
      report.mean_avg_error += qr.avg_error * inv;
      report.mean_precision += qr.precision * inv;
      report.mean_seconds += qr.seconds_total * inv;
    }
  }
  report.peak_rss_kb = peak_rss_kb();
  return report;
}

void write_report_csv(const MetricsReport& report, std::ostream& out) {
  out << "query,metric,value\n";
  append_row(out, "param", "c", report.params.c);
  append_row(out, "param", "eps", report.params.eps);
  append_row(out, "param", "delta", report.params.delta);
  append_row(out, "param", "seed", static_cast<double>(report.params.seed));
  append_row(out, "param", "k", static_cast<double>(report.k));
  append_row(out, "param", "n", static_cast<double>(report.n));
  append_row(out, "param", "m", static_cast<double>(report.m));
  append_row(out, "param", "threads", static_cast<double>(report.threads));
  append_row(out, "param", "n_walks", static_cast<double>(report.params.n_walks));
  append_row(out, "param", "max_level", static_cast<double>(report.params.max_level));

  for (const QueryReport& qr : report.per_query) {
    std::string q = std::to_string(qr.query);
    append_row(out, q, "avg_error_at_k", qr.avg_error);
    append_row(out, q, "precision_at_k", qr.precision);
    append_row(out, q, "truncated_k", qr.truncated_k ? 1.0 : 0.0);
    append_row(out, q, "level", static_cast<double>(qr.stats.level));
    append_row(out, q, "attention", static_cast<double>(qr.stats.attention_occurrences));
    append_row(out, q, "time_sampling", qr.stats.seconds_sampling);
    append_row(out, q, "time_source_push", qr.stats.seconds_source_push);
    append_row(out, q, "time_gamma", qr.stats.seconds_gamma);
    append_row(out, q, "time_reverse_push", qr.stats.seconds_reverse_push);
    append_row(out, q, "time_total", qr.seconds_total);
  }

  append_row(out, "all", "avg_error_at_k", report.mean_avg_error);
  append_row(out, "all", "precision_at_k", report.mean_precision);
  append_row(out, "all", "time_total", report.mean_seconds);
  append_row(out, "all", "mem_peak_kb", static_cast<double>(report.peak_rss_kb));
}

int env_thread_cap() {
  const char* v = std::getenv("SIMPUSH_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n < 1) return 0;
  return static_cast<int>(n);
}

}  // namespace simpush
