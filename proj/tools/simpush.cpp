#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "simpush/engine.hpp"
#include "simpush/graph.hpp"
#include "simpush/harness.hpp"
#include "simpush/oracle.hpp"
#include "simpush/params.hpp"

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  return in;
}

int run(int argc, char** argv) {
  CLI::App app{"simpush: index-free single-source SimRank queries"};
  app.require_subcommand(1);

  std::string graph_path;
  bool undirected = false;
  double c = 0.6, eps = 0.02, delta = 1e-4;
  std::uint64_t seed = 1;

  auto add_graph = [&](CLI::App* cmd) {
    cmd->add_option("--graph", graph_path, "edge list or binary graph file")->required();
    cmd->add_flag("--undirected", undirected, "treat edges as undirected");
  };
  auto add_params = [&](CLI::App* cmd) {
    cmd->add_option("--c", c, "SimRank decay, in (0,1)");
    cmd->add_option("--eps", eps, "absolute error bound, in (0,1)");
    cmd->add_option("--delta", delta, "failure probability, in (0,1)");
    cmd->add_option("--seed", seed, "RNG seed");
  };

  // query
  auto* q_cmd = app.add_subcommand("query", "single-source SimRank for one node");
  std::uint64_t q_node = 0;
  std::string q_out;
  add_graph(q_cmd);
  add_params(q_cmd);
  q_cmd->add_option("--node", q_node, "query node id")->required();
  q_cmd->add_option("--out", q_out, "write scores as CSV (default: stdout)");

  // eval
  auto* e_cmd = app.add_subcommand("eval", "run queries and score against ground truth");
  std::string e_queries, e_truth, e_out;
  std::size_t e_gen = 0, e_k = 50;
  bool e_oracle = false;
  int e_iters = 40;
  add_graph(e_cmd);
  add_params(e_cmd);
  auto* eq = e_cmd->add_option("--queries", e_queries, "query file, one node id per line");
  auto* eg = e_cmd->add_option("--gen", e_gen, "generate this many random queries");
  eq->excludes(eg);
  auto* et = e_cmd->add_option("--truth", e_truth, "ground-truth CSV (u,v,s rows)");
  auto* eo = e_cmd->add_flag("--oracle", e_oracle, "compute ground truth with the exact oracle");
  et->excludes(eo);
  e_cmd->add_option("--k", e_k, "top-k size for metrics");
  e_cmd->add_option("--iters", e_iters, "exact oracle iterations (with --oracle)");
  e_cmd->add_option("--out", e_out, "report CSV path")->required();

  // oracle
  auto* o_cmd = app.add_subcommand("oracle", "ground-truth SimRank values");
  bool o_exact = false, o_mc = false;
  int o_iters = 40;
  std::uint64_t o_samples = 1000000, o_node = 0;
  std::string o_out;
  add_graph(o_cmd);
  o_cmd->add_option("--c", c, "SimRank decay, in (0,1)");
  o_cmd->add_option("--seed", seed, "RNG seed (Monte-Carlo mode)");
  auto* oe = o_cmd->add_flag("--exact", o_exact, "iterative exact computation, all pairs");
  auto* om = o_cmd->add_flag("--mc", o_mc, "Monte-Carlo single-source estimate");
  oe->excludes(om);
  o_cmd->add_option("--iters", o_iters, "iterations for --exact");
  o_cmd->add_option("--samples", o_samples, "samples per target for --mc");
  o_cmd->add_option("--node", o_node, "source node for --mc");
  o_cmd->add_option("--out", o_out, "output CSV path")->required();

  // gen-queries
  auto* g_cmd = app.add_subcommand("gen-queries", "sample random query nodes");
  std::size_t g_count = 100;
  std::string g_out;
  bool g_replace = false;
  add_graph(g_cmd);
  g_cmd->add_option("--count", g_count, "number of queries")->required();
  g_cmd->add_option("--seed", seed, "RNG seed");
  g_cmd->add_flag("--with-replacement", g_replace, "allow duplicate queries");
  g_cmd->add_option("--out", g_out, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  simpush::DirectedGraph g = simpush::load_graph(graph_path, !undirected);

  if (q_cmd->parsed()) {
    if (q_node >= g.n) throw std::runtime_error("query node out of range");
    simpush::QueryParams params = simpush::derive_params(c, eps, delta, seed);
    simpush::QueryStats stats;
    simpush::SimRankVector scores =
        simpush::single_source(g, static_cast<simpush::NodeId>(q_node), params, &stats);
    if (q_out.empty()) {
      simpush::write_simrank_csv(scores, std::cout);
    } else {
      auto out = open_out(q_out);
      simpush::write_simrank_csv(scores, out);
    }
    std::cerr << "L=" << stats.level << " attention=" << stats.attention_occurrences
              << " time=" << stats.seconds_sampling + stats.seconds_source_push +
                                 stats.seconds_gamma + stats.seconds_reverse_push
              << "s\n";
    return 0;
  }

  if (e_cmd->parsed()) {
    if (e_queries.empty() && e_gen == 0)
      throw std::runtime_error("eval: provide --queries or --gen");
    if (e_truth.empty() && !e_oracle)
      throw std::runtime_error("eval: provide --truth or --oracle");
    simpush::QueryParams params = simpush::derive_params(c, eps, delta, seed);

    simpush::QuerySet qs;
    if (!e_queries.empty()) {
      auto in = open_in(e_queries);
      qs = simpush::load_queries(in, g.n);
    } else {
      qs = simpush::gen_queries(g, e_gen, seed);
    }

    simpush::TruthTable truth;
    if (e_oracle) {
      truth = simpush::truth_from_exact(simpush::exact_simrank(g, c, e_iters));
    } else {
      auto in = open_in(e_truth);
      truth = simpush::load_truth_csv(in, g.n);
    }

    simpush::MetricsReport report = simpush::run_eval(g, qs, params, e_k, truth);
    auto out = open_out(e_out);
    simpush::write_report_csv(report, out);
    std::cerr << "queries=" << report.per_query.size()
              << " avg_error@" << e_k << '=' << report.mean_avg_error
              << " precision@" << e_k << '=' << report.mean_precision
              << " mean_time=" << report.mean_seconds << "s\n";
    return 0;
  }

  if (o_cmd->parsed()) {
    if (o_exact == o_mc) throw std::runtime_error("oracle: pick exactly one of --exact, --mc");
    auto out = open_out(o_out);
    if (o_exact) {
      simpush::write_simrank_csv(simpush::exact_simrank(g, c, o_iters), out);
    } else {
      if (o_node >= g.n) throw std::runtime_error("oracle: --node out of range");
      simpush::write_simrank_csv(
          simpush::mc_single_source(g, static_cast<simpush::NodeId>(o_node), c, o_samples,
                                    seed, simpush::env_thread_cap()),
          out);
    }
    return 0;
  }

  // gen-queries
  simpush::QuerySet qs = simpush::gen_queries(g, g_count, seed, g_replace);
  auto out = open_out(g_out);
  simpush::write_queries(qs, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
