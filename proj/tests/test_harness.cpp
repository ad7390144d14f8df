#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

#include "simpush/harness.hpp"
#include "test_support.hpp"

using namespace simpush;

namespace {

SimRankVector vec(NodeId query, std::vector<double> scores) {
  return SimRankVector{query, std::move(scores)};
}

// report CSV minus the rows that legitimately differ between runs
std::string stable_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    auto c1 = line.find(',');
    if (c1 != std::string::npos &&
        (line.compare(c1 + 1, 5, "time_") == 0 || line.compare(c1 + 1, 4, "mem_") == 0))
      continue;
    out << line << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("gen_queries: count = n gives a permutation") {
  auto g = testutil::er_digraph(12, 0.2, 1);
  QuerySet qs = gen_queries(g, 12, 5);
  std::set<NodeId> distinct(qs.queries.begin(), qs.queries.end());
  CHECK(distinct.size() == 12);
  CHECK(*distinct.rbegin() == 11);
}

TEST_CASE("gen_queries: reproducible, bounded, replacement modes") {
  auto g = testutil::er_digraph(10, 0.2, 1);
  QuerySet a = gen_queries(g, 6, 42);
  QuerySet b = gen_queries(g, 6, 42);
  CHECK(a.queries == b.queries);
  std::set<NodeId> distinct(a.queries.begin(), a.queries.end());
  CHECK(distinct.size() == 6);  // no duplicates by default

  QuerySet big = gen_queries(g, 100, 7);  // count > n switches to replacement
  CHECK(big.queries.size() == 100);
  for (NodeId q : big.queries) CHECK(q < 10);

  QuerySet forced = gen_queries(g, 5, 11, /*with_replacement=*/true);
  CHECK(forced.queries.size() == 5);
}

TEST_CASE("query file round-trip") {
  auto g = testutil::er_digraph(30, 0.1, 2);
  QuerySet qs = gen_queries(g, 8, 3);
  std::ostringstream out;
  write_queries(qs, out);
  std::istringstream in(out.str());
  QuerySet back = load_queries(in, g.n);
  CHECK(back.queries == qs.queries);

  std::istringstream bad("5\n99\n");
  CHECK_THROWS_AS(load_queries(bad, 30), std::runtime_error);
}

TEST_CASE("avg_error_at_k worked fixture") {
  // truth top-3 (excluding query 3) is {0,1,2}
  SimRankVector truth = vec(3, {0.6, 0.3, 0.1, 1.0});
  SimRankVector est = vec(3, {0.59, 0.28, 0.1, 1.0});
  CHECK(avg_error_at_k(truth, est, 3) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(avg_error_at_k(truth, truth, 3) == 0.0);

  SimRankVector shifted = vec(3, {0.595, 0.295, 0.095, 1.0});
  CHECK(avg_error_at_k(truth, shifted, 3) == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("precision_at_k set arithmetic") {
  // truth ranks 1,2,3; est ranks 2,3,4
  SimRankVector truth = vec(0, {1.0, 0.5, 0.4, 0.3, 0.05});
  SimRankVector est = vec(0, {1.0, 0.01, 0.5, 0.4, 0.3});
  CHECK(precision_at_k(truth, est, 3) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(precision_at_k(truth, truth, 3) == 1.0);

  SimRankVector disjoint = vec(0, {1.0, 0.0, 0.0, 0.0, 0.9});
  CHECK(precision_at_k(truth, disjoint, 1) == 0.0);
}

TEST_CASE("ties broken by ascending node id") {
  SimRankVector truth = vec(0, {1.0, 0.5, 0.5, 0.5, 0.5});
  std::vector<NodeId> top = truth_top_k(truth, 2);
  CHECK(top == std::vector<NodeId>{1, 2});

  // an estimate that ties everything still ranks deterministically
  SimRankVector est = vec(0, {1.0, 0.2, 0.2, 0.2, 0.2});
  CHECK(precision_at_k(truth, est, 2) == 1.0);
}

TEST_CASE("k beyond nonzero truth support truncates and flags") {
  SimRankVector truth = vec(0, {1.0, 0.4, 0.0, 0.0});
  SimRankVector est = vec(0, {1.0, 0.38, 0.0, 0.0});
  bool flagged = false;
  double err = avg_error_at_k(truth, est, 3, &flagged);
  CHECK(flagged);
  CHECK(err == doctest::Approx(0.02).epsilon(1e-9));
  flagged = false;
  CHECK(precision_at_k(truth, est, 3, &flagged) == 1.0);
  CHECK(flagged);
}

TEST_CASE("truth CSV loading") {
  std::istringstream in("u,v,s\n0,1,0.25\n0,2,0.5\n1,0,0.25\n");
  TruthTable t = load_truth_csv(in, 3);
  REQUIRE(t.rows.count(0) == 1);
  CHECK(t.rows[0][1] == 0.25);
  CHECK(t.rows[0][2] == 0.5);
  CHECK(t.rows[1][0] == 0.25);

  std::istringstream bad("0,9,0.5\n");
  CHECK_THROWS_AS(load_truth_csv(bad, 3), std::runtime_error);
}

TEST_CASE("run_eval end to end with the exact oracle") {
  auto g = testutil::er_digraph(40, 0.12, 9);
  QueryParams p = derive_params(0.6, 0.05, 1e-4, 17);
  QuerySet qs = gen_queries(g, 10, 17);
  TruthTable truth = truth_from_exact(exact_simrank(g, 0.6, 40));

  MetricsReport r = run_eval(g, qs, p, 10, truth);
  REQUIRE(r.per_query.size() == 10);
  CHECK(std::is_sorted(r.per_query.begin(), r.per_query.end(),
                       [](auto& a, auto& b) { return a.query < b.query; }));
  for (const QueryReport& q : r.per_query) {
    CHECK(q.avg_error >= 0.0);
    CHECK(q.avg_error <= 0.05 + 1e-9);  // per-value eps bound dominates AvgError
    CHECK(q.precision >= 0.0);
    CHECK(q.precision <= 1.0);
  }
  CHECK(r.mean_avg_error <= 0.05);

  // missing truth row
  TruthTable empty;
  CHECK_THROWS_AS(run_eval(g, qs, p, 10, empty), std::invalid_argument);
}

TEST_CASE("report determinism excluding timing and memory rows") {
  auto g = testutil::er_digraph(30, 0.15, 4);
  QueryParams p = derive_params(0.6, 0.05, 1e-4, 23);
  QuerySet qs = gen_queries(g, 6, 23);
  TruthTable truth = truth_from_exact(exact_simrank(g, 0.6, 40));

  std::ostringstream a, b;
  write_report_csv(run_eval(g, qs, p, 8, truth), a);
  write_report_csv(run_eval(g, qs, p, 8, truth), b);
  CHECK(stable_rows(a.str()) == stable_rows(b.str()));
  CHECK(stable_rows(a.str()).find("param,seed,23") != std::string::npos);
}

TEST_CASE("SIMPUSH_THREADS parsing") {
  unsetenv("SIMPUSH_THREADS");
  CHECK(env_thread_cap() == 0);
  setenv("SIMPUSH_THREADS", "4", 1);
  CHECK(env_thread_cap() == 4);
  setenv("SIMPUSH_THREADS", "junk", 1);
  CHECK(env_thread_cap() == 0);
  setenv("SIMPUSH_THREADS", "-2", 1);
  CHECK(env_thread_cap() == 0);
  unsetenv("SIMPUSH_THREADS");
}
