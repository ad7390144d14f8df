#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "simpush/engine.hpp"
#include "simpush/params.hpp"
#include "test_support.hpp"

using namespace simpush;

namespace {

// Layered fixture: u=0 <- {w_a=1, x1=2, z=3}; w_a <- {w_d=4, w_e=5};
// x1 <- {w_e=5, y=6}; w_d <- w_h=7; w_e <- {w_h=7, w_p=8}.
// With eps_h=0.12, L=3: attention = {w_a, x1, z}@1, {w_e}@2, {w_h}@3.
struct Fixture {
  DirectedGraph g = testutil::from_edges(
      9, {{1, 0}, {2, 0}, {3, 0}, {4, 1}, {5, 1}, {5, 2}, {6, 2}, {7, 4}, {7, 5}, {8, 5}});
  QueryParams p = derive_params(0.6, 0.05, 1e-4, 0);
  SourceGraph sg;
  AttentionSets att;

  Fixture() {
    p.eps_h = 0.12;
    auto res = source_push(g, 0, 3, p);
    sg = std::move(res.sg);
    att = std::move(res.att);
  }
};

}  // namespace

TEST_CASE("layered fixture shapes up as designed") {
  Fixture f;
  REQUIRE(f.sg.max_level == 3);
  CHECK(f.sg.levels[2].hit_of(5) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(f.sg.levels[3].hit_of(7) == doctest::Approx(0.2 * f.p.sqrt_c).epsilon(1e-14));
  CHECK(f.att.total() == 5);
  CHECK(f.att.find(1, 1) >= 0);
  CHECK(f.att.find(2, 5) >= 0);
  CHECK(f.att.find(3, 7) >= 0);
  CHECK(f.att.find(2, 4) < 0);  // h=0.1 below threshold
  CHECK(f.att.find(3, 8) < 0);
}

TEST_CASE("two-step hitting probability matches the worked value 0.45") {
  Fixture f;
  HitTable hit = hitting_in_source_graph(f.g, f.sg, f.att, f.p);

  auto wh = static_cast<std::uint32_t>(f.att.find(3, 7));
  auto we = static_cast<std::uint32_t>(f.att.find(2, 5));

  // single-step rows feeding the aggregate
  CHECK(hit.value(2, 4, wh) == doctest::Approx(f.p.sqrt_c).epsilon(1e-14));       // 0.775
  CHECK(hit.value(2, 5, wh) == doctest::Approx(f.p.sqrt_c / 2).epsilon(1e-14));   // 0.387
  CHECK(hit.value(2, 5, we) == doctest::Approx(1.0).epsilon(1e-15));              // self

  // h~(2)(w_a, w_h) = sqrt(c)/2 * (0.775 + 0.387) = 0.45 exactly
  CHECK(hit.value(1, 1, wh) == doctest::Approx(0.45).epsilon(1e-13));
  // h~(1)(w_a, w_e) = sqrt(c)/2
  CHECK(hit.value(1, 1, we) == doctest::Approx(f.p.sqrt_c / 2).epsilon(1e-14));
  // x1's row: reaches w_h only through w_e
  CHECK(hit.value(1, 2, wh) == doctest::Approx(0.15).epsilon(1e-13));
}

TEST_CASE("deepest attention occurrence has a bare self row") {
  Fixture f;
  HitTable hit = hitting_in_source_graph(f.g, f.sg, f.att, f.p);
  auto wh = static_cast<std::uint32_t>(f.att.find(3, 7));
  const auto* row = hit.attention_row(f.att, wh);
  REQUIRE(row != nullptr);
  CHECK(row->at(wh) == 1.0);
  for (std::uint32_t id = 0; id < hit.width; ++id)
    if (id != wh) CHECK((*row)[id] == 0.0);
}

TEST_CASE("path graph: h~ powers of sqrt(c)") {
  // 0 <- 1 <- 2 <- 3, unit in-degrees
  auto g = testutil::from_edges(4, {{1, 0}, {2, 1}, {3, 2}});
  QueryParams p = derive_params(0.6, 0.05, 1e-4, 0);
  p.eps_h = 0.05;
  auto [sg, att] = source_push(g, 0, 3, p);
  REQUIRE(att.total() == 3);
  HitTable hit = hitting_in_source_graph(g, sg, att, p);

  auto a3 = static_cast<std::uint32_t>(att.find(3, 3));
  auto a2 = static_cast<std::uint32_t>(att.find(2, 2));
  CHECK(hit.value(2, 2, a3) == doctest::Approx(p.sqrt_c).epsilon(1e-14));
  CHECK(hit.value(1, 1, a3) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(hit.value(1, 1, a2) == doctest::Approx(p.sqrt_c).epsilon(1e-14));
}

TEST_CASE("hit table invariants on random graphs") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto g = testutil::er_digraph(40, 0.12, seed + 20);
    QueryParams p = derive_params(0.6, 0.05, 1e-4, 0);
    auto [sg, att] = source_push(g, static_cast<NodeId>(seed), p.max_level, p);
    HitTable hit = hitting_in_source_graph(g, sg, att, p);

    for (int l = 0; l < static_cast<int>(hit.rows.size()); ++l) {
      for (const auto& [node, row] : hit.rows[l]) {
        // per-step sums bounded by (sqrt c)^i
        std::unordered_map<int, double> per_step;
        for (std::uint32_t id = 0; id < hit.width; ++id) {
          double v = row[id];
          if (v == 0.0) continue;
          CHECK(v >= 0.0);
          CHECK(v <= 1.0 + 1e-12);
          per_step[att.level_of(id) - l] += v;
        }
        for (const auto& [i, total] : per_step) {
          CHECK(i >= 0);
          CHECK(total <= std::pow(p.sqrt_c, i) + 1e-9);
        }
      }
    }

    // every attention occurrence at level >= 2... all attention occurrences
    // carry the self entry
    for (std::uint32_t id = 0; id < att.total(); ++id) {
      int l = att.level_of(id);
      if (l < 2 && l < sg.max_level) continue;  // level-1 rows only receive pushes
      const auto* row = hit.attention_row(att, id);
      if (l >= 2) {
        REQUIRE(row != nullptr);
        CHECK(row->at(id) == 1.0);
      }
    }
  }
}
