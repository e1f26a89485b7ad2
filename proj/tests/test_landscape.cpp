#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "sleeptda/landscape.hpp"
#include "support.hpp"

using namespace sleeptda;
using namespace sleeptda::landscape;
using persistence::PersistenceDiagram;
using sleeptda::testing::random_diagram;
using Catch::Matchers::WithinAbs;

namespace {

// Step 0.5 on [0, 4] so the hand-evaluated points are grid samples.
const Grid kHalfGrid(0.0, 0.5, 9);

std::size_t idx(double t) { return static_cast<std::size_t>(t / 0.5); }

PersistenceDiagram diagram(std::initializer_list<std::pair<double, double>> bars, int dim = 0) {
  PersistenceDiagram d;
  for (auto [b, e] : bars) d.points.push_back({b, e, dim});
  return d;
}

}  // namespace

TEST_CASE("landscape of a single bar", "[landscape]") {
  const auto l = landscape_from_diagram(diagram({{0, 2}}), 0, kHalfGrid, 3);
  CHECK(l(0, idx(1)) == 1.0);
  CHECK(l(0, idx(0)) == 0.0);
  CHECK(l(0, idx(2)) == 0.0);
  for (double v : l.level(1)) CHECK(v == 0.0);
  for (double v : l.level(2)) CHECK(v == 0.0);
}

TEST_CASE("landscape of the empty diagram is zero", "[landscape]") {
  const auto l = landscape_from_diagram(PersistenceDiagram{}, 0, Grid{}, 6);
  for (double v : l.values()) CHECK(v == 0.0);
}

TEST_CASE("landscape of two overlapping bars", "[landscape]") {
  const auto l = landscape_from_diagram(diagram({{0, 2}, {1, 3}}, 1), 1, kHalfGrid, 2);
  CHECK(l(0, idx(1)) == 1.0);
  CHECK(l(0, idx(2)) == 1.0);
  CHECK(l(0, idx(1.5)) == 0.5);
  CHECK(l(1, idx(1.5)) == 0.5);
  CHECK(l(1, idx(1)) == 0.0);
  // Only bars of the requested dimension contribute.
  const auto other_dim = landscape_from_diagram(diagram({{0, 2}}, 1), 0, kHalfGrid, 2);
  for (double v : other_dim.values()) CHECK(v == 0.0);
}

TEST_CASE("essential classes are dropped or capped", "[landscape]") {
  PersistenceDiagram d = diagram({{0, 0.5}});
  d.essential[0] = 1;
  const Grid g = Grid::spanning(0.0, 1.0, 5);
  const auto dropped = landscape_from_diagram(d, 0, g, 2);
  CHECK(dropped(1, 2) == 0.0);
  CHECK(dropped(0, 2) == 0.0);
  CHECK(dropped(0, 1) == 0.25);
  const auto capped = landscape_from_diagram(d, 0, g, 2, {EssentialMode::Cap, 1.0});
  CHECK(capped(0, 2) == 0.5);
  CHECK(capped(1, 1) == 0.25);
}

TEST_CASE("default grid covers [0, 1] with 256 samples", "[landscape]") {
  const Grid g;
  CHECK(g.size == 256);
  CHECK(g.at(0) == 0.0);
  CHECK_THAT(g.end(), WithinAbs(1.0, 1e-15));
  CHECK_THROWS_AS(Grid(0.0, 0.0, 4), Error);
  CHECK_THROWS_AS(Grid(0.0, 0.1, 0), Error);
}

TEST_CASE("average_landscapes", "[landscape]") {
  const auto a = landscape_from_diagram(diagram({{0, 2}}), 0, kHalfGrid, 2);
  const auto zero = PersistenceLandscape(kHalfGrid, 2);
  const std::vector<PersistenceLandscape> same{a, a, a};
  CHECK(average_landscapes(same) == a);

  const std::vector<PersistenceLandscape> half{a, zero};
  const auto h = average_landscapes(half);
  for (std::size_t v = 0; v < a.values().size(); ++v) CHECK(h.values()[v] == a.values()[v] / 2);

  const auto b = landscape_from_diagram(diagram({{0, 1}, {2, 3}}), 0, kHalfGrid, 2);
  const std::vector<PersistenceLandscape> peaks{a, b};
  // lambda_1 at t = 2.5 is 0 for a and 0.5 for b; at t = 1 it is 1 and 0.
  CHECK(average_landscapes(peaks)(0, idx(2.5)) == 0.25);
  CHECK(average_landscapes(peaks)(0, idx(1)) == 0.5);

  const auto other = PersistenceLandscape(Grid::spanning(0.0, 4.0, 10), 2);
  const std::vector<PersistenceLandscape> mixed{a, other};
  try {
    average_landscapes(mixed);
    FAIL("expected incompatible-grid error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IncompatibleGrid);
  }
  CHECK_THROWS_AS(average_landscapes(std::vector<PersistenceLandscape>{}), Error);
}

TEST_CASE("sup_difference examples", "[landscape]") {
  const auto a = landscape_from_diagram(diagram({{0, 2}}), 0, kHalfGrid, 2);
  const auto empty = PersistenceLandscape(kHalfGrid, 2);
  CHECK(sup_difference(a, a) == 0.0);
  CHECK(sup_difference(a, empty) == 1.0);
  auto scaled = a;
  for (double& v : scaled.values()) v *= 0.5;
  CHECK(sup_difference(a, scaled) == 0.5);
  CHECK(sup_difference(empty, a, Statistic::Signed) == 0.0);
  CHECK(sup_difference(a, empty, Statistic::Signed) == 1.0);
  CHECK_THROWS_AS(sup_difference(a, PersistenceLandscape(kHalfGrid, 3)), Error);
}

TEST_CASE("landscape properties on random diagrams", "[landscape][property]") {
  std::mt19937_64 rng(42);
  const Grid g;
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = trial % 2;
    auto d = random_diagram(rng, 8, 1.0, dim);
    const auto l = landscape_from_diagram(d, dim, g, 6);
    double lo = 2.0, hi = -1.0;
    for (const auto& p : d.points) {
      lo = std::min(lo, p.birth);
      hi = std::max(hi, p.death);
    }
    for (std::size_t k = 0; k < 6; ++k)
      for (std::size_t i = 0; i < g.size; ++i) {
        REQUIRE(l(k, i) >= 0.0);
        if (k + 1 < 6) REQUIRE(l(k, i) >= l(k + 1, i));
        if (i + 1 < g.size) REQUIRE(std::abs(l(k, i + 1) - l(k, i)) <= g.step + 1e-12);
        if (g.at(i) <= lo || g.at(i) >= hi) REQUIRE(l(k, i) == 0.0);
      }
    auto bigger = d;
    bigger.merge(random_diagram(rng, 3, 1.0, dim));
    const auto lb = landscape_from_diagram(bigger, dim, g, 6);
    for (std::size_t v = 0; v < l.values().size(); ++v) REQUIRE(lb.values()[v] >= l.values()[v]);
  }
}

TEST_CASE("averaging preserves level ordering and the Lipschitz bound", "[landscape][property]") {
  std::mt19937_64 rng(8);
  const Grid g;
  std::vector<PersistenceLandscape> set;
  for (int i = 0; i < 20; ++i) set.push_back(landscape_from_diagram(random_diagram(rng, 6), 0, g, 6));
  const auto avg = average_landscapes(set);
  for (std::size_t k = 0; k < 6; ++k)
    for (std::size_t i = 0; i < g.size; ++i) {
      if (k + 1 < 6) REQUIRE(avg(k, i) >= avg(k + 1, i));
      if (i + 1 < g.size) REQUIRE(std::abs(avg(k, i + 1) - avg(k, i)) <= g.step + 1e-12);
    }
}

TEST_CASE("sup_difference is a pseudometric", "[landscape][property]") {
  std::mt19937_64 rng(13);
  const Grid g;
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = landscape_from_diagram(random_diagram(rng, 6), 0, g, 6);
    const auto b = landscape_from_diagram(random_diagram(rng, 6), 0, g, 6);
    const auto c = landscape_from_diagram(random_diagram(rng, 6), 0, g, 6);
    REQUIRE(sup_difference(a, a) == 0.0);
    REQUIRE(sup_difference(a, b) == sup_difference(b, a));
    REQUIRE(sup_difference(a, c) <= sup_difference(a, b) + sup_difference(b, c) + 1e-15);
  }
}

TEST_CASE("landscape text round trip", "[landscape][io]") {
  std::mt19937_64 rng(1);
  const auto l = landscape_from_diagram(random_diagram(rng, 6), 0, Grid{}, 6);
  const auto text = to_text(l);
  CHECK(text.starts_with("landscape 0 "));
  std::istringstream is(text);
  CHECK(read_landscape(is) == l);
  std::istringstream truncated("landscape 0 0.5 4 1\n0 1 2\n");
  CHECK_THROWS_AS(read_landscape(truncated), Error);
}
