#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "ell/gadgets.hpp"
#include "ell/folagic.hpp"
#include "ell/util.hpp"

using namespace ell;

TEST_CASE("path gadget: sizes and degree histogram") {
  SUBCASE("the 98-block arrow at D=2 parameters has 2598 vertices") {
    CHECK(path_gadget_size(25, 98) == 2598);
  }
  SUBCASE("illustrated shape d=6, l=3, p=2") {
    auto pg = path_gadget(6, 3, 2);
    CHECK(pg.graph.n() == 3 * 7 + 12);
    std::map<int64_t, int64_t> hist;
    for (int64_t v = 0; v < pg.graph.n(); ++v) hist[pg.graph.degree(v)]++;
    CHECK(hist[5] == 2);  // exactly the two endpoints have degree d-1
    CHECK(hist[6] == pg.graph.n() - 2);
    CHECK(pg.graph.degree(pg.u0) == 5);
    CHECK(pg.graph.degree(pg.vl) == 5);
  }
  SUBCASE("degree histogram for d=25") {
    auto pg = path_gadget(25, 4, 3);
    std::map<int64_t, int64_t> hist;
    for (int64_t v = 0; v < pg.graph.n(); ++v) hist[pg.graph.degree(v)]++;
    CHECK(hist[24] == 2);
    CHECK(hist[25] == pg.graph.n() - 2);
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS(path_gadget(2, 3, 1));
    CHECK_THROWS(path_gadget(6, 3, 4));
  }
}

TEST_CASE("encode: counts, degrees, and the triangle criterion") {
  auto base = random_regular_base(2, 1, 16);
  auto a = build_model(base.graph, 1);
  auto enc = encode(a);
  const auto& prov = enc.provenance;

  CHECK(prov.original_count == 17);
  CHECK(prov.d == 25);
  CHECK(prov.l == 98);
  CHECK(prov.aux_per_arrow == 2598);
  CHECK(int64_t(prov.arrows.size()) == a.total_tuples());
  CHECK(enc.graph.n() == 17 + int64_t(prov.arrows.size()) * 2598);

  SUBCASE("original vertex degrees equal their occurrence counts") {
    for (int32_t v = 0; v < 17; ++v)
      CHECK(enc.graph.degree(v) == a.degree_occurrence(v));
  }
  SUBCASE("every auxiliary vertex has degree exactly d") {
    for (int64_t v = 17; v < enc.graph.n(); ++v) CHECK(enc.graph.degree(v) == 25);
  }
  SUBCASE("triangle criterion recovers exactly the original vertices") {
    auto orig = original_vertices(enc.graph);
    REQUIRE(orig.size() == 17);
    for (int64_t i = 0; i < 17; ++i) CHECK(orig[i] == i);
  }
  SUBCASE("non-models are rejected") {
    Structure bad = a;
    auto lay = layout_of(a.sig()).value();
    bad.remove_tuple(lay.f_sym(0), {0, 1});
    CHECK_THROWS(encode(bad));
  }
}

TEST_CASE("triangle criterion on plain graphs") {
  SUBCASE("a lone triangle has no triangle-free vertices") {
    SimpleGraph g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(0, 2);
    g.finalize();
    CHECK(original_vertices(g).empty());
  }
  SUBCASE("an edgeless graph is all original") {
    SimpleGraph g(4);
    g.finalize();
    CHECK(original_vertices(g).size() == 4);
  }
}

TEST_CASE("decode inverts encode exactly at depth 1") {
  auto base = random_regular_base(2, 1, 16);
  auto a = build_model(base.graph, 1);
  auto enc = encode(a);
  SUBCASE("with the D parameter") {
    auto b = decode(enc.graph, 2);
    CHECK(b == a);
  }
  SUBCASE("with D inferred from the gadget degree") {
    auto b = decode(enc.graph);
    CHECK(b == a);
  }
  SUBCASE("pipeline check passes") {
    auto r = decode_and_check(enc.graph, base.graph);
    INFO(r.witness);
    CHECK(r.ok);
  }
}

TEST_CASE("decode flags mutations and dangling components") {
  auto base = random_regular_base(2, 1, 16);
  auto a = build_model(base.graph, 1);
  auto enc = encode(a);

  SUBCASE("extra isolated triangle is a dangling component") {
    SimpleGraph g(enc.graph.n() + 3);
    for (int64_t v = 0; v < enc.graph.n(); ++v) {
      const uint32_t* row = enc.graph.row(v);
      for (int64_t i = 0; i < enc.graph.degree(v); ++i)
        if (int64_t(row[i]) > v) g.add_edge(v, row[i]);
    }
    int64_t t0 = enc.graph.n();
    g.add_edge(t0, t0 + 1);
    g.add_edge(t0 + 1, t0 + 2);
    g.add_edge(t0, t0 + 2);
    g.finalize();
    CHECK_THROWS_WITH_AS(decode(g, 2), doctest::Contains("dangling"), DecodeError);
  }
  SUBCASE("one deleted gadget edge names the arrow") {
    // drop one inner edge of the first arrow
    const auto& ar = enc.provenance.arrows.front();
    SimpleGraph g(enc.graph.n());
    bool skipped = false;
    for (int64_t v = 0; v < enc.graph.n(); ++v) {
      const uint32_t* row = enc.graph.row(v);
      for (int64_t i = 0; i < enc.graph.degree(v); ++i) {
        if (int64_t(row[i]) <= v) continue;
        if (!skipped && v == ar.base + 1 && int64_t(row[i]) == ar.base + 2) {
          skipped = true;  // an internal clique edge of block 0
          continue;
        }
        g.add_edge(v, row[i]);
      }
    }
    REQUIRE(skipped);
    g.finalize();
    CHECK_THROWS_AS(decode(g, 2), DecodeError);
  }
}

TEST_CASE("expansion transfer on structured cuts of a depth-1 encoding") {
  auto base = random_regular_base(2, 1, 16);
  auto a = build_model(base.graph, 1);
  auto enc = encode(a);
  const auto& prov = enc.provenance;
  const double dd = 25.0;
  const double cd = double(prov.aux_per_arrow);
  const double eps = 4.0 / 12.0;  // D^2/12
  const double xi =
      std::min({(2 * dd * cd - cd - 1) / (2 * dd * cd * cd),
                eps * (1.0 / (2 * dd * cd)) * ((dd * cd - 2) / (2 + dd * cd)),
                2.0 / (dd * cd * cd)});
  REQUIRE(xi > 0);

  auto check_cut = [&](const std::vector<int64_t>& s) {
    if (s.empty() || int64_t(s.size()) > enc.graph.n() / 2) return;
    int64_t cut = graph_cut(enc.graph, s);
    CHECK(double(cut) >= xi * double(s.size()));
  };

  // the root and its bookkeeping arrows
  std::vector<int64_t> root_side{0};
  for (const auto& ar : prov.arrows)
    if (ar.x == 0 && ar.y == 0)
      for (int64_t u = 0; u < prov.aux_per_arrow; ++u)
        root_side.push_back(ar.base + u);
  check_cut(root_side);

  // a single arrow's interior
  {
    std::vector<int64_t> s;
    for (int64_t u = 0; u < prov.aux_per_arrow; ++u)
      s.push_back(prov.arrows[0].base + u);
    check_cut(s);
  }

  // random vertex subsets
  Rng rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<int64_t> s;
    for (int64_t v = 0; v < enc.graph.n(); ++v)
      if (rng.below(3) == 0) s.push_back(v);
    if (int64_t(s.size()) > enc.graph.n() / 2) s.resize(enc.graph.n() / 2);
    check_cut(s);
  }
}
