#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "horolab/slack_graph.hpp"

using namespace horolab;

namespace {

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

// Independent exhaustive-concatenation oracle: BFS over all edge paths with
// slack <= B, summing left to right exactly like the enumerator replays
// witnesses, so agreement is bitwise.
std::vector<double> oracle_path_slacks(const SlackGraph& g, int y, int x, double B) {
  struct Node { int v; double s; };
  std::vector<double> found;
  if (y == x) found.push_back(0.0);
  std::vector<Node> frontier{{y, 0.0}};
  while (!frontier.empty()) {
    std::vector<Node> next;
    for (const auto& nd : frontier) {
      for (const auto& e : g.edges) {
        if (e.src != nd.v || !e.slack) continue;
        double s = nd.s + *e.slack;
        if (s > B + 1e-12) continue;
        if (e.dst == x) found.push_back(s);
        next.push_back({e.dst, s});
      }
    }
    frontier = std::move(next);
    if (frontier.size() > 2000000) FAIL("oracle blowup");
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              found.end());
  return found;
}

std::vector<double> zvalues(const TruncatedZSet& z) {
  std::vector<double> out;
  for (const auto& v : z.values) out.push_back(v.value);
  return out;
}

SlackGraph one_vertex_graph(std::vector<double> self_slacks) {
  std::vector<GraphEdge> edges;
  int k = 0;
  for (double s : self_slacks) {
    GraphEdge e;
    e.id = "e" + std::to_string(k++);
    e.src = e.dst = 0;
    e.slack = s;
    edges.push_back(e);
  }
  return build_graph({{"v", VertexFlag::imc}}, edges);
}

}  // namespace

TEST_CASE("build_graph validation") {
  CHECK_NOTHROW(one_vertex_graph({1.0, 1.5}));
  GraphEdge bad;
  bad.id = "b";
  bad.src = bad.dst = 0;
  bad.slack = -0.5;
  CHECK_THROWS_AS(build_graph({{"v", VertexFlag::imc}}, {bad}), Error);
  GraphEdge dangling;
  dangling.id = "d";
  dangling.src = 0;
  dangling.dst = 3;
  dangling.slack = 1.0;
  CHECK_THROWS_AS(build_graph({{"v", VertexFlag::imc}}, {dangling}), Error);
  // two vertices, no edges: valid, empty Hom between distinct vertices
  auto g = build_graph({{"a", VertexFlag::imc}, {"b", VertexFlag::imc}}, {});
  auto z = enumerate_path_slacks(g, 0, 1, 5.0, 1.0);
  CHECK(z.values.empty());
}

TEST_CASE("single vertex arithmetic progressions") {
  auto g = one_vertex_graph({1.0});
  auto z = enumerate_path_slacks(g, 0, 0, 3.5, 0.9);
  auto vals = zvalues(z);
  REQUIRE(vals.size() == 4);
  CHECK(vals[0] == 0.0);
  CHECK(vals[1] == 1.0);
  CHECK(vals[2] == 2.0);
  CHECK(vals[3] == 3.0);

  auto g2 = one_vertex_graph({1.0, 1.5});
  auto z2 = enumerate_path_slacks(g2, 0, 0, 3.2, 0.9);
  auto vals2 = zvalues(z2);
  std::vector<double> want{0.0, 1.0, 1.5, 2.0, 2.5, 3.0};
  REQUIRE(vals2.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i)
    CHECK(vals2[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("witness integrity: replay is exact") {
  auto g = one_vertex_graph({1.0, 1.5});
  auto z = enumerate_path_slacks(g, 0, 0, 6.0, 0.9);
  for (const auto& v : z.values) CHECK(replay_witness(z, v) == v.value);
}

TEST_CASE("enumeration equals brute force on random graphs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    int nv = 1 + static_cast<int>(uniform01(rng) * 3);
    int ne = 1 + static_cast<int>(uniform01(rng) * 4);
    std::vector<GraphVertex> vs;
    for (int i = 0; i < nv; ++i)
      vs.push_back({"v" + std::to_string(i), VertexFlag::imc});
    std::vector<GraphEdge> es;
    double min_slack = kInf;
    for (int i = 0; i < ne; ++i) {
      GraphEdge e;
      e.id = "e" + std::to_string(i);
      e.src = static_cast<int>(uniform01(rng) * nv);
      e.dst = static_cast<int>(uniform01(rng) * nv);
      e.slack = 0.3 + 2.0 * uniform01(rng);
      min_slack = std::min(min_slack, *e.slack);
      es.push_back(e);
    }
    auto g = build_graph(vs, es);
    double B = std::min(20.0 * min_slack, 9.0);
    int y = static_cast<int>(uniform01(rng) * nv);
    int x = static_cast<int>(uniform01(rng) * nv);
    auto z = enumerate_path_slacks(g, y, x, B, min_slack, {}, 2000000);
    auto want = oracle_path_slacks(g, y, x, B);
    auto got = zvalues(z);
    // exact set equality at the 1e-12 dedup resolution; representatives of a
    // cluster may differ bitwise because path sums reorder
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
      CHECK(std::abs(got[i] - want[i]) <= 1e-11);
  }
}

TEST_CASE("semigroup property of Z_xx") {
  auto g = one_vertex_graph({1.0, 1.7});
  auto z = enumerate_path_slacks(g, 0, 0, 8.0, 0.9);
  for (const auto& a : z.values)
    for (const auto& b : z.values) {
      double s = a.value + b.value;
      if (s > z.budget + 1e-12) continue;
      CHECK(zset_contains(z, s, 1e-9));
    }
}

TEST_CASE("derived sets") {
  // finite set with all gaps > h: empty derived set
  auto lv = derived_sets({0.0, 1.0, 2.5}, 1e-3, 3);
  CHECK(lv[0].empty());

  // 1/n tail: at resolution h the h-close cluster survives one level
  std::vector<double> s;
  for (int n = 1; n <= 10000; ++n) s.push_back(1.0 / n);
  s.push_back(0.0);
  auto lv2 = derived_sets(s, 1e-6, 4);
  // points whose nearest neighbor gap <= 1e-6: 1/n for n(n+1) >= 1e6
  CHECK(!lv2[0].empty());
  for (double v : lv2[0]) CHECK(v <= 1.0 / 999);
  // levels decrease
  for (std::size_t i = 1; i < lv2.size(); ++i) {
    for (double v : lv2[i]) {
      bool in_prev = false;
      for (double w : lv2[i - 1]) in_prev = in_prev || v == w;
      CHECK(in_prev);
    }
  }
}

TEST_CASE("family edges expand adaptively and filtrate") {
  // one vertex, one family converging to base = 2*s0 from above, plus the
  // explicit edge realizing the limit as a 2-path
  double s0 = 1.0, coeff = 0.5, rate = 1.4;
  GraphEdge plain;
  plain.id = "e";
  plain.src = plain.dst = 0;
  plain.slack = s0;
  GraphEdge fam;
  fam.id = "f";
  fam.src = fam.dst = 0;
  fam.family = FamilySpec{2 * s0, coeff, rate, 0};
  auto g = build_graph({{"v", VertexFlag::imc}}, {plain, fam});

  ExpansionOptions opt;
  opt.tolerance = 1e-7;
  auto z = enumerate_path_slacks(g, 0, 0, 2.6, 0.9, opt);
  // family member k=0 sits at 2 + 2 log(1.5)... above budget; k large near 2
  bool saw_member = false;
  for (const auto& v : z.values)
    if (v.value > 2.0 && v.value < 2.6 && std::abs(v.value - 2.0) > 1e-9)
      saw_member = true;
  CHECK(saw_member);

  // derived set at suitable h recovers the family limit 2*s0 (the 2-path)
  std::vector<double> vals = zvalues(z);
  auto lv = derived_sets(vals, 2e-2, 2);
  REQUIRE(!lv[0].empty());
  bool limit_in = false;
  for (double v : lv[0])
    if (std::abs(v - 2.0) < 2e-2) limit_in = true;
  CHECK(limit_in);
}

TEST_CASE("subadditivity check and constructed failure") {
  auto g = one_vertex_graph({1.0, 1.5});
  auto zb = enumerate_path_slacks(g, 0, 0, 3.0, 0.9);
  auto zbig = enumerate_path_slacks(g, 0, 0, 6.0, 0.9);
  CHECK(check_subadditivity(zb, zb, zbig).empty());

  // deleting a value creates a violation
  TruncatedZSet broken = zbig;
  std::vector<ZValue> kept;
  for (auto& v : broken.values)
    if (std::abs(v.value - 2.5) > 1e-9) kept.push_back(v);
  broken.values = kept;
  auto bad = check_subadditivity(zb, zb, broken);
  CHECK(!bad.empty());

  // incompatible budgets
  CHECK_THROWS_AS(check_subadditivity(zbig, zbig, zb), Error);
}

TEST_CASE("ray threshold on the two-vertex imc/leaf example") {
  std::vector<GraphVertex> vs{{"x", VertexFlag::imc}, {"w", VertexFlag::infinite_leaf}};
  std::vector<GraphEdge> es;
  auto mk = [&](const std::string& id, int s, int d, double slack) {
    GraphEdge e;
    e.id = id;
    e.src = s;
    e.dst = d;
    e.slack = slack;
    es.push_back(e);
  };
  mk("s1", 0, 0, 1.0);
  mk("s2", 0, 0, 1.3);
  mk("xw", 0, 1, 0.7);
  mk("wx", 1, 0, 0.9);
  auto g = build_graph(vs, es);

  auto res = ray_threshold(g, 0, 0, 6.0, 0.5);
  CHECK(res.rho == doctest::Approx(1.6).epsilon(1e-12));
  REQUIRE(res.assembled.ray_start.has_value());
  CHECK(*res.assembled.ray_start == doctest::Approx(1.6));
  auto vals = zvalues(res.assembled);
  std::vector<double> want{0.0, 1.0, 1.3};
  REQUIRE(vals.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i)
    CHECK(vals[i] == doctest::Approx(want[i]).epsilon(1e-12));
  // nothing at or above rho, and membership includes the ray
  for (double v : vals) CHECK(v < res.rho);
  CHECK(zset_contains(res.assembled, 2.0));
  CHECK(zset_contains(res.assembled, 2.3));
  CHECK(!zset_contains(res.assembled, 1.45));

  // no infinite leaf: rho = inf, plain enumeration
  auto g2 = one_vertex_graph({1.0, 1.3});
  auto res2 = ray_threshold(g2, 0, 0, 3.0, 0.9);
  CHECK(std::isinf(res2.rho));
  CHECK(!res2.assembled.ray_start.has_value());

  // leaf self-pair: rho = 0, Z = [0, inf)
  auto g3 = build_graph({{"w", VertexFlag::infinite_leaf}}, {});
  auto res3 = ray_threshold(g3, 0, 0, 3.0, 0.9);
  CHECK(res3.rho == 0.0);
  CHECK(zset_contains(res3.assembled, 1.2345));
}

TEST_CASE("census counts and reversal") {
  auto mk_graph = [&](int nv) {
    std::vector<GraphVertex> vs;
    for (int i = 0; i < nv; ++i)
      vs.push_back({"v" + std::to_string(i), VertexFlag::imc});
    std::vector<GraphEdge> es;
    int id = 0;
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nv; ++j) {
        GraphEdge e;
        e.id = "e" + std::to_string(id++);
        e.src = i;
        e.dst = j;
        e.slack = 0.9 + 0.37 * i + 0.21 * j;
        es.push_back(e);
      }
    return build_graph(vs, es);
  };
  for (int nv : {1, 2, 3}) {
    auto g = mk_graph(nv);
    auto rep = census(g, 5.0, 0.8);
    CHECK(rep.class_count == static_cast<std::size_t>(2 * nv + 1));
    CHECK(rep.reversal_ok);
    CHECK(rep.membership_reflexive);
  }
}

TEST_CASE("orbit closure membership predicate") {
  auto g = one_vertex_graph({1.0, 1.5});
  auto z = enumerate_path_slacks(g, 0, 0, 3.2, 0.9);
  CHECK(orbit_closure_contains(z, {0.0, "v"}));
  CHECK(orbit_closure_contains(z, {2.5, "v"}));
  CHECK(!orbit_closure_contains(z, {1.2, "v"}));
}

TEST_CASE("matrix closure generates the twist members") {
  // one vertex backed by matrices: a self connector with positive slack and
  // the vertex rate; closure must produce members converging to 2x the edge
  MoebiusElement v = MoebiusElement::normalize(2, 1, 1, 1);
  double c = 1.5;
  GraphEdge e;
  e.id = "g";
  e.src = e.dst = 0;
  e.slack = log_delta(v);
  e.matrix = v;
  auto g = build_graph({{"v", VertexFlag::imc}}, {e}, {c});

  ExpansionOptions opt;
  opt.budget = 4.0;
  opt.tolerance = 1e-9;
  auto edges = expand_edges(g, opt);
  // members log(delta(a_{-kc} v a_{kc} v)) = 2 log_delta(v) + 2 log(1 + un e^{-kc})
  double base = 2 * log_delta(v);
  auto nau = bruhat_nau(v);
  int members = 0;
  for (const auto& ee : edges)
    if (ee.id.rfind("tw(", 0) == 0) ++members;
  CHECK(members > 3);
  for (int k = 1; k <= 3; ++k) {
    double want = base + 2 * std::log(1 + nau.u_param * nau.n_param * std::exp(-k * c));
    bool found = false;
    for (const auto& ee : edges)
      if (std::abs(ee.slack - want) < 1e-9) found = true;
    CHECK(found);
  }
}
