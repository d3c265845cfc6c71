#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "horolab/chain_prox.hpp"

using namespace horolab;

namespace {

ModelSpec rotation_spec(double alpha) {
  ModelSpec s;
  s.kind = ModelKind::rotation;
  s.alpha = alpha;
  return s;
}

ModelSpec laminar2_spec() {
  ModelSpec s;
  s.kind = ModelKind::laminar;
  s.laminar = {{48, 0.02, 0.6}, {48, 0.02, 0.6}};
  s.separation = 0.3;
  return s;
}

// Exhaustive tiny-system oracle for interception cost: DFS over all chains.
double oracle_cost(const DiscretizedSystem& sys, int x, int y, int M) {
  double best = kInf;
  std::vector<int> target(M + 1);
  target[0] = y;
  for (int m = 1; m <= M; ++m) target[m] = sys.sigma[target[m - 1]];
  struct Node { int i; int m; double c; };
  std::vector<Node> stack{{x, 0, 0.0}};
  while (!stack.empty()) {
    Node nd = stack.back();
    stack.pop_back();
    if (nd.m >= 1 && within_terminal(sys, nd.i, target[nd.m]))
      best = std::min(best, nd.c);
    if (nd.m == M || nd.c >= best) continue;
    int moved = sys.sigma[nd.i];
    for (int j = 0; j < sys.size(); ++j) {
      double c = nd.c + sys.metric(moved, j);
      if (c < best) stack.push_back({j, nd.m + 1, c});
    }
  }
  return best;
}

}  // namespace

TEST_CASE("discretize models") {
  auto rot = discretize(rotation_spec(std::sqrt(2.0) - 1.0), 1000);
  CHECK(rot.size() == 1000);
  CHECK(rot.h == doctest::Approx(1e-3));
  // exact cyclic shift, order preserving
  int shift = rot.sigma[0];
  for (int i = 0; i < 1000; ++i) CHECK(rot.sigma[i] == (i + shift) % 1000);

  // 2-interval IET with swap equals rotation by 0.5
  ModelSpec iet;
  iet.kind = ModelKind::iet;
  iet.iet_lengths = {0.5, 0.5};
  iet.iet_permutation = {1, 0};
  auto sys = discretize(iet, 100);
  for (int i = 0; i < 100; ++i) CHECK(sys.sigma[i] == (i + 50) % 100);

  // laminar: cross-component distance is the declared separation
  auto lam = discretize(laminar2_spec(), 10);
  int n0 = 48;
  CHECK(lam.metric(0, n0) == doctest::Approx(0.3));
  CHECK(lam.metric(0, 1) < 0.3);

  ModelSpec bad;
  bad.kind = ModelKind::iet;
  bad.iet_lengths = {0.4, 0.4};
  bad.iet_permutation = {1, 0};
  CHECK_THROWS_AS(discretize(bad, 10), Error);
}

TEST_CASE("interception: reflexivity and the rotation lower bound") {
  auto sys = discretize(rotation_spec(0.4142), 200);
  auto self = interception_cost(sys, 17, 17, 10);
  CHECK(self.cost == 0.0);
  CHECK(self.certificate->horizon == 0);

  // isometry forces cost = d(x, y); certificate replays
  for (auto [x, y] : std::vector<std::pair<int, int>>{{0, 50}, {3, 7}, {10, 180}}) {
    auto r = interception_cost(sys, x, y, 50);
    CHECK(r.cost == doctest::Approx(sys.metric(x, y)).epsilon(1e-12));
    CHECK(r.cost >= sys.metric(x, y) - sys.h);
    REQUIRE(r.certificate.has_value());
    CHECK(replay_certificate(sys, *r.certificate));
  }
}

TEST_CASE("interception agrees with the exhaustive oracle on a tiny system") {
  auto sys = discretize(rotation_spec(0.3), 10);
  for (int x = 0; x < 10; ++x)
    for (int y = 0; y < 10; ++y) {
      auto got = interception_cost(sys, x, y, 4);
      double want = x == y ? 0.0 : oracle_cost(sys, x, y, 4);
      CHECK(got.cost == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("interception cost is nonincreasing in the horizon") {
  auto sys = discretize(rotation_spec(0.277), 100);
  for (int y : {5, 37, 80}) {
    double prev = kInf;
    for (int M : {2, 5, 10, 40}) {
      double c = interception_cost(sys, 0, y, M).cost;
      CHECK(c <= prev + 1e-15);
      prev = c;
    }
  }
}

TEST_CASE("doubling map collapses to one class") {
  auto sys = discretize([] {
    ModelSpec s;
    s.kind = ModelKind::doubling;
    return s;
  }(), 1 << 10);
  auto r = interception_cost(sys, 3, 901, 20);
  CHECK(r.cost <= std::pow(2.0, -9.0));
  auto part = classify(sys, 0.1, 20, 60, 7);
  CHECK(part.classes.size() == 1);
  CHECK(part.asymmetric_pairs.empty());
}

TEST_CASE("rotation yields singletons") {
  auto sys = discretize(rotation_spec(0.4142), 200);
  auto part = classify(sys, 0.1, 100, 100, 11);
  CHECK(part.classes.size() == 200);
  CHECK(part.asymmetric_pairs.empty());
  CHECK(part.min_cross_cost >= sys.h - 1e-15);
}

TEST_CASE("laminar model yields exactly the components") {
  auto sys = discretize(laminar2_spec(), 10);
  auto part = classify(sys, 3 * sys.h, 600, 150, 13);
  CHECK(part.classes.size() == 2);
  CHECK(part.asymmetric_pairs.empty());
  // classes match components
  for (const auto& cls : part.classes) {
    int c = sys.component[cls.front()];
    for (int i : cls) CHECK(sys.component[i] == c);
  }
  // sigma-invariance up to h
  for (const auto& cls : part.classes)
    for (int i : cls) {
      int img = sys.sigma[i];
      bool in_class = false;
      for (int j : cls) in_class = in_class || sys.metric(img, j) <= sys.h;
      CHECK(in_class);
    }
}

TEST_CASE("transitivity at cost level on the rotation") {
  auto sys = discretize(rotation_spec(0.4142), 100);
  for (auto [x, y, z] : std::vector<std::array<int, 3>>{{0, 10, 30}, {5, 50, 95}}) {
    double xy = interception_cost(sys, x, y, 40).cost;
    double yz = interception_cost(sys, y, z, 40).cost;
    double xz = interception_cost(sys, x, z, 40).cost;
    CHECK(xz <= xy + yz + sys.h + 1e-12);
  }
}

TEST_CASE("chain recurrence: periodic, absorbing, rotation") {
  // periodic point returns with a zero-jump chain
  auto rot = discretize(rotation_spec(0.25), 8);  // shift 2, period 4
  auto [ok, chain] = chain_recurrent(rot, 0, 2.0, 1e-6, 50);
  CHECK(ok);
  REQUIRE(chain.has_value());
  for (double j : chain->jumps) CHECK(j <= 1e-6);

  // absorbing custom model: forward orbit leaves a gap it cannot re-cross
  ModelSpec absorbing;
  absorbing.kind = ModelKind::custom;
  absorbing.custom_positions = {0.0, 1.0, 1.1, 1.2};
  absorbing.custom_sigma = {1, 2, 3, 3};
  auto abs_sys = discretize(absorbing, 4);
  auto [bad, none] = chain_recurrent(abs_sys, 0, 1.0, 0.5, 40);
  CHECK(!bad);
  // generous eps above the escape gap restores recurrence
  auto [good, some] = chain_recurrent(abs_sys, 0, 1.0, 1.25, 40);
  CHECK(good);

  // rotation samples recur for every x at eps > h
  auto rot2 = discretize(rotation_spec(0.4142), 50);
  for (int x : {0, 7, 23}) {
    auto [r, ch] = chain_recurrent(rot2, x, 3.0, rot2.h * 1.5, 200);
    CHECK(r);
  }
}
