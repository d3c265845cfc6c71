#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "horolab/slack.hpp"

using namespace horolab;

namespace {

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

double tau_im(std::complex<double> z) { return std::log(z.imag()); }

}  // namespace

TEST_CASE("edge slack basics") {
  auto e = MoebiusElement::identity();
  CHECK(edge_slack(e, MoebiusElement::a_flow(0.8), e).value ==
        doctest::Approx(0.8).epsilon(1e-12));

  double t = std::log(2.0);
  auto v = MoebiusElement::a_flow(-t) * MoebiusElement::u_upper(1) *
           MoebiusElement::a_flow(t) * MoebiusElement::n_lower(1);
  CHECK(edge_slack(e, v, e).value == doctest::Approx(2 * std::log(1.5)).epsilon(1e-12));
  CHECK(edge_slack(e, v, e).provenance == SlackProvenance::bruhat);
}

TEST_CASE("twist correction") {
  CHECK(twist_correction(1, 1, 0) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));
  CHECK(twist_correction(0, 0.7, 0.3) == 0.0);
  CHECK_THROWS_AS(twist_correction(1, -1, 0), Error);
  // tends to zero
  CHECK(std::abs(twist_correction(1, 1, 40.0)) < 1e-15);
}

TEST_CASE("twist family reproduces the matrix computation") {
  // u_param = n_param = 1 at the identity lifts: slacks(k) = 2 log(1 + e^{-kc})
  double c = 1.5;
  auto e = MoebiusElement::identity();
  auto v = MoebiusElement::normalize(1, 1, 1, 2);
  auto fam = twist_family(e, v, e, MoebiusElement::a_flow(c), 0, 40, "paper");
  REQUIRE(fam.forward_limit.has_value());
  CHECK(*fam.forward_limit == doctest::Approx(0.0).epsilon(1e-9));
  for (auto& [k, s] : fam.slacks)
    CHECK(s == doctest::Approx(2 * std::log(1 + std::exp(-k * c))).epsilon(1e-9));
  CHECK(fam.u_param == doctest::Approx(1.0));
  CHECK(fam.n_param == doctest::Approx(1.0));

  // monotone decay toward the limit, until float noise takes over
  double prev = kInf;
  for (auto& [k, s] : fam.slacks) {
    double gap = std::abs(s - *fam.forward_limit);
    if (k >= 1 && gap > 1e-9)
      CHECK(gap < std::abs(prev - *fam.forward_limit));
    prev = s;
  }
}

TEST_CASE("vanishing u kills the correction: constant family") {
  double c = 1.2;
  auto e = MoebiusElement::identity();
  auto v = MoebiusElement::normalize(2, 0, 1, 0.5);  // u_param = 0
  auto fam = twist_family(e, v, e, MoebiusElement::a_flow(c), 0, 20);
  REQUIRE(!fam.slacks.empty());
  double first = fam.slacks.begin()->second;
  for (auto& [k, s] : fam.slacks) CHECK(s == doctest::Approx(first).epsilon(1e-12));
}

TEST_CASE("general two-edge twist family converges to the path slack") {
  double c = 1.4;
  auto e = MoebiusElement::identity();
  auto v1 = MoebiusElement::normalize(2, 1, 1, 1);
  auto v2 = MoebiusElement::normalize(3, 1, 2, 1);
  auto fam = twist_family(e, v2, e, v1, e, MoebiusElement::a_flow(c), 0, 40);
  REQUIRE(fam.forward_limit.has_value());
  double want = log_delta(v2) + log_delta(v1);
  CHECK(*fam.forward_limit == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("geometric slack examples") {
  // vertical segment against the Busemann tau is exactly tight
  CHECK(geometric_slack({{0, 1}, {0, 2}}, tau_im).value ==
        doctest::Approx(0.0).epsilon(1e-12));

  double d = geometric_slack({{0, 1}, {1, 1}}, tau_im).value;
  CHECK(d == doctest::Approx(std::acosh(1.5)).epsilon(1e-12));

  // closed polyline: delta tau = 0, slack = total length
  std::vector<std::complex<double>> loop{{0, 1}, {1, 1.5}, {0.5, 2.0}, {0, 1}};
  double len = 0;
  for (int i = 0; i + 1 < 4; ++i) len += hyperbolic_distance(loop[i], loop[i + 1]);
  CHECK(geometric_slack(loop, tau_im).value == doctest::Approx(len).epsilon(1e-12));

  CHECK_THROWS_AS(geometric_slack({{0, 1}}, tau_im), Error);
}

TEST_CASE("slack additivity telescopes") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::complex<double>> pts;
    int n = 3 + static_cast<int>(uniform01(rng) * 5);
    for (int i = 0; i < n; ++i)
      pts.push_back({2 * uniform01(rng) - 1, 0.3 + 2 * uniform01(rng)});
    int cut = 1 + static_cast<int>(uniform01(rng) * (n - 2));
    std::vector<std::complex<double>> a(pts.begin(), pts.begin() + cut + 1);
    std::vector<std::complex<double>> b(pts.begin() + cut, pts.end());
    double whole = geometric_slack(pts, tau_im).value;
    double split = geometric_slack(a, tau_im).value + geometric_slack(b, tau_im).value;
    CHECK(whole == doctest::Approx(split).epsilon(1e-12));
  }
}

TEST_CASE("straighten_and_compare: collinear chain is exact") {
  GeodesicArc a{UnitTangent{{0, 1}, kPi / 2}, 1.0};
  GeodesicArc b{a.end_frame(), 1.2};
  BrokenChain chain{{a, b}, 0.0, 1.0};
  auto rep = straighten_and_compare(chain, tau_im);
  CHECK(rep.difference == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(rep.hausdorff < 1e-9);
}

TEST_CASE("straighten_and_compare: single jump stays order epsilon") {
  double eps = 1e-2;
  GeodesicArc a{UnitTangent{{0, 1}, 0.3}, 1.5};
  auto endf = a.end_frame();
  UnitTangent jumped = endf;
  jumped.dir = wrap_angle(jumped.dir + eps * 0.9);
  GeodesicArc b{jumped, 1.5};
  BrokenChain chain{{a, b}, eps, 1.0};
  auto rep = straighten_and_compare(chain, tau_im);
  CHECK(rep.difference < 10 * eps);
  CHECK(rep.hausdorff < 10 * eps);
  CHECK(rep.epsilon == eps);
}

TEST_CASE("chain validation rejects bad data") {
  GeodesicArc shorty{UnitTangent{{0, 1}, 0.0}, 0.2};
  BrokenChain c1{{shorty}, 0.1, 1.0};
  CHECK_THROWS_AS(straighten_and_compare(c1, tau_im), Error);

  GeodesicArc a{UnitTangent{{0, 1}, 0.0}, 1.2};
  GeodesicArc far{UnitTangent{{5, 1}, 0.0}, 1.2};
  BrokenChain c2{{a, far}, 1e-6, 1.0};
  CHECK_THROWS_AS(straighten_and_compare(c2, tau_im), Error);
}

TEST_CASE("excursion calibration on the one-axis model") {
  // single vertical axis, tau = log Im: arcs kept away from the axis in T^1
  // still have ratio >= 0, and the reported minimum is sane
  std::vector<GeodesicLine> axes{{0.0, kInf}};
  double delta = excursion_calibration(tau_im, axes, 0.2, 200, 99);
  CHECK(delta >= -1e-9);
  // vertical arcs sharing the axis endpoint have ratio ~0, so the bound is
  // small but the sampler must not return garbage
  CHECK(delta < 1.0);
}

TEST_CASE("t1 distance to a line") {
  GeodesicLine L{0.0, kInf};
  UnitTangent on_axis{{0, 2.2}, kPi / 2};
  CHECK(t1_distance_to_line(on_axis, L) < 1e-6);
  UnitTangent off{{0.4, 1.0}, kPi / 2};
  CHECK(t1_distance_to_line(off, L) > 0.1);
}
