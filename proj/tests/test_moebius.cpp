#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "horolab/moebius.hpp"
#include "oracles.hpp"

using namespace horolab;

namespace {

double uniform01(std::mt19937_64& rng) {
  return (rng() >> 11) * 0x1.0p-53;
}

MoebiusElement random_element(std::mt19937_64& rng) {
  for (;;) {
    double a = 2.0 * uniform01(rng) - 1.0;
    double b = 2.0 * uniform01(rng) - 1.0;
    double c = 2.0 * uniform01(rng) - 1.0;
    double d = 2.0 * uniform01(rng) - 1.0;
    if (a * d - b * c > 1e-6) return MoebiusElement::normalize(a, b, c, d);
  }
}

}  // namespace

TEST_CASE("normalize rescales and canonicalizes") {
  auto m = MoebiusElement::normalize(2, 0, 0, 2);
  CHECK(m == MoebiusElement::identity());
  auto n = MoebiusElement::normalize(-1, 0, 0, -1);
  CHECK(n == MoebiusElement::identity());
  auto k = MoebiusElement::normalize(0, -3, 3, 0);
  CHECK(k.a == 0.0);
  CHECK(k.b == doctest::Approx(1.0));
  CHECK(k.c == doctest::Approx(-1.0));
  CHECK_THROWS_AS(MoebiusElement::normalize(1, 2, 2, 4), Error);
}

TEST_CASE("hyperbolic distance basics and quadrature oracle") {
  std::complex<double> i(0, 1), i2(0, 2), one_i(1, 1);
  CHECK(hyperbolic_distance(i, i2) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(hyperbolic_distance(i, i) == 0.0);
  double d = hyperbolic_distance(i, one_i);
  CHECK(d == doctest::Approx(std::acosh(1.5)).epsilon(1e-12));
  CHECK(d == doctest::Approx(oracle::integrated_distance(i, one_i)).epsilon(1e-9));
  CHECK_THROWS_AS(hyperbolic_distance({0, -1}, i), Error);
}

TEST_CASE("hyperbolic distance triangle inequality on random triples") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 2000; ++k) {
    auto pt = [&] {
      return std::complex<double>(4 * uniform01(rng) - 2, 0.05 + 3 * uniform01(rng));
    };
    auto x = pt(), y = pt(), z = pt();
    CHECK(hyperbolic_distance(x, z) <=
          hyperbolic_distance(x, y) + hyperbolic_distance(y, z) + 1e-12);
  }
}

TEST_CASE("bruhat examples") {
  auto nau = bruhat_nau(MoebiusElement::a_flow(1.7));
  CHECK(nau.n_param == doctest::Approx(0.0));
  CHECK(nau.t == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(nau.u_param == doctest::Approx(0.0));

  auto nau2 = bruhat_nau(MoebiusElement::normalize(1, 0, 1, 1));
  CHECK(nau2.n_param == doctest::Approx(1.0));
  CHECK(nau2.t == doctest::Approx(0.0));
  CHECK(nau2.u_param == doctest::Approx(0.0));

  auto nau3 = bruhat_nau(MoebiusElement::normalize(1, 1, 1, 2));
  CHECK(nau3.n_param == doctest::Approx(1.0));
  CHECK(nau3.t == doctest::Approx(0.0));
  CHECK(nau3.u_param == doctest::Approx(1.0));

  CHECK_THROWS_AS(bruhat_nau(MoebiusElement::normalize(0, -1, 1, 0)), Error);
}

TEST_CASE("bruhat round trip on 1e4 random elements") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 10000; ++k) {
    auto m = random_element(rng);
    if (std::abs(m.a) <= 1e-6) continue;
    auto nau = bruhat_nau(m);
    auto back = nau_reconstruct(nau);
    CHECK(back.frobenius_distance(m) < 1e-9);
    CHECK(log_delta(m) == 2.0 * std::log(std::abs(m.a)));
  }
}

TEST_CASE("log_delta examples") {
  CHECK(log_delta(MoebiusElement::normalize(2, 0, 0, 0.5)) ==
        doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));
  // a_{-t} u_1 a_t n_1 with t = ln 2, the twist-correction matrix
  double t = std::log(2.0);
  auto m = MoebiusElement::a_flow(-t) * MoebiusElement::u_upper(1) *
           MoebiusElement::a_flow(t) * MoebiusElement::n_lower(1);
  CHECK(log_delta(m) == doctest::Approx(2 * std::log(1.5)).epsilon(1e-12));
  CHECK(log_delta(MoebiusElement::normalize(1, 5, 0, 1)) == doctest::Approx(0.0));
}

TEST_CASE("axis: diagonal, parabolic, golden ratio") {
  auto [L, len] = axis(MoebiusElement::normalize(2, 0, 0, 0.5));
  CHECK(L.xi_minus == 0.0);
  CHECK(std::isinf(L.xi_plus));
  CHECK(len == doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));

  CHECK_THROWS_AS(axis(MoebiusElement::normalize(1, 0, 1, 1)), Error);

  auto m = MoebiusElement::normalize(2, 1, 1, 1);
  auto [L2, len2] = axis(m);
  double phi = (1 + std::sqrt(5.0)) / 2;
  CHECK(L2.xi_plus == doctest::Approx(phi).epsilon(1e-12));
  CHECK(L2.xi_minus == doctest::Approx(1 - phi).epsilon(1e-12));
  CHECK(len2 == doctest::Approx(2 * std::acosh(1.5)).epsilon(1e-12));
  // independent root finder agrees
  auto roots = oracle::fixed_points_bisect(m);
  REQUIRE(roots.size() == 2);
  CHECK(std::min(roots[0], roots[1]) == doctest::Approx(1 - phi).epsilon(1e-6));
  CHECK(std::max(roots[0], roots[1]) == doctest::Approx(phi).epsilon(1e-6));
}

TEST_CASE("axis translation length is the displacement on the axis") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 50; ++k) {
    auto m = random_element(rng);
    if (std::abs(m.trace()) <= 2.1) continue;
    auto [L, len] = axis(m);
    double best = kInf;
    for (int s = 0; s < 1000; ++s) {
      double t = -5.0 + 10.0 * s / 999.0;
      auto p = line_point(L, t);
      best = std::min(best, hyperbolic_distance(p, m.apply(p)));
    }
    CHECK(std::abs(best - len) < 1e-8);
  }
}

TEST_CASE("frames, realize, flow") {
  auto v = reference_frame();
  auto g = frame_of(v);
  CHECK(g.frobenius_distance(MoebiusElement::identity()) < 1e-12);

  UnitTangent w{{0.8, 2.5}, 1.1};
  auto back = realize(frame_of(w));
  CHECK(std::abs(back.base - w.base) < 1e-12);
  CHECK(std::abs(wrap_angle(back.dir - w.dir)) < 1e-12);

  // flow moves the base point along the direction at unit speed
  auto f = geodesic_flow(w, 0.7);
  CHECK(hyperbolic_distance(w.base, f.base) == doctest::Approx(0.7).epsilon(1e-10));
  auto fb = geodesic_flow(f, -0.7);
  CHECK(std::abs(fb.base - w.base) < 1e-10);

  // the up vector at i flows to the up vector at e^t i
  UnitTangent up{{0, 1}, kPi / 2};
  auto moved = geodesic_flow(up, 1.0);
  CHECK(std::abs(moved.base - std::complex<double>(0, std::exp(1.0))) < 1e-12);
  CHECK(moved.dir == doctest::Approx(kPi / 2).epsilon(1e-12));
}

TEST_CASE("t1 distance examples") {
  UnitTangent v{{0, 1}, 0.3};
  CHECK(t1_distance(v, v) == 0.0);

  UnitTangent a{{0, 1}, 0.0}, b{{0, 1}, kPi / 2};
  CHECK(t1_distance(a, b) == doctest::Approx(kPi / 2).epsilon(1e-12));

  UnitTangent p{{0, 1}, kPi / 2}, q{{0, 2}, kPi / 2};
  CHECK(t1_distance(p, q) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // transport oracle: moving along a circular geodesic rotates directions
  std::complex<double> z(0, 1), w(1.2, 0.9);
  auto [az1, az2] = detail::geodesic_azimuths(z, w);
  double got = az2 + wrap_angle(0.4 - az1);
  double want = oracle::transported_direction(z, w, 0.4);
  CHECK(wrap_angle(got - want) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("t1 distance is symmetric and positive") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 500; ++k) {
    UnitTangent v{{2 * uniform01(rng) - 1, 0.2 + 2 * uniform01(rng)},
                  wrap_angle(6 * uniform01(rng))};
    UnitTangent w{{2 * uniform01(rng) - 1, 0.2 + 2 * uniform01(rng)},
                  wrap_angle(6 * uniform01(rng))};
    double dvw = t1_distance(v, w), dwv = t1_distance(w, v);
    CHECK(dvw == doctest::Approx(dwv).epsilon(1e-10));
    if (std::abs(v.base - w.base) > 1e-12) CHECK(dvw > 0.0);
  }
}

TEST_CASE("stable contraction self-test pins the conventions") {
  // lower unipotent perturbations contract under forward flow; upper ones blow up
  auto n = MoebiusElement::n_lower(0.1);
  auto u = MoebiusElement::u_upper(0.1);
  auto g = MoebiusElement::identity();

  auto dist_at = [&](const MoebiusElement& pert, double t) {
    auto flowed = realize(frame_of(realize(g)) * pert * MoebiusElement::a_flow(-t));
    auto base = realize(frame_of(realize(g)) * MoebiusElement::a_flow(-t));
    return t1_distance(flowed, base);
  };

  double n0 = dist_at(n, 0.0), n5 = dist_at(n, 5.0);
  double u0 = dist_at(u, 0.0), u5 = dist_at(u, 5.0);
  CHECK(n5 < 1e-2 * n0);
  CHECK(u5 > 10.0 * u0);

  // monotone decay along the flow for the stable side
  double prev = n0;
  for (double t = 1.0; t <= 8.0; t += 1.0) {
    double cur = dist_at(n, t);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("line frames and nearest point") {
  GeodesicLine L{0.0, kInf};
  auto p = line_point(L, 0.0);
  CHECK(std::abs(p - std::complex<double>(0, 1)) < 1e-12);
  // moving toward xi_plus = inf goes up
  auto p2 = line_point(L, 1.0);
  CHECK(p2.imag() > 1.0);

  GeodesicLine C{-1.0, 1.0};
  auto apex = line_point(C, 0.0);
  CHECK(std::abs(apex - std::complex<double>(0, 1)) < 1e-12);
  double tp = line_nearest_param(C, {0.0, 2.0});
  CHECK(std::abs(tp) < 1e-6);
  CHECK(line_distance(C, {0.0, 2.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  UnitTangent up{{0, 1}, kPi / 2};
  auto L2 = line_through(up);
  CHECK(L2.xi_minus == doctest::Approx(0.0));
  CHECK(std::isinf(L2.xi_plus));
}
