#pragma once

// McShane 1-Lipschitz extension on finite metric data.  The inf over an
// infinite set in the classical statement becomes a min over the finite
// domain; sampling density is the caller's responsibility.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "horolab/moebius.hpp"

namespace horolab {

template <typename Point>
struct PartialLipschitzFunction {
  std::vector<Point> domain;
  std::vector<double> values;
  std::function<double(const Point&, const Point&)> metric;
};

struct LipschitzViolation {
  std::size_t i = 0;
  std::size_t j = 0;
  double margin = 0.0;  // |f(i) - f(j)| - d(i, j)
};

// Exhaustive pair scan; returns the worst violating pair if any.
template <typename Point>
std::pair<bool, std::optional<LipschitzViolation>> check_lipschitz(
    const PartialLipschitzFunction<Point>& f, double tol = 1e-12) {
  std::optional<LipschitzViolation> worst;
  for (std::size_t i = 0; i < f.domain.size(); ++i) {
    for (std::size_t j = i + 1; j < f.domain.size(); ++j) {
      double gap = std::abs(f.values[i] - f.values[j]) - f.metric(f.domain[i], f.domain[j]);
      if (gap > tol && (!worst || gap > worst->margin))
        worst = LipschitzViolation{i, j, gap};
    }
  }
  return {!worst.has_value(), worst};
}

// Greatest 1-Lipschitz extension: w -> min_z (f(z) + d(z, w)).
template <typename Point>
double mcshane_value(const PartialLipschitzFunction<Point>& f, const Point& w) {
  double best = kInf;
  for (std::size_t i = 0; i < f.domain.size(); ++i) {
    double v = f.values[i] + f.metric(f.domain[i], w);
    if (v < best) best = v;
  }
  return best;
}

template <typename Point>
std::vector<double> mcshane_extend(const PartialLipschitzFunction<Point>& f,
                                   const std::vector<Point>& queries,
                                   bool check = true) {
  if (check) {
    auto [ok, worst] = check_lipschitz(f);
    if (!ok)
      throw Error(Errc::not_lipschitz,
                  "mcshane_extend: partial data violates the 1-Lipschitz bound by " +
                      std::to_string(worst->margin));
  }
  std::vector<double> out;
  out.reserve(queries.size());
  for (const Point& q : queries) out.push_back(mcshane_value(f, q));
  return out;
}

// Least 1-Lipschitz extension, the sup-formula counterpart.  Any convex
// combination of the two is again a 1-Lipschitz extension, which is how the
// maximality property gets exercised.
template <typename Point>
double mcshane_value_lower(const PartialLipschitzFunction<Point>& f, const Point& w) {
  double best = -kInf;
  for (std::size_t i = 0; i < f.domain.size(); ++i) {
    double v = f.values[i] - f.metric(f.domain[i], w);
    if (v > best) best = v;
  }
  return best;
}

}  // namespace horolab
