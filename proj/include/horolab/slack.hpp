#pragma once

// The slack calculus.  Edge slacks through the Bruhat delta-projection,
// twist families of single connectors accumulating on two-edge paths with
// the explicit correction 2 log(1 + e^{-t} x y), geometric slack of
// polylines against a 1-Lipschitz model, and the broken-geodesic
// straightening harness.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "horolab/moebius.hpp"

namespace horolab {

enum class SlackProvenance { bruhat, geometric, composed };

struct SlackValue {
  double value = 0.0;
  SlackProvenance provenance = SlackProvenance::bruhat;
};

// Slacks within -1e-6 of zero are float noise from validated
// configurations; anything more negative is a genuine non-minimizing
// configuration and gets rejected by the graph layer.
inline double clamp_slack(double s, double tol = 1e-6) {
  if (s < 0.0 && s >= -tol) return 0.0;
  return s;
}

// Slack of a single connector between base-lifted vertices:
// log(delta(g_x v g_y^{-1})).
inline SlackValue edge_slack(const MoebiusElement& g_x, const MoebiusElement& v,
                             const MoebiusElement& g_y) {
  double s = log_delta(g_x * v * g_y.inverse());
  return SlackValue{s, SlackProvenance::bruhat};
}

// 2 log(1 + e^{-t} u n): the gap between a twisted single connector and its
// limiting two-edge path.
inline double twist_correction(double u_param, double n_param, double t) {
  double arg = 1.0 + std::exp(-t) * u_param * n_param;
  if (arg <= 1e-12)
    throw Error(Errc::degenerate_twist, "twist_correction: argument <= 1e-12");
  return 2.0 * std::log(arg);
}

struct TwistFamily {
  std::string edge_id;
  int k_min = 0;
  int k_max = 0;
  std::map<int, double> slacks;            // k -> slack; gaps are skipped k
  std::vector<int> gaps;                   // ks where the connector degenerates
  std::optional<double> forward_limit;     // limit as k -> +inf
  std::optional<double> backward_limit;    // limit as k -> -inf (usually none)
  int detection_threshold = 0;             // first k with converged differences
  double u_param = 0.0;                    // correction parameters: the U part of
  double n_param = 0.0;                    // the outgoing edge, N part of incoming
  double rate = 0.0;                       // translation length of the middle vertex
};

namespace detail {

inline void detect_limits(TwistFamily& fam) {
  const double conv = 1e-10;
  std::optional<int> prev_k;
  double prev_v = 0.0;
  for (auto& [k, v] : fam.slacks) {
    if (prev_k && k == *prev_k + 1 && std::abs(v - prev_v) < conv) {
      fam.forward_limit = v;
      fam.detection_threshold = k;
      break;
    }
    prev_k = k;
    prev_v = v;
  }
  prev_k.reset();
  for (auto it = fam.slacks.rbegin(); it != fam.slacks.rend(); ++it) {
    if (prev_k && it->first == *prev_k - 1 && std::abs(it->second - prev_v) < conv) {
      fam.backward_limit = it->second;
      break;
    }
    prev_k = it->first;
    prev_v = it->second;
  }
}

}  // namespace detail

// Family of single connectors approximating the two-edge path
// (v2: mid -> x) o (v1: y -> mid), twisting k times around the middle
// vertex.  Slacks follow log(delta(a_{-k r} M2 a_{k r} M1)) with
// r the translation length of the middle vertex matrix, and converge to
// slack(v2) + slack(v1) with residual twist_correction(u(M2), n(M1), k r).
inline TwistFamily twist_family_pair(const MoebiusElement& m2, const MoebiusElement& m1,
                                     double rate, int k_min, int k_max,
                                     const std::string& edge_id = "") {
  TwistFamily fam;
  fam.edge_id = edge_id;
  fam.k_min = k_min;
  fam.k_max = k_max;
  fam.rate = rate;
  fam.u_param = bruhat_nau(m2).u_param;
  fam.n_param = bruhat_nau(m1).n_param;
  for (int k = k_min; k <= k_max; ++k) {
    MoebiusElement mk = MoebiusElement::a_flow(-k * rate) * m2 *
                        MoebiusElement::a_flow(k * rate) * m1;
    if (std::abs(mk.a) <= 1e-9) {
      fam.gaps.push_back(k);
      continue;
    }
    fam.slacks[k] = log_delta(mk);
  }
  detail::detect_limits(fam);
  // consistency with the closed-form correction past the detection threshold
  if (fam.forward_limit) {
    for (auto& [k, v] : fam.slacks) {
      if (k < fam.detection_threshold) continue;
      double corr = twist_correction(fam.u_param, fam.n_param, k * rate);
      if (std::abs(v - *fam.forward_limit - corr) > 1e-8)
        throw Error(Errc::validation_error,
                    "twist_family: member " + std::to_string(k) +
                        " disagrees with the closed-form correction");
    }
  }
  return fam;
}

inline TwistFamily twist_family(const MoebiusElement& g_x, const MoebiusElement& v2,
                                const MoebiusElement& g_mid, const MoebiusElement& v1,
                                const MoebiusElement& g_y, const MoebiusElement& h_mid,
                                int k_min, int k_max, const std::string& edge_id = "") {
  double rate = axis(h_mid).second;
  MoebiusElement m2 = g_x * v2 * g_mid.inverse();
  MoebiusElement m1 = g_mid * v1 * g_y.inverse();
  return twist_family_pair(m2, m1, rate, k_min, k_max, edge_id);
}

// Self-edge form: v is a connector from the source vertex back to itself and
// the family approximates the doubled path v o v, twisting around the source.
inline TwistFamily twist_family(const MoebiusElement& g_x, const MoebiusElement& v,
                                const MoebiusElement& g_y, const MoebiusElement& h_y,
                                int k_min, int k_max, const std::string& edge_id = "") {
  return twist_family(g_x, v, g_y, v, g_y, h_y, k_min, k_max, edge_id);
}

// Slack of a polyline against an evaluable 1-Lipschitz model: the sum of
// hyperbolic segment lengths minus the tau gain between the endpoints.
inline SlackValue geometric_slack(const std::vector<std::complex<double>>& polyline,
                                  const std::function<double(std::complex<double>)>& tau) {
  if (polyline.size() < 2)
    throw Error(Errc::domain_error, "geometric_slack: need at least 2 points");
  double length = 0.0;
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    if (polyline[i].imag() <= 0.0 || polyline[i + 1].imag() <= 0.0)
      throw Error(Errc::domain_error, "geometric_slack: point outside H^2");
    length += hyperbolic_distance(polyline[i], polyline[i + 1]);
  }
  double s = length - (tau(polyline.back()) - tau(polyline.front()));
  return SlackValue{s, SlackProvenance::geometric};
}

// A geodesic arc given by its initial frame and length.
struct GeodesicArc {
  UnitTangent start;
  double length = 0.0;

  UnitTangent end_frame() const { return geodesic_flow(start, length); }
};

struct BrokenChain {
  std::vector<GeodesicArc> segments;
  double jump_total = 0.0;          // epsilon
  double min_segment_length = 1.0;  // c
};

inline void validate_chain(const BrokenChain& chain) {
  if (chain.segments.empty())
    throw Error(Errc::domain_error, "broken chain: no segments");
  double jumps = 0.0;
  for (std::size_t i = 0; i < chain.segments.size(); ++i) {
    if (chain.segments[i].length < chain.min_segment_length - 1e-12)
      throw Error(Errc::domain_error, "broken chain: segment below the length floor");
    if (i + 1 < chain.segments.size())
      jumps += t1_distance(chain.segments[i].end_frame(),
                           chain.segments[i + 1].start);
  }
  if (jumps > chain.jump_total + 1e-9)
    throw Error(Errc::domain_error, "broken chain: jumps exceed the declared total");
}

struct ComparisonReport {
  double straight_slack = 0.0;   // slack of the geodesic joining the endpoints
  double chain_slack_sum = 0.0;  // sum of the segment slacks
  double difference = 0.0;       // |straight - sum|
  double epsilon = 0.0;          // declared jump total
  double hausdorff = 0.0;        // sampled Hausdorff distance
  double ratio = 0.0;            // difference / epsilon
  double hausdorff_ratio = 0.0;  // hausdorff / epsilon
};

// Straightens a broken chain: compares the slack of the single geodesic
// joining the chain's endpoints with the sum of the segment slacks, and
// measures how far the straightened arc strays from the chain.
inline ComparisonReport straighten_and_compare(
    const BrokenChain& chain, const std::function<double(std::complex<double>)>& tau,
    double sample_step = 0.05) {
  validate_chain(chain);
  ComparisonReport rep;
  rep.epsilon = chain.jump_total;

  std::vector<std::complex<double>> chain_samples;
  for (const auto& seg : chain.segments) {
    rep.chain_slack_sum +=
        geometric_slack({seg.start.base, seg.end_frame().base}, tau).value;
    int n = std::max(1, static_cast<int>(std::ceil(seg.length / sample_step)));
    for (int i = 0; i <= n; ++i)
      chain_samples.push_back(geodesic_flow(seg.start, seg.length * i / n).base);
  }

  auto p0 = chain.segments.front().start.base;
  auto p1 = chain.segments.back().end_frame().base;
  rep.straight_slack = geometric_slack({p0, p1}, tau).value;
  rep.difference = std::abs(rep.straight_slack - rep.chain_slack_sum);
  rep.ratio = rep.epsilon > 0 ? rep.difference / rep.epsilon : 0.0;

  // sampled Hausdorff distance between the straight arc and the chain
  double d01 = hyperbolic_distance(p0, p1);
  std::vector<std::complex<double>> straight_samples;
  int n = std::max(1, static_cast<int>(std::ceil(d01 / sample_step)));
  if (std::abs(p0 - p1) > 1e-14) {
    UnitTangent v0;
    v0.base = p0;
    auto [az0, az1] = detail::geodesic_azimuths(p0, p1);
    v0.dir = az0;
    for (int i = 0; i <= n; ++i)
      straight_samples.push_back(geodesic_flow(v0, d01 * i / n).base);
  } else {
    straight_samples.push_back(p0);
  }
  auto one_sided = [](const std::vector<std::complex<double>>& from,
                      const std::vector<std::complex<double>>& to) {
    double worst = 0.0;
    for (auto& p : from) {
      double best = kInf;
      for (auto& q : to) best = std::min(best, hyperbolic_distance(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  rep.hausdorff = std::max(one_sided(chain_samples, straight_samples),
                           one_sided(straight_samples, chain_samples));
  rep.hausdorff_ratio = rep.epsilon > 0 ? rep.hausdorff / rep.epsilon : 0.0;
  return rep;
}

// Distance in the unit tangent bundle from a frame to the positively
// oriented frame field of a geodesic line.
inline double t1_distance_to_line(const UnitTangent& v, const GeodesicLine& L) {
  double t = line_nearest_param(L, v.base);
  return t1_distance(v, realize(line_frame(L, t)));
}

// Empirical lower bound for slack per unit length of arcs kept away from
// the lamination: the minimum slack/length ratio over random unit arcs at
// T^1-distance at least epsilon0 from every axis frame.
inline double excursion_calibration(
    const std::function<double(std::complex<double>)>& tau,
    const std::vector<GeodesicLine>& axes, double epsilon0, int trials,
    std::uint64_t seed, double region_radius = 2.0) {
  std::mt19937_64 rng(seed);
  auto uniform01 = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
  double best = kInf;
  int kept = 0;
  while (kept < trials) {
    UnitTangent v;
    v.base = {region_radius * (2 * uniform01() - 1),
              std::exp(region_radius * (2 * uniform01() - 1))};
    v.dir = wrap_angle(2 * kPi * uniform01());
    bool far = true;
    for (double s : {0.0, 0.5, 1.0}) {
      UnitTangent w = geodesic_flow(v, s);
      for (const auto& L : axes)
        if (t1_distance_to_line(w, L) < epsilon0) { far = false; break; }
      if (!far) break;
    }
    if (!far) continue;
    ++kept;
    auto e = geodesic_flow(v, 1.0);
    double s = geometric_slack({v.base, e.base}, tau).value;
    best = std::min(best, s / 1.0);
  }
  return best;
}

}  // namespace horolab
