#pragma once

// A closed hyperbolic surface presented as a Fuchsian group together with a
// degree homomorphism to Z.  Enumerates group words, designates multicurve
// vertices (axes of hyperbolic words with positive degree), discovers
// connector geodesics between them, and samples an equivariant model tau by
// McShane extension of arclength data on axis translates.
//
// Lift bookkeeping: a vertex stores base_lift g such that g^{-1} carries the
// reference frame onto the positively oriented unit tangent at the axis
// point nearest i, where tau = 0.  The slack of a connector word v from
// vertex y to vertex x is then log(delta(g_x v g_y^{-1})) + c phi(v); for
// admissible candidates phi(v) = 0 and the correction drops out.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <string>
#include <vector>

#include "horolab/lipschitz.hpp"
#include "horolab/moebius.hpp"
#include "horolab/slack.hpp"

namespace horolab {

// Reduced group word: signed 1-based generator indices, +k for generator
// k-1, -k for its inverse.
using Word = std::vector<int>;

struct FuchsianCoverSpec {
  std::vector<std::string> generator_names;
  std::vector<MoebiusElement> generators;
  std::vector<Word> relations;
  std::vector<int> phi;  // deck degree per generator
  double c = 1.0;        // circle circumference
  std::vector<std::pair<std::string, Word>> vertex_words;

  int generator_index(const std::string& name) const {
    for (std::size_t i = 0; i < generator_names.size(); ++i)
      if (generator_names[i] == name) return static_cast<int>(i);
    throw Error(Errc::validation_error, "unknown generator: " + name);
  }
};

inline MoebiusElement evaluate_word(const FuchsianCoverSpec& spec, const Word& w) {
  MoebiusElement m = MoebiusElement::identity();
  for (int s : w) {
    int idx = std::abs(s) - 1;
    if (idx < 0 || idx >= static_cast<int>(spec.generators.size()))
      throw Error(Errc::validation_error, "word letter out of range");
    m = m * (s > 0 ? spec.generators[idx] : spec.generators[idx].inverse());
  }
  return m;
}

inline int phi_of_word(const FuchsianCoverSpec& spec, const Word& w) {
  int d = 0;
  for (int s : w) d += (s > 0 ? 1 : -1) * spec.phi[std::abs(s) - 1];
  return d;
}

// Parses tokens like "a1", "a1^-1", "a1^3" into a reduced word.
inline Word word_from_tokens(const FuchsianCoverSpec& spec,
                             const std::vector<std::string>& tokens) {
  Word w;
  for (const std::string& tok : tokens) {
    std::string name = tok;
    int exp = 1;
    auto caret = tok.find('^');
    if (caret != std::string::npos) {
      name = tok.substr(0, caret);
      exp = std::stoi(tok.substr(caret + 1));
    }
    int idx = spec.generator_index(name) + 1;
    for (int i = 0; i < std::abs(exp); ++i) w.push_back(exp > 0 ? idx : -idx);
  }
  return w;
}

inline std::string word_to_string(const FuchsianCoverSpec& spec, const Word& w) {
  std::string out;
  for (int s : w) {
    if (!out.empty()) out += ' ';
    out += spec.generator_names[std::abs(s) - 1];
    if (s < 0) out += "^-1";
  }
  return out.empty() ? "e" : out;
}

struct ValidationReport {
  std::vector<double> relation_residuals;
  bool relations_ok = true;
  bool phi_ok = true;
  bool discreteness_ok = true;
  double min_nontrivial_norm = kInf;  // distance to identity over the word ball
  std::string closest_word;
};

// Enumerates reduced nonempty words in shortlex order (letter order
// g1 < g1^-1 < g2 < g2^-1 < ...), calling fn(word, matrix, degree).
// Stops early if fn returns false.  Throws BudgetExceeded past the cap.
template <typename Fn>
void enumerate_words(const FuchsianCoverSpec& spec, int max_len, Fn&& fn,
                     std::uint64_t cap = 4000000) {
  if (max_len < 1) throw Error(Errc::validation_error, "enumerate_words: max_len < 1");
  int n = static_cast<int>(spec.generators.size());
  std::uint64_t emitted = 0;
  // letters in shortlex alphabet order: +1, -1, +2, -2, ...
  std::vector<int> letters;
  for (int g = 1; g <= n; ++g) { letters.push_back(g); letters.push_back(-g); }

  struct Frame { Word w; MoebiusElement m; int deg; };
  // iterative deepening keeps shortlex order: all words of length L before L+1
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Frame> stack;
    stack.push_back(Frame{{}, MoebiusElement::identity(), 0});
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      if (static_cast<int>(f.w.size()) == len) {
        if (++emitted > cap)
          throw Error(Errc::budget_exceeded, "enumerate_words: cap exceeded");
        if (!fn(f.w, f.m, f.deg)) return;
        continue;
      }
      // push in reverse so the stack pops in shortlex order
      for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
        int s = *it;
        if (!f.w.empty() && f.w.back() == -s) continue;  // free reduction
        Frame g = f;
        g.w.push_back(s);
        int idx = std::abs(s) - 1;
        g.m = f.m * (s > 0 ? spec.generators[idx] : spec.generators[idx].inverse());
        g.deg = f.deg + (s > 0 ? 1 : -1) * spec.phi[idx];
        stack.push_back(std::move(g));
      }
    }
  }
}

inline ValidationReport validate_group(const FuchsianCoverSpec& spec,
                                       int discreteness_len = 5,
                                       std::uint64_t cap = 2000000) {
  ValidationReport rep;
  MoebiusElement id = MoebiusElement::identity();
  for (const Word& r : spec.relations) {
    double res = evaluate_word(spec, r).frobenius_distance(id);
    rep.relation_residuals.push_back(res);
    if (res >= 1e-7) rep.relations_ok = false;
    if (phi_of_word(spec, r) != 0) rep.phi_ok = false;
  }
  try {
    enumerate_words(spec, discreteness_len, [&](const Word& w, const MoebiusElement& m, int) {
      double d = m.frobenius_distance(id);
      if (d < rep.min_nontrivial_norm) {
        rep.min_nontrivial_norm = d;
        rep.closest_word = word_to_string(spec, w);
      }
      return true;
    }, cap);
  } catch (const Error&) {
    // cap exhausted: keep whatever was scanned
  }
  if (rep.min_nontrivial_norm < 1e-4) rep.discreteness_ok = false;
  return rep;
}

struct VertexSpec {
  std::string name;
  Word word;
  MoebiusElement matrix;
  GeodesicLine axis_line;
  double length = 0.0;
  int degree = 0;
  MoebiusElement base_lift;  // g with realize(g^{-1}) the tau=0 frame on the axis
  double origin_param = 0.0; // axis parameter (in line_base_frame coords) of tau=0
  bool length_degree_ok = true;
};

// Arclength parameter of a point lying on L, in line_base_frame coordinates.
inline double line_param_of(const GeodesicLine& L, std::complex<double> z) {
  auto w = line_base_frame(L).inverse().apply(z);
  return -std::log(w.imag());
}

inline std::vector<VertexSpec> build_vertices(
    const FuchsianCoverSpec& spec,
    const std::vector<std::pair<std::string, Word>>& vertex_words) {
  std::vector<VertexSpec> out;
  for (const auto& [name, w] : vertex_words) {
    VertexSpec v;
    v.name = name;
    v.word = w;
    v.matrix = evaluate_word(spec, w);
    v.degree = phi_of_word(spec, w);
    if (v.degree <= 0)
      throw Error(Errc::non_positive_degree, "vertex " + name + ": phi(word) <= 0");
    auto [L, len] = axis(v.matrix);  // throws NotHyperbolic
    v.axis_line = L;
    v.length = len;
    v.length_degree_ok = std::abs(v.length - v.degree * spec.c) < 1e-6;
    v.origin_param = line_nearest_param(L, {0.0, 1.0});
    MoebiusElement realizer =
        line_base_frame(L) * MoebiusElement::a_flow(-v.origin_param);
    v.base_lift = realizer.inverse();
    out.push_back(std::move(v));
  }
  return out;
}

struct ConnectorCandidate {
  int source = 0;  // vertex index y
  int target = 0;  // vertex index x
  Word word;
  MoebiusElement matrix;  // g_x v g_y^{-1}
  GeodesicLine line;
  double raw_slack = 0.0;
};

struct ConnectorScan {
  std::vector<ConnectorCandidate> candidates;
  int skipped_not_decomposable = 0;
  int skipped_degenerate = 0;
  int deduplicated = 0;
};

namespace detail {

inline bool lines_equal(const GeodesicLine& a, const GeodesicLine& b, double tol) {
  return boundary_close(a.xi_minus, b.xi_minus, tol) &&
         boundary_close(a.xi_plus, b.xi_plus, tol);
}

inline bool lines_equal_unordered(const GeodesicLine& a, const GeodesicLine& b,
                                  double tol) {
  return lines_equal(a, b, tol) ||
         (boundary_close(a.xi_minus, b.xi_plus, tol) &&
          boundary_close(a.xi_plus, b.xi_minus, tol));
}

}  // namespace detail

// Directed edges from vertex y to vertex x are geodesics backward-asymptotic
// to the y-axis and forward-asymptotic to a ker(phi)-translate of the
// x-axis.  A candidate word v with phi(v) = 0 describes the line from the
// repelling endpoint of the y-axis to v^{-1}(attracting endpoint of the
// x-axis); admissibility is the matrix condition that g_x v g_y^{-1} is
// NAU-decomposable and the line is distinct from both axes.  Candidates are
// deduplicated by line coincidence and modulo the double-coset action
// v ~ h_x^p v h_y^q, under which the NAU parameters transform as
// (u, n) -> (u e^{q L_y}, n e^{-p L_x}) with the slack unchanged; the dedup
// key is therefore (slack, sign u, sign n, log|u| mod L_y, log|n| mod L_x).
inline ConnectorScan enumerate_connectors(const FuchsianCoverSpec& spec,
                                          const std::vector<VertexSpec>& vertices,
                                          int max_len, double slack_cap,
                                          std::uint64_t word_cap = 40000000) {
  ConnectorScan scan;
  const double line_tol = 1e-9;

  using Key = std::tuple<int, int, long long, long long, long long, int, int>;
  std::set<Key> coset_seen;
  std::set<std::tuple<int, int, long long, long long>> line_seen;

  auto quant = [](double v, double tol) { return std::llround(v / tol); };

  auto consider = [&](const Word& w, const MoebiusElement& m, int y, int x) {
    const VertexSpec& vy = vertices[y];
    const VertexSpec& vx = vertices[x];
    // relator conjugates evaluate to the identity; the direct connector is
    // considered separately with the empty word
    if (!w.empty() && m.frobenius_distance(MoebiusElement::identity()) < 1e-9) {
      ++scan.skipped_degenerate;
      return;
    }
    MoebiusElement mat = vx.base_lift * m * vy.base_lift.inverse();
    if (std::abs(mat.a) <= 1e-9) {
      ++scan.skipped_not_decomposable;
      return;
    }
    double s = clamp_slack(log_delta(mat));
    if (s > slack_cap || s < 0.0) return;
    GeodesicLine line;
    line.xi_minus = vy.axis_line.xi_minus;
    line.xi_plus = m.inverse().apply_boundary(vx.axis_line.xi_plus);
    if (boundary_close(line.xi_minus, line.xi_plus, line_tol)) {
      ++scan.skipped_degenerate;
      return;
    }
    if (detail::lines_equal_unordered(line, vy.axis_line, line_tol) ||
        detail::lines_equal_unordered(line, vx.axis_line, line_tol)) {
      ++scan.skipped_degenerate;
      return;
    }
    auto enc = [&](double v) {
      return std::isinf(v) ? std::numeric_limits<long long>::max() : quant(v, line_tol);
    };
    if (!line_seen.insert({y, x, enc(line.xi_minus), enc(line.xi_plus)}).second) {
      ++scan.deduplicated;
      return;
    }
    auto nau = bruhat_nau(mat);
    if (std::abs(nau.u_param) > 1e-12 && std::abs(nau.n_param) > 1e-12) {
      auto wrap_log = [&](double p, double period) {
        double r = std::fmod(std::log(std::abs(p)), period);
        if (r < 0) r += period;
        return quant(r, 1e-7);
      };
      Key key{y, x, quant(s, 1e-9), wrap_log(nau.u_param, vy.length),
              wrap_log(nau.n_param, vx.length), nau.u_param > 0 ? 1 : -1,
              nau.n_param > 0 ? 1 : -1};
      if (!coset_seen.insert(key).second) {
        ++scan.deduplicated;
        return;
      }
    }
    ConnectorCandidate cand;
    cand.source = y;
    cand.target = x;
    cand.word = w;
    cand.matrix = mat;
    cand.line = line;
    cand.raw_slack = s;
    scan.candidates.push_back(std::move(cand));
  };

  int nv = static_cast<int>(vertices.size());
  // the identity word connects distinct vertices directly
  for (int y = 0; y < nv; ++y)
    for (int x = 0; x < nv; ++x)
      if (x != y) consider({}, MoebiusElement::identity(), y, x);

  enumerate_words(spec, max_len, [&](const Word& w, const MoebiusElement& m, int deg) {
    if (deg != 0) return true;
    for (int y = 0; y < nv; ++y)
      for (int x = 0; x < nv; ++x) consider(w, m, y, x);
    return true;
  }, word_cap);

  return scan;
}

// Slack with full degree bookkeeping, valid for any candidate word:
// log(delta(g_x v g_y^{-1})) + c phi(v).
inline double raw_slack_bookkept(const FuchsianCoverSpec& spec,
                                 const VertexSpec& vx, const VertexSpec& vy,
                                 const Word& w) {
  MoebiusElement m = vx.base_lift * evaluate_word(spec, w) * vy.base_lift.inverse();
  return log_delta(m) + spec.c * phi_of_word(spec, w);
}

// Equivariant model tau assembled from arclength samples on axis translates.
struct ModelTau {
  struct Translate {
    GeodesicLine line;
    double value_at_param0 = 0.0;  // tau at line parameter 0
    std::vector<std::complex<double>> points;
    std::vector<double> values;
  };

  std::vector<Translate> translates;

  bool has(const GeodesicLine& L, double value0, double tol = 1e-9) const {
    for (const auto& t : translates)
      if (detail::lines_equal(t.line, L, tol) &&
          std::abs(t.value_at_param0 - value0) < 1e-6)
        return true;
    return false;
  }

  // Conflicting translate: same line, different values (a configuration bug).
  bool conflicts(const GeodesicLine& L, double value0, double tol = 1e-9) const {
    for (const auto& t : translates)
      if (detail::lines_equal(t.line, L, tol) &&
          std::abs(t.value_at_param0 - value0) >= 1e-6)
        return true;
    return false;
  }

  Translate& add(const GeodesicLine& L, double value0, double t_lo, double t_hi,
                 double step) {
    translates.push_back(Translate{L, value0, {}, {}});
    Translate& tr = translates.back();
    sample(tr, t_lo, t_hi, step);
    return tr;
  }

  static void sample(Translate& tr, double t_lo, double t_hi, double step) {
    int n = std::max(1, static_cast<int>(std::ceil((t_hi - t_lo) / step)));
    for (int i = 0; i <= n; ++i) {
      double t = t_lo + (t_hi - t_lo) * i / n;
      tr.points.push_back(line_point(tr.line, t));
      tr.values.push_back(tr.value_at_param0 + t);
    }
  }

  double eval(std::complex<double> z) const {
    double best = kInf;
    for (const auto& tr : translates)
      for (std::size_t i = 0; i < tr.points.size(); ++i) {
        double v = tr.values[i] + hyperbolic_distance(tr.points[i], z);
        if (v < best) best = v;
      }
    return best;
  }

  std::function<double(std::complex<double>)> evaluator() const {
    return [this](std::complex<double> z) { return eval(z); };
  }

  PartialLipschitzFunction<std::complex<double>> cloud() const {
    PartialLipschitzFunction<std::complex<double>> f;
    f.metric = [](const std::complex<double>& a, const std::complex<double>& b) {
      return hyperbolic_distance(a, b);
    };
    for (const auto& tr : translates) {
      f.domain.insert(f.domain.end(), tr.points.begin(), tr.points.end());
      f.values.insert(f.values.end(), tr.values.begin(), tr.values.end());
    }
    return f;
  }
};

struct OracleComparison {
  double bruhat = 0.0;
  double geometric = 0.0;
  double difference = 0.0;
  double t_minus = 0.0;
  double t_plus = 0.0;
};

// Cross-check of the Bruhat slack of a connector against the geometric
// slack of a finely sampled polyline along its line, evaluated with the
// McShane model tau.  The polyline is truncated where the connector has
// come within tail_tol of the axis translates it is asymptotic to; the
// truncation error is bounded by a small multiple of tail_tol because tau
// is 1-Lipschitz and isometric along the translates.
inline OracleComparison connector_cross_check(const FuchsianCoverSpec& spec,
                                              const std::vector<VertexSpec>& vertices,
                                              const ConnectorCandidate& cand,
                                              ModelTau& model, double step = 1e-3,
                                              double tail_tol = 2.5e-5) {
  const VertexSpec& vy = vertices[cand.source];
  const VertexSpec& vx = vertices[cand.target];
  MoebiusElement m = evaluate_word(spec, cand.word);
  MoebiusElement mi = m.inverse();

  // the translates the connector is asymptotic to: the canonical y-axis
  // behind, v^{-1} of the x-axis ahead (phi(v) = 0: no deck offset)
  GeodesicLine ly = vy.axis_line;
  double ly_value0 = -vy.origin_param;
  GeodesicLine lx;
  lx.xi_minus = mi.apply_boundary(vx.axis_line.xi_minus);
  lx.xi_plus = mi.apply_boundary(vx.axis_line.xi_plus);
  std::complex<double> ox = line_point(vx.axis_line, vx.origin_param);
  double lx_value0 = -line_param_of(lx, mi.apply(ox));

  if (!model.has(ly, ly_value0)) model.add(ly, ly_value0, -40, 40, 0.05);
  if (!model.has(lx, lx_value0)) model.add(lx, lx_value0, -40, 40, 0.05);

  // truncation parameters along the connector
  auto find_tail = [&](const GeodesicLine& target, double dir) {
    double t = 0.0;
    while (std::abs(t) < 80.0) {
      if (line_distance(target, line_point(cand.line, t)) < tail_tol) return t;
      t += dir;
    }
    return t;
  };
  OracleComparison cmp;
  cmp.t_minus = find_tail(ly, -0.5);
  cmp.t_plus = find_tail(lx, 0.5);

  // fine sampling windows around the feet of the truncated endpoints
  auto add_window = [&](const GeodesicLine& L, double value0, std::complex<double> z) {
    double foot = line_nearest_param(L, z);
    for (auto& tr : model.translates)
      if (detail::lines_equal(tr.line, L, 1e-9) &&
          std::abs(tr.value_at_param0 - value0) < 1e-6) {
        ModelTau::sample(tr, foot - 2.0, foot + 2.0, 0.01);
        return;
      }
  };
  std::complex<double> z_minus = line_point(cand.line, cmp.t_minus);
  std::complex<double> z_plus = line_point(cand.line, cmp.t_plus);
  add_window(ly, ly_value0, z_minus);
  add_window(lx, lx_value0, z_plus);

  int n = std::max(2, static_cast<int>(std::ceil((cmp.t_plus - cmp.t_minus) / step)));
  std::vector<std::complex<double>> polyline;
  polyline.reserve(n + 1);
  for (int i = 0; i <= n; ++i)
    polyline.push_back(
        line_point(cand.line, cmp.t_minus + (cmp.t_plus - cmp.t_minus) * i / n));
  cmp.geometric = geometric_slack(polyline, model.evaluator()).value;
  cmp.bruhat = cand.raw_slack;
  cmp.difference = std::abs(cmp.geometric - cmp.bruhat);
  return cmp;
}

// Empirical slack-per-length lower bound for arcs kept away from the
// lamination, feeding the branch-and-bound of the graph layer.
inline double bundle_excursion_delta(const std::vector<VertexSpec>& vertices,
                                     const ModelTau& model, double epsilon0,
                                     int trials, std::uint64_t seed) {
  std::vector<GeodesicLine> axes;
  for (const auto& tr : model.translates) axes.push_back(tr.line);
  for (const auto& v : vertices) axes.push_back(v.axis_line);
  return excursion_calibration(model.evaluator(), axes, epsilon0, trials, seed, 1.2);
}

struct CompatibilityReport {
  std::size_t sample_count = 0;
  std::size_t pair_count = 0;
  std::size_t violation_count = 0;
  double worst_margin = 0.0;
  bool line_conflicts = false;
};

// Collects ker-independent axis translates gamma.axis(v) with tau offsets
// c.phi(gamma) whose lines pass within `radius` of i, and samples them at
// the given arclength density.  The compatibility report lists 1-Lipschitz
// violations among all sampled pairs; a nonempty list means the designated
// multicurve is not a distance-minimizing configuration for this metric.
inline std::pair<ModelTau, CompatibilityReport> sample_model_tau(
    const FuchsianCoverSpec& spec, const std::vector<VertexSpec>& vertices,
    double ball_radius, double density, int translate_word_len = 4,
    std::uint64_t word_cap = 2000000) {
  ModelTau model;
  CompatibilityReport rep;

  auto add_translate = [&](const MoebiusElement& g, int deg, const VertexSpec& v) {
    GeodesicLine L;
    L.xi_minus = g.apply_boundary(v.axis_line.xi_minus);
    L.xi_plus = g.apply_boundary(v.axis_line.xi_plus);
    if (boundary_close(L.xi_minus, L.xi_plus, 1e-12)) return;
    double foot = line_nearest_param(L, {0.0, 1.0});
    if (hyperbolic_distance(line_point(L, foot), {0.0, 1.0}) > ball_radius) return;
    // the vertex origin maps to parameter t0 with tau value c*deg
    std::complex<double> origin =
        line_point(v.axis_line, v.origin_param);
    double t0 = line_param_of(L, g.apply(origin));
    double value0 = spec.c * deg - t0;
    if (model.conflicts(L, value0)) rep.line_conflicts = true;
    if (model.has(L, value0)) return;
    // sample the chord of the ball plus a margin of one unit each side
    double half = std::acosh(std::cosh(ball_radius) + 1.0) + 1.0;
    model.add(L, value0, foot - half, foot + half, density);
  };

  for (const auto& v : vertices) add_translate(MoebiusElement::identity(), 0, v);
  enumerate_words(spec, translate_word_len,
                  [&](const Word&, const MoebiusElement& m, int deg) {
                    for (const auto& v : vertices) add_translate(m, deg, v);
                    return true;
                  },
                  word_cap);

  auto f = model.cloud();
  rep.sample_count = f.domain.size();
  for (std::size_t i = 0; i < f.domain.size(); ++i)
    for (std::size_t j = i + 1; j < f.domain.size(); ++j) {
      ++rep.pair_count;
      double gap = std::abs(f.values[i] - f.values[j]) -
                   hyperbolic_distance(f.domain[i], f.domain[j]);
      if (gap > 1e-9) {
        ++rep.violation_count;
        rep.worst_margin = std::max(rep.worst_margin, gap);
      }
    }
  return {std::move(model), rep};
}

}  // namespace horolab
