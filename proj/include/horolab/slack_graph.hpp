#pragma once

// The slack graph: a finite vertex set with countable edge families.
// Edges are explicit nonnegative slacks, declared families accumulating on
// a limit from above, or matrix-backed connectors that can be closed under
// the twist operation (a_{-kr} M2 a_{kr} M1) to realize the families of
// every composable pair.  On top of that: truncated Z-set enumeration with
// witnesses, numerical derived sets with an h-sweep, the length filtration
// check, subadditivity, ray thresholds through infinite-leaf vertices, and
// the orbit-closure census with marked Busemann labels.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "horolab/moebius.hpp"
#include "horolab/slack.hpp"

namespace horolab {

enum class VertexFlag { imc, infinite_leaf };

struct GraphVertex {
  std::string id;
  VertexFlag flag = VertexFlag::imc;
};

// Declared countable family: member k >= k0 has slack
// base + 2 log(1 + coeff e^{-k rate}), accumulating at base from one side.
struct FamilySpec {
  double base = 0.0;
  double coeff = 0.0;
  double rate = 1.0;
  int k0 = 0;
};

struct GraphEdge {
  std::string id;
  int src = 0;
  int dst = 0;
  std::optional<double> slack;
  std::optional<FamilySpec> family;
  std::optional<MoebiusElement> matrix;  // enables twist closure
};

struct SlackGraph {
  std::vector<GraphVertex> vertices;
  std::vector<GraphEdge> edges;
  std::vector<double> vertex_rate;  // translation length per vertex (0 = none)

  int vertex_index(const std::string& id) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i].id == id) return static_cast<int>(i);
    throw Error(Errc::dangling_edge, "unknown vertex id: " + id);
  }
};

inline SlackGraph build_graph(std::vector<GraphVertex> vertices,
                              std::vector<GraphEdge> edges,
                              std::vector<double> vertex_rate = {}) {
  SlackGraph g;
  g.vertices = std::move(vertices);
  for (std::size_t i = 0; i < g.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < g.vertices.size(); ++j)
      if (g.vertices[i].id == g.vertices[j].id)
        throw Error(Errc::validation_error, "duplicate vertex id " + g.vertices[i].id);
  int n = static_cast<int>(g.vertices.size());
  for (auto& e : edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
      throw Error(Errc::dangling_edge, "edge " + e.id + ": endpoint out of range");
    if (e.slack) {
      if (*e.slack < -1e-6)
        throw Error(Errc::negative_slack, "edge " + e.id + ": negative slack");
      e.slack = clamp_slack(*e.slack);
    }
    if (e.family && e.family->base < -1e-6)
      throw Error(Errc::negative_slack, "edge " + e.id + ": negative family base");
    if (!e.slack && !e.family && !e.matrix)
      throw Error(Errc::validation_error, "edge " + e.id + ": no slack data");
  }
  g.edges = std::move(edges);
  g.vertex_rate = std::move(vertex_rate);
  g.vertex_rate.resize(g.vertices.size(), 0.0);
  return g;
}

// The reversed ('-'-end) graph: same vertices, flipped edges, identical
// slacks.  Matrix-backed edges transpose, which swaps the N and U Bruhat
// parameters and preserves log(delta).
inline SlackGraph reverse_graph(const SlackGraph& g) {
  SlackGraph r = g;
  for (auto& e : r.edges) {
    std::swap(e.src, e.dst);
    if (e.matrix) {
      const MoebiusElement& m = *e.matrix;
      e.matrix = MoebiusElement::normalize(m.a, m.c, m.b, m.d);
    }
  }
  return r;
}

// One usable edge instance after family/closure expansion.
struct ExpandedEdge {
  std::string id;
  int src = 0;
  int dst = 0;
  double slack = 0.0;
  std::optional<MoebiusElement> matrix;
};

struct ExpansionOptions {
  double budget = 10.0;
  double tolerance = 1e-6;   // stop expanding once corrections drop below
  double member_window = kInf;  // keep members with |correction| <= window
                                // (plus the first); mid-range members are
                                // isolated at the working resolution and can
                                // be truncated away without touching any
                                // cluster structure
  std::uint64_t edge_cap = 200000;
  int max_family_members = 400;
};

// Expands declared families and, when matrices and vertex rates are
// available, closes the edge set under the twist operation: every
// composable pair (e2: z->x, e1: y->z) yields members
// log(delta(a_{-k r_z} M2 a_{k r_z} M1)) accumulating at slack(e2)+slack(e1).
// Member values are deduplicated per (src, dst) pair at 1e-12.
inline std::vector<ExpandedEdge> expand_edges(const SlackGraph& g,
                                              const ExpansionOptions& opt) {
  std::vector<ExpandedEdge> out;
  std::set<std::tuple<int, int, long long>> seen;  // (src, dst, slack/1e-12)
  auto dup = [&](int src, int dst, double s) {
    long long q = std::llround(s * 1e12);
    for (long long dq : {-1ll, 0ll, 1ll})
      if (seen.count({src, dst, q + dq})) return true;
    return false;
  };
  auto push = [&](ExpandedEdge e) {
    if (e.slack < -1e-6)
      throw Error(Errc::negative_slack, "expanded edge " + e.id + ": negative slack");
    e.slack = clamp_slack(e.slack);
    if (e.slack > opt.budget) return;
    if (dup(e.src, e.dst, e.slack)) return;
    if (out.size() >= opt.edge_cap)
      throw Error(Errc::budget_blowup, "expand_edges: edge cap exceeded");
    seen.insert({e.src, e.dst, std::llround(e.slack * 1e12)});
    out.push_back(std::move(e));
  };

  for (const auto& e : g.edges) {
    if (e.slack) push(ExpandedEdge{e.id, e.src, e.dst, *e.slack, e.matrix});
    if (e.family) {
      const FamilySpec& f = *e.family;
      for (int k = f.k0, n = 0; n < opt.max_family_members; ++k, ++n) {
        double arg = 1.0 + f.coeff * std::exp(-k * f.rate);
        if (arg <= 1e-12) continue;  // degenerate member
        double corr = 2.0 * std::log(arg);
        if (k == f.k0 || std::abs(corr) <= opt.member_window)
          push(ExpandedEdge{e.id + "#" + std::to_string(k), e.src, e.dst,
                            f.base + corr, std::nullopt});
        if (std::abs(corr) < opt.tolerance) break;
      }
    }
  }

  // twist closure over matrix-backed edges
  bool have_rates = false;
  for (double r : g.vertex_rate) have_rates = have_rates || r > 0.0;
  if (!have_rates) return out;

  std::size_t scanned = 0;
  bool grew = true;
  while (grew) {
    grew = false;
    std::size_t n_now = out.size();
    for (std::size_t i2 = 0; i2 < n_now; ++i2) {
      for (std::size_t i1 = 0; i1 < n_now; ++i1) {
        if (i2 < scanned && i1 < scanned) continue;  // pair already visited
        ExpandedEdge e2 = out[i2];  // copies: push may reallocate the vector
        ExpandedEdge e1 = out[i1];
        if (!e2.matrix || !e1.matrix) continue;
        if (e1.dst != e2.src) continue;
        double rate = g.vertex_rate[e1.dst];
        if (rate <= 0.0) continue;
        double base = e1.slack + e2.slack;
        if (base > opt.budget) continue;
        for (int k = 1; k <= opt.max_family_members; ++k) {
          MoebiusElement mk = MoebiusElement::a_flow(-k * rate) * (*e2.matrix) *
                              MoebiusElement::a_flow(k * rate) * (*e1.matrix);
          if (std::abs(mk.a) <= 1e-9) continue;
          double s = log_delta(mk);
          double corr = s - base;
          bool keep = k == 1 || std::abs(corr) <= opt.member_window;
          if (keep && s <= opt.budget && !dup(e1.src, e2.dst, clamp_slack(s))) {
            push(ExpandedEdge{"tw(" + e2.id + "," + e1.id + ")#" + std::to_string(k),
                              e1.src, e2.dst, s, mk});
            grew = true;
          }
          if (std::abs(corr) < opt.tolerance) break;
        }
      }
    }
    scanned = n_now;
  }
  return out;
}

struct ZValue {
  double value = 0.0;
  std::vector<int> witness;    // indices into the expanded edge list
  std::uint64_t length_mask = 0;  // bit L set <=> some witness path of length L
};

struct TruncatedZSet {
  std::string source;
  std::string target;
  double budget = 0.0;
  double tolerance = 1e-6;
  std::vector<ZValue> values;  // sorted, deduplicated at 1e-12
  std::optional<double> ray_start;
  std::vector<ExpandedEdge> edge_table;  // referenced by witnesses
};

namespace detail {

struct PathState {
  int vertex = 0;
  double value = 0.0;
  std::uint64_t mask = 0;
  std::vector<int> witness;  // best (shortest, then lexicographic) path
};

inline bool witness_less(const std::vector<int>& a, const std::vector<int>& b,
                         const std::vector<ExpandedEdge>& tab) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (tab[a[i]].id != tab[b[i]].id) return tab[a[i]].id < tab[b[i]].id;
  }
  return false;
}

}  // namespace detail

// All path slacks from y to x not exceeding the budget.  The empty path
// contributes 0 exactly when y == x.  delta is a positive lower bound on
// edge slacks used for the branch-and-bound length cap; the effective bound
// is the smaller of delta and the minimum expanded edge slack.
inline TruncatedZSet enumerate_path_slacks(const SlackGraph& g, int y, int x,
                                           double budget, double delta,
                                           const ExpansionOptions& opt_in = {},
                                           std::uint64_t value_cap = 200000) {
  ExpansionOptions opt = opt_in;
  opt.budget = budget;
  auto edges = expand_edges(g, opt);
  double min_edge = kInf;
  for (const auto& e : edges) min_edge = std::min(min_edge, e.slack);
  double eff_delta = std::min(delta, min_edge);
  if (!edges.empty() && eff_delta <= 1e-9)
    throw Error(Errc::validation_error,
                "enumerate_path_slacks: needs a positive slack lower bound");
  int max_len = edges.empty() ? 0 : static_cast<int>(budget / eff_delta) + 1;
  max_len = std::min(max_len, 62);

  std::vector<std::vector<int>> adjacency(g.vertices.size());
  for (std::size_t i = 0; i < edges.size(); ++i)
    adjacency[edges[i].src].push_back(static_cast<int>(i));

  // worklist DP over (vertex, value) states with length masks
  std::vector<std::vector<detail::PathState>> states(g.vertices.size());
  std::vector<std::map<long long, int>> index(g.vertices.size());
  auto find_state = [&](int v, double val) -> int {
    long long q = std::llround(val * 1e12);
    for (long long dq : {0ll, -1ll, 1ll}) {
      auto it = index[v].find(q + dq);
      if (it != index[v].end() && std::abs(states[v][it->second].value - val) < 1e-12)
        return it->second;
    }
    return -1;
  };

  std::vector<std::pair<int, int>> work;  // (vertex, state index)
  std::uint64_t total_states = 0;

  auto upsert = [&](int v, double val, std::uint64_t mask, std::vector<int> wit) {
    int idx = find_state(v, val);
    if (idx < 0) {
      if (++total_states > value_cap)
        throw Error(Errc::budget_blowup, "enumerate_path_slacks: value cap exceeded");
      states[v].push_back(detail::PathState{v, val, mask, std::move(wit)});
      index[v][std::llround(val * 1e12)] = static_cast<int>(states[v].size()) - 1;
      work.emplace_back(v, static_cast<int>(states[v].size()) - 1);
      return;
    }
    detail::PathState& st = states[v][idx];
    bool changed = false;
    if ((st.mask | mask) != st.mask) {
      st.mask |= mask;
      changed = true;
    }
    if (detail::witness_less(wit, st.witness, edges)) st.witness = std::move(wit);
    if (changed) work.emplace_back(v, idx);
  };

  upsert(y, 0.0, 1ull, {});
  while (!work.empty()) {
    auto [v, idx] = work.back();
    work.pop_back();
    detail::PathState st = states[v][idx];  // copy: states may reallocate
    // mask bit L set means a path of length L; extending adds one edge
    if (static_cast<int>(64 - std::countl_zero(st.mask)) - 1 >= max_len) continue;
    for (int ei : adjacency[v]) {
      const ExpandedEdge& e = edges[ei];
      double nv = st.value + e.slack;
      if (nv > budget + 1e-12) continue;
      std::vector<int> wit = st.witness;
      wit.push_back(ei);
      upsert(e.dst, nv, st.mask << 1, std::move(wit));
    }
  }

  TruncatedZSet z;
  z.source = g.vertices[y].id;
  z.target = g.vertices[x].id;
  z.budget = budget;
  z.tolerance = opt.tolerance;
  z.edge_table = edges;
  for (const auto& st : states[x]) {
    if (st.value == 0.0 && y != x) continue;      // empty path only for y == x
    if (y == x || st.mask != 1ull) {
      ZValue zv;
      zv.value = st.value;
      zv.witness = st.witness;
      zv.length_mask = st.mask;
      z.values.push_back(std::move(zv));
    }
  }
  std::sort(z.values.begin(), z.values.end(),
            [](const ZValue& a, const ZValue& b) { return a.value < b.value; });
  return z;
}

inline double replay_witness(const TruncatedZSet& z, const ZValue& v) {
  double s = 0.0;
  for (int ei : v.witness) s += z.edge_table[ei].slack;
  return s;
}

// Numerical derived set at resolution h: the points whose nearest distinct
// neighbor lies within h.  Iterates to max_level; levels are decreasing.
inline std::vector<std::vector<double>> derived_sets(std::vector<double> values,
                                                     double h, int max_level) {
  std::sort(values.begin(), values.end());
  std::vector<std::vector<double>> levels;
  std::vector<double> cur = std::move(values);
  for (int level = 1; level <= max_level; ++level) {
    std::vector<double> next;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      double nearest = kInf;
      if (i > 0) nearest = std::min(nearest, cur[i] - cur[i - 1]);
      if (i + 1 < cur.size()) nearest = std::min(nearest, cur[i + 1] - cur[i]);
      if (nearest <= h) next.push_back(cur[i]);
    }
    levels.push_back(next);
    cur = levels.back();
    if (cur.empty()) break;
  }
  return levels;
}

// One derived-set step of the inductive filtration scheme: the values
// h-accumulated by members of the previous level.  A value survives level i
// when at least `witnesses` distinct values within h of it carry the
// previous level's certification (a path witness of combinatorial length at
// least i); requiring three witnesses suppresses small accidental clusters
// of structurally unrelated values, while a genuine accumulation tail
// always supplies them once families are expanded below h e^{-3 rate}.
inline std::vector<std::pair<double, std::uint64_t>> derived_step_certified(
    const std::vector<std::pair<double, std::uint64_t>>& sorted_vals_with_masks,
    double h, int level, int witnesses = 3) {
  std::vector<std::pair<double, std::uint64_t>> out;
  const auto& a = sorted_vals_with_masks;
  std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = a[i].first;
    int found = 0;
    for (std::size_t j = i; j-- > 0 && found < witnesses;) {
      if (v - a[j].first > h) break;
      if (a[j].second >> level) ++found;
    }
    for (std::size_t j = i + 1; j < n && found < witnesses; ++j) {
      if (a[j].first - v > h) break;
      if (a[j].second >> level) ++found;
    }
    if (found >= witnesses) out.push_back(a[i]);
  }
  return out;
}


inline double hausdorff_distance(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return kInf;
  auto one = [](const std::vector<double>& from, const std::vector<double>& to) {
    double worst = 0.0;
    for (double x : from) {
      auto it = std::lower_bound(to.begin(), to.end(), x);
      double best = kInf;
      if (it != to.end()) best = std::min(best, *it - x);
      if (it != to.begin()) best = std::min(best, x - *(it - 1));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one(a, b), one(b, a));
}

struct FiltrationLevel {
  int level = 0;
  double h = 0.0;  // the resolution this level was computed at
  std::size_t derived_size = 0;   // h-runs carrying level-i accumulation
  std::size_t hom_size = 0;       // h-runs carrying a length >= i+1 witness
  std::size_t unresolved = 0;     // singleton runs whose tails the truncation
                                  // did not expand; consistent, not failures
  double hausdorff = 0.0;         // max gap from a mismatched run to the other side
  double min_value = 0.0;         // smallest accumulated value at this level
  bool match = false;
  bool vacuous = false;  // no accumulation visible at this resolution at all
};

struct FiltrationSweep {
  double h = 0.0;
  std::vector<FiltrationLevel> levels;
};

struct DepthReport {
  std::vector<FiltrationSweep> sweeps;  // h0/4, h0/2, h0
  bool stabilized = false;
  int estimated_depth = 0;  // greatest level with nonempty derived set, plus one
  double margin = 0.0;
};

// Filtration check: at each level i, the set of values h-accumulated by
// the previous level (certified there as 𝒮₊(Hom^{(i)})) should match the
// slacks of paths of combinatorial length >= i+1 inside the window
// [0, B - margin], within Hausdorff distance h.  The scheme is inductive:
// level 1 compares the plain resolution-h derived set of Z against Hom^{(2)}
// values, and each later level feeds the previously certified set back in,
// which is how the countable-filtration statement itself is organized.  The
// sweep over h in {h0/4, h0/2, h0} must produce the same verdicts; families
// must be expanded below h0 / (4 e^{2 rate}) so tails supply two witnesses.
inline DepthReport check_filtration(const SlackGraph& g, int x, int y, double budget,
                                    double h0, double delta, int max_level = 4,
                                    std::optional<double> margin_opt = std::nullopt,
                                    const ExpansionOptions& opt = {},
                                    std::uint64_t value_cap = 200000) {
  // Hom_G(x, y): directed paths from x to y
  TruncatedZSet z = enumerate_path_slacks(g, x, y, budget, delta, opt, value_cap);
  DepthReport rep;
  rep.margin = margin_opt.value_or(budget / 10.0);
  double window = budget - rep.margin;

  std::vector<std::pair<double, std::uint64_t>> all;
  for (const auto& v : z.values) all.push_back({v.value, v.length_mask});
  std::sort(all.begin(), all.end());
  // values separated by less than the expansion tolerance are the same real
  // number at matrix-product noise scale; coalesce them so deck-algebra
  // twins do not double-witness accumulation
  {
    double merge = opt.tolerance / 8.0;
    std::vector<std::pair<double, std::uint64_t>> merged;
    for (const auto& [v, m] : all) {
      if (!merged.empty() && v - merged.back().first <= merge)
        merged.back().second |= m;
      else
        merged.push_back({v, m});
    }
    all = std::move(merged);
  }

  bool any_cluster = false;
  for (std::size_t i = 1; i < all.size(); ++i)
    any_cluster = any_cluster || (all[i].first - all[i - 1].first <= h0 / 4.0);

  for (double h : {h0 / 4.0, h0 / 2.0, h0}) {
    FiltrationSweep sweep;
    sweep.h = h;
    // maximal h-runs of the full value set: the shared canonical partition
    // both sides of every level are evaluated on
    std::vector<std::pair<std::size_t, std::size_t>> runs;  // [first, last]
    {
      std::size_t i = 0;
      while (i < all.size()) {
        std::size_t j = i;
        while (j + 1 < all.size() && all[j + 1].first - all[j].first <= h) ++j;
        if (all[i].first <= window) runs.push_back({i, j});
        i = j + 1;
      }
    }
    for (int i = 1; i <= max_level; ++i) {
      auto survivors = derived_step_certified(all, h, i);
      std::vector<double> surv_vals;
      for (const auto& [v, m] : survivors) surv_vals.push_back(v);

      FiltrationLevel lvl;
      lvl.level = i;
      lvl.h = h;
      std::vector<double> lhs_reps, rhs_reps;
      std::vector<std::pair<double, int>> mismatches;  // (rep, side)
      for (const auto& [a0, a1] : runs) {
        bool lhs_present = false, rhs_present = false;
        for (std::size_t k = a0; k <= a1; ++k) {
          if (all[k].second >> (i + 1)) rhs_present = true;
        }
        auto lo = std::lower_bound(surv_vals.begin(), surv_vals.end(),
                                   all[a0].first - 1e-15);
        if (lo != surv_vals.end() && *lo <= all[a1].first + 1e-15) lhs_present = true;
        double rep0 = all[a0].first;
        if (lhs_present) lhs_reps.push_back(rep0);
        if (rhs_present) rhs_reps.push_back(rep0);
        if (lhs_present != rhs_present) {
          if (a0 == a1 && rhs_present) {
            ++lvl.unresolved;  // unexpanded tail: invisible at this truncation
          } else {
            mismatches.push_back({rep0, lhs_present ? 0 : 1});
          }
        }
      }
      lvl.derived_size = lhs_reps.size();
      lvl.hom_size = rhs_reps.size();
      lvl.min_value = lhs_reps.empty() ? kInf : lhs_reps.front();
      double worst = 0.0;
      for (auto [v, side] : mismatches) {
        const auto& other = side == 0 ? rhs_reps : lhs_reps;
        double best = kInf;
        for (double w : other) best = std::min(best, std::abs(w - v));
        worst = std::max(worst, best);
      }
      lvl.hausdorff = worst;
      lvl.vacuous = lhs_reps.empty() && !rhs_reps.empty() && !any_cluster;
      lvl.match = (mismatches.empty() || lvl.hausdorff <= h) || lvl.vacuous;
      sweep.levels.push_back(lvl);
    }
    rep.sweeps.push_back(std::move(sweep));
  }

  const auto& fine = rep.sweeps.back();
  rep.estimated_depth = 0;
  for (const auto& lvl : fine.levels)
    if (lvl.derived_size > 0) rep.estimated_depth = lvl.level + 1;
  rep.stabilized = true;
  for (const auto& sweep : rep.sweeps)
    for (std::size_t i = 0; i < sweep.levels.size(); ++i)
      if (sweep.levels[i].match != fine.levels[i].match) rep.stabilized = false;
  return rep;
}

// Membership of t in a truncated Z set, at tolerance.
inline bool zset_contains(const TruncatedZSet& z, double t, double tol = 1e-9) {
  if (z.ray_start && t >= *z.ray_start - tol) return true;
  auto it = std::lower_bound(
      z.values.begin(), z.values.end(), t,
      [](const ZValue& v, double s) { return v.value < s; });
  if (it != z.values.end() && std::abs(it->value - t) <= tol) return true;
  if (it != z.values.begin() && std::abs((it - 1)->value - t) <= tol) return true;
  return false;
}

struct SubadditivityViolation {
  double lhs_sum = 0.0;
  double from_zy = 0.0;
  double from_xz = 0.0;
};

// Z_zy + Z_xz subset of Z_xy: every pairwise sum within budget must land on
// a member of Z_xy at 1e-9.
inline std::vector<SubadditivityViolation> check_subadditivity(
    const TruncatedZSet& z_zy, const TruncatedZSet& z_xz, const TruncatedZSet& z_xy,
    double tol = 1e-9) {
  if (z_zy.budget + z_xz.budget > z_xy.budget + 1e-12)
    throw Error(Errc::budget_mismatch,
                "check_subadditivity: component budgets exceed the target budget");
  std::vector<SubadditivityViolation> out;
  for (const auto& a : z_zy.values)
    for (const auto& b : z_xz.values) {
      double s = a.value + b.value;
      if (s > z_xy.budget + 1e-12) continue;
      if (!zset_contains(z_xy, s, tol))
        out.push_back(SubadditivityViolation{s, a.value, b.value});
    }
  return out;
}

struct RayThresholdResult {
  double rho = kInf;
  TruncatedZSet assembled;
};

// Infimal slack over paths that pass through at least one infinite-leaf
// vertex; below it the Z set is the imc-only enumeration, above it a full
// ray.  A leaf endpoint counts as passed through, so a leaf self-pair gets
// rho = 0 and Z = [0, inf).
inline RayThresholdResult ray_threshold(const SlackGraph& g, int y, int x,
                                        double budget, double delta,
                                        const ExpansionOptions& opt = {},
                                        std::uint64_t value_cap = 200000) {
  RayThresholdResult res;

  bool src_leaf = g.vertices[y].flag == VertexFlag::infinite_leaf;
  bool dst_leaf = g.vertices[x].flag == VertexFlag::infinite_leaf;

  if (src_leaf || dst_leaf) {
    // every path carries the leaf; rho is the infimum over all paths
    TruncatedZSet z = enumerate_path_slacks(g, y, x, budget, delta, opt, value_cap);
    if (y == x) res.rho = 0.0;
    else if (!z.values.empty()) res.rho = z.values.front().value;
    res.assembled.source = g.vertices[y].id;
    res.assembled.target = g.vertices[x].id;
    res.assembled.budget = budget;
    if (res.rho < kInf) res.assembled.ray_start = res.rho;
    return res;
  }

  // rho: cheapest leaf-visiting path, by Dijkstra over (vertex, leaf bit)
  {
    ExpansionOptions o = opt;
    o.budget = budget;
    auto edges = expand_edges(g, o);
    std::vector<std::vector<int>> adjacency(g.vertices.size());
    for (std::size_t i = 0; i < edges.size(); ++i)
      adjacency[edges[i].src].push_back(static_cast<int>(i));
    std::vector<std::array<double, 2>> dist(g.vertices.size(), {kInf, kInf});
    using QE = std::pair<double, std::pair<int, int>>;
    std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
    dist[y][0] = 0.0;
    pq.push({0.0, {y, 0}});
    while (!pq.empty()) {
      auto [dv, key] = pq.top();
      pq.pop();
      auto [v, bit] = key;
      if (dv > dist[v][bit]) continue;
      for (int ei : adjacency[v]) {
        const ExpandedEdge& e = edges[ei];
        int nbit = bit | (g.vertices[e.dst].flag == VertexFlag::infinite_leaf ? 1 : 0);
        double nd = dv + e.slack;
        if (nd > budget + 1e-12) continue;
        if (nd < dist[e.dst][nbit]) {
          dist[e.dst][nbit] = nd;
          pq.push({nd, {e.dst, nbit}});
        }
      }
    }
    res.rho = dist[x][1];
  }

  std::vector<GraphVertex> sub_vertices;
  std::vector<double> sub_rates;
  std::vector<int> remap(g.vertices.size(), -1);
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    if (g.vertices[i].flag == VertexFlag::imc) {
      remap[i] = static_cast<int>(sub_vertices.size());
      sub_vertices.push_back(g.vertices[i]);
      sub_rates.push_back(g.vertex_rate[i]);
    }
  }
  std::vector<GraphEdge> sub_edges;
  for (const auto& e : g.edges)
    if (remap[e.src] >= 0 && remap[e.dst] >= 0) {
      GraphEdge c = e;
      c.src = remap[e.src];
      c.dst = remap[e.dst];
      sub_edges.push_back(std::move(c));
    }
  SlackGraph sub = build_graph(sub_vertices, sub_edges, sub_rates);
  TruncatedZSet z_imc =
      enumerate_path_slacks(sub, remap[y], remap[x], budget, delta, opt, value_cap);

  res.assembled = z_imc;
  if (res.rho < kInf) {
    res.assembled.ray_start = res.rho;
    std::vector<ZValue> kept;
    for (auto& v : res.assembled.values)
      if (v.value < res.rho - 1e-12) kept.push_back(std::move(v));
    res.assembled.values = std::move(kept);
  }
  return res;
}

struct MarkedBusemannLabel {
  double beta = 0.0;
  std::string vertex;
};

struct CensusClass {
  std::string end;     // "+", "-", or "dense"
  std::string vertex;  // empty for the dense class
};

struct CensusReport {
  std::size_t class_count = 0;
  std::vector<CensusClass> classes;
  bool reversal_ok = true;           // Z_yy equals the reversed-graph Z_yy
  std::vector<double> reversal_discrepancies;  // per vertex, Hausdorff value gap
  bool membership_reflexive = true;  // 0 in Z_xx for every vertex
};

// 2|V|+1 orbit-closure classes: one per vertex and end, plus the dense one.
// The '-'-end classes are realized on the reversed graph with identical
// slacks; the reversal check recomputes Z_vv there and compares values.
inline CensusReport census(const SlackGraph& g, double budget, double delta,
                           const ExpansionOptions& opt = {},
                           std::uint64_t value_cap = 200000) {
  CensusReport rep;
  for (const auto& v : g.vertices) rep.classes.push_back({"+", v.id});
  for (const auto& v : g.vertices) rep.classes.push_back({"-", v.id});
  rep.classes.push_back({"dense", ""});
  rep.class_count = rep.classes.size();

  SlackGraph rg = reverse_graph(g);
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    int vi = static_cast<int>(i);
    TruncatedZSet z_fwd = enumerate_path_slacks(g, vi, vi, budget, delta, opt, value_cap);
    TruncatedZSet z_rev = enumerate_path_slacks(rg, vi, vi, budget, delta, opt, value_cap);
    std::vector<double> a, b;
    for (const auto& v : z_fwd.values) a.push_back(v.value);
    for (const auto& v : z_rev.values) b.push_back(v.value);
    double disc = hausdorff_distance(a, b);
    rep.reversal_discrepancies.push_back(disc);
    if (!(disc <= 1e-9)) rep.reversal_ok = false;
    if (!zset_contains(z_fwd, 0.0, 1e-12)) rep.membership_reflexive = false;
  }
  return rep;
}

// Membership predicate: a point with marked Busemann label (T, x_j) lies in
// the closure of N x_i iff T is in Z_{x_i, x_j}.
inline bool orbit_closure_contains(const TruncatedZSet& z_xi_xj,
                                   const MarkedBusemannLabel& label,
                                   double tol = 1e-9) {
  return zset_contains(z_xi_xj, label.beta, tol);
}

}  // namespace horolab
