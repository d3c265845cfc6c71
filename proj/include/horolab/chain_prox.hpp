#pragma once

// Chain proximality as computation.  Discretized model systems (circle
// rotations, interval exchanges, the doubling map, laminar multi-component
// transversals with shrinking gaps), epsilon-interception cost through a
// layered shortest path, equivalence-class extraction, and the
// (b,eps)-chain recurrence checker.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "horolab/moebius.hpp"

namespace horolab {

enum class ModelKind { rotation, iet, doubling, laminar, custom };

struct LaminarComponent {
  int n = 2;
  double base_gap = 0.02;
  double ratio = 0.6;  // forward contraction of gaps, in (0, 1)
};

struct ModelSpec {
  ModelKind kind = ModelKind::rotation;
  double alpha = 0.0;                     // rotation angle
  std::vector<double> iet_lengths;        // positive, summing to 1
  std::vector<int> iet_permutation;
  std::vector<LaminarComponent> laminar;  // per-component schedules
  double separation = 0.3;                // cross-component distance
  std::vector<double> custom_positions;   // custom: points on a line
  std::vector<int> custom_sigma;
};

struct DiscretizedSystem {
  ModelKind kind = ModelKind::rotation;
  std::vector<double> position;   // within the component's circle (or line)
  std::vector<int> component;     // component id per point
  std::vector<double> circumference;  // per component; 0 = line metric
  double separation = 0.0;
  std::vector<int> sigma;
  double h = 0.0;                 // resolution: max sampling gap
  double step_length = 1.0;       // flow time represented by one sigma step

  int size() const { return static_cast<int>(position.size()); }

  double metric(int i, int j) const {
    if (component[i] != component[j]) return separation;
    double c = circumference[component[i]];
    double d = std::abs(position[i] - position[j]);
    if (c > 0.0) d = std::min(d, c - d);
    return d;
  }
};

namespace detail {

inline void check_triangle_samples(const DiscretizedSystem& sys) {
  std::mt19937_64 rng(12345);
  int n = sys.size();
  for (int t = 0; t < 200; ++t) {
    int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % n),
        k = static_cast<int>(rng() % n);
    if (sys.metric(i, k) > sys.metric(i, j) + sys.metric(j, k) + 1e-12)
      throw Error(Errc::invalid_model, "discretize: metric fails the triangle check");
  }
}

}  // namespace detail

inline DiscretizedSystem discretize(const ModelSpec& spec, int n) {
  if (n < 2) throw Error(Errc::invalid_model, "discretize: n < 2");
  DiscretizedSystem sys;
  sys.kind = spec.kind;

  auto circle_points = [&](int count) {
    for (int i = 0; i < count; ++i) {
      sys.position.push_back(static_cast<double>(i) / count);
      sys.component.push_back(0);
    }
    sys.circumference = {1.0};
    sys.h = 1.0 / count;
  };

  switch (spec.kind) {
    case ModelKind::rotation: {
      circle_points(n);
      long long shift = std::llround(spec.alpha * n);
      for (int i = 0; i < n; ++i)
        sys.sigma.push_back(static_cast<int>((i + shift % n + n) % n));
      break;
    }
    case ModelKind::doubling: {
      circle_points(n);
      for (int i = 0; i < n; ++i) sys.sigma.push_back((2 * i) % n);
      break;
    }
    case ModelKind::iet: {
      double total = 0.0;
      for (double l : spec.iet_lengths) {
        if (l <= 0.0) throw Error(Errc::invalid_model, "iet: nonpositive length");
        total += l;
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw Error(Errc::invalid_model, "iet: lengths must sum to 1");
      std::size_t m = spec.iet_lengths.size();
      if (spec.iet_permutation.size() != m)
        throw Error(Errc::invalid_model, "iet: permutation size mismatch");
      std::vector<double> start(m, 0.0), new_start(m, 0.0);
      for (std::size_t k = 1; k < m; ++k)
        start[k] = start[k - 1] + spec.iet_lengths[k - 1];
      // target order: interval k lands at position determined by permutation
      std::vector<double> acc(m, 0.0);
      double run = 0.0;
      for (std::size_t pos = 0; pos < m; ++pos) {
        // which source interval sits at target slot pos
        int src = -1;
        for (std::size_t k = 0; k < m; ++k)
          if (spec.iet_permutation[k] == static_cast<int>(pos)) src = static_cast<int>(k);
        if (src < 0) throw Error(Errc::invalid_model, "iet: not a permutation");
        new_start[src] = run;
        run += spec.iet_lengths[src];
      }
      circle_points(n);
      for (int i = 0; i < n; ++i) {
        double x = sys.position[i];
        std::size_t k = m - 1;
        for (std::size_t j = 0; j + 1 < m; ++j)
          if (x < start[j + 1]) { k = j; break; }
        double y = x - start[k] + new_start[k];
        int img = static_cast<int>(std::llround(y * n)) % n;
        sys.sigma.push_back((img + n) % n);
      }
      break;
    }
    case ModelKind::laminar: {
      if (spec.laminar.empty())
        throw Error(Errc::invalid_model, "laminar: no components");
      if (spec.separation <= 0.0)
        throw Error(Errc::invalid_model, "laminar: separation must be positive");
      sys.separation = spec.separation;
      double hmax = 0.0;
      for (std::size_t c = 0; c < spec.laminar.size(); ++c) {
        const LaminarComponent& lc = spec.laminar[c];
        if (lc.n < 2 || lc.ratio <= 0.0 || lc.ratio >= 1.0 || lc.base_gap <= 0.0)
          throw Error(Errc::invalid_model, "laminar: bad component parameters");
        int base_index = sys.size();
        double pos = 0.0;
        for (int j = 0; j < lc.n; ++j) {
          sys.position.push_back(pos);
          sys.component.push_back(static_cast<int>(c));
          // gaps shrink forward along the cycle; the wrap gap resets
          double gap = j + 1 < lc.n ? lc.base_gap * std::pow(lc.ratio, j) : lc.base_gap;
          hmax = std::max(hmax, gap);
          pos += gap;
        }
        sys.circumference.push_back(pos);
        for (int j = 0; j < lc.n; ++j)
          sys.sigma.push_back(base_index + (j + 1) % lc.n);
        if (pos / 2.0 > 2.0 * spec.separation)
          throw Error(Errc::invalid_model, "laminar: component too large for separation");
      }
      sys.h = hmax;
      break;
    }
    case ModelKind::custom: {
      if (spec.custom_positions.size() != spec.custom_sigma.size() ||
          spec.custom_positions.size() < 2)
        throw Error(Errc::invalid_model, "custom: positions/sigma mismatch");
      sys.position = spec.custom_positions;
      sys.component.assign(sys.position.size(), 0);
      sys.circumference = {0.0};  // line metric
      sys.sigma = spec.custom_sigma;
      double h = 0.0;
      std::vector<double> sorted = sys.position;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
        h = std::max(h, sorted[i + 1] - sorted[i]);
      sys.h = h;
      for (int s : sys.sigma)
        if (s < 0 || s >= sys.size())
          throw Error(Errc::invalid_model, "custom: sigma out of range");
      break;
    }
  }
  detail::check_triangle_samples(sys);
  return sys;
}

// Terminal tolerance: strictly within h, with a relative guard so points at
// distance exactly h (adjacent samples of a uniform circle) never qualify
// through rounding noise.
inline bool within_terminal(const DiscretizedSystem& sys, int i, int j) {
  return sys.metric(i, j) < sys.h * (1.0 - 1e-9);
}

struct InterceptionStep {
  int index = 0;       // x_{m+1}: the point landed on after the jump
  double jump_cost = 0.0;
};

struct InterceptionCertificate {
  int start = 0;
  int target = 0;
  int horizon = 0;  // the m achieving the cost
  std::vector<InterceptionStep> chain;
  double total_cost = 0.0;
};

namespace detail {

// Neighbors within a layer: adjacent points of the same component (the arc
// metric decomposes jumps into adjacent moves) plus one representative of
// every other component at the separation cost.
struct LayerMoves {
  std::vector<std::array<int, 2>> adj;    // cyclic neighbors per index
  std::vector<double> adj_cost_fwd;       // gap to next index
  std::vector<double> adj_cost_bwd;       // gap to previous index
  std::vector<std::vector<int>> comp_members;
};

inline LayerMoves layer_moves(const DiscretizedSystem& sys) {
  LayerMoves lm;
  int n = sys.size();
  lm.adj.assign(n, {0, 0});
  lm.adj_cost_fwd.assign(n, 0.0);
  lm.adj_cost_bwd.assign(n, 0.0);
  int ncomp = static_cast<int>(sys.circumference.size());
  lm.comp_members.assign(ncomp, {});
  // points are generated in position order within each component
  std::vector<std::vector<int>> by_comp(ncomp);
  for (int i = 0; i < n; ++i) by_comp[sys.component[i]].push_back(i);
  for (int c = 0; c < ncomp; ++c) {
    auto& v = by_comp[c];
    std::sort(v.begin(), v.end(), [&](int a, int b) {
      return sys.position[a] < sys.position[b];
    });
    lm.comp_members[c] = v;
    int m = static_cast<int>(v.size());
    for (int k = 0; k < m; ++k) {
      int nxt = v[(k + 1) % m], prv = v[(k - 1 + m) % m];
      lm.adj[v[k]] = {nxt, prv};
      lm.adj_cost_fwd[v[k]] = sys.metric(v[k], nxt);
      lm.adj_cost_bwd[v[k]] = sys.metric(v[k], prv);
    }
  }
  return lm;
}

}  // namespace detail

struct InterceptionResult {
  double cost = kInf;
  std::optional<InterceptionCertificate> certificate;
};

// Minimum over m <= M of the layered shortest-path cost: each layer step is
// a free move to sigma(current) followed by an optional jump priced by the
// metric; the terminal condition is landing strictly within h of
// sigma^m(target).  Costs are exact for the arc metrics used here.
inline InterceptionResult interception_cost(const DiscretizedSystem& sys, int x, int y,
                                            int M) {
  if (M < 1) throw Error(Errc::invalid_model, "interception_cost: M < 1");
  InterceptionResult res;
  if (x == y) {
    res.cost = 0.0;
    res.certificate = InterceptionCertificate{x, y, 0, {}, 0.0};
    return res;
  }
  int n = sys.size();
  auto lm = detail::layer_moves(sys);

  std::vector<int> target_orbit(M + 1);
  target_orbit[0] = y;
  for (int m = 1; m <= M; ++m) target_orbit[m] = sys.sigma[target_orbit[m - 1]];

  auto id = [&](int layer, int i) { return layer * n + i; };
  std::vector<double> dist(static_cast<std::size_t>(M + 1) * n, kInf);
  std::vector<int> pred(static_cast<std::size_t>(M + 1) * n, -1);

  using QE = std::pair<double, int>;
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
  dist[id(0, x)] = 0.0;
  pq.push({0.0, id(0, x)});

  double best = kInf;
  int best_state = -1;

  while (!pq.empty()) {
    auto [dv, s] = pq.top();
    pq.pop();
    if (dv > dist[s]) continue;
    if (dv >= best) break;
    int layer = s / n, i = s % n;
    if (layer >= 1 && within_terminal(sys, i, target_orbit[layer])) {
      best = dv;
      best_state = s;
      break;
    }
    auto relax = [&](int t, double w) {
      if (dv + w < dist[t]) {
        dist[t] = dv + w;
        pred[t] = s;
        pq.push({dist[t], t});
      }
    };
    if (layer < M) relax(id(layer + 1, sys.sigma[i]), 0.0);
    if (layer >= 1) {
      relax(id(layer, lm.adj[i][0]), lm.adj_cost_fwd[i]);
      relax(id(layer, lm.adj[i][1]), lm.adj_cost_bwd[i]);
      for (std::size_t c = 0; c < lm.comp_members.size(); ++c) {
        if (static_cast<int>(c) == sys.component[i]) continue;
        for (int rep : lm.comp_members[c]) relax(id(layer, rep), sys.separation);
      }
    }
  }

  if (best_state < 0) return res;
  res.cost = best;

  // reconstruct: landing index per layer, jump cost = d(sigma(prev), landing)
  std::vector<int> landing;
  int cur = best_state;
  int layers = cur / n;
  landing.assign(layers + 1, -1);
  while (cur >= 0) {
    int layer = cur / n, i = cur % n;
    // first state seen per layer on the backward walk is that layer's landing
    if (landing[layer] < 0) landing[layer] = i;
    cur = pred[cur];
  }
  InterceptionCertificate cert;
  cert.start = x;
  cert.target = y;
  cert.horizon = layers;
  double tot = 0.0;
  int prev = x;
  for (int m = 1; m <= layers; ++m) {
    InterceptionStep st;
    st.index = landing[m];
    st.jump_cost = sys.metric(sys.sigma[prev], landing[m]);
    tot += st.jump_cost;
    cert.chain.push_back(st);
    prev = landing[m];
  }
  cert.total_cost = tot;
  res.certificate = cert;
  return res;
}

// Replays a certificate: follows sigma, applies the recorded jumps, and
// checks the terminal condition and the cost sum.
inline bool replay_certificate(const DiscretizedSystem& sys,
                               const InterceptionCertificate& cert) {
  int cur = cert.start;
  double tot = 0.0;
  for (const auto& st : cert.chain) {
    int moved = sys.sigma[cur];
    double jump = sys.metric(moved, st.index);
    if (std::abs(jump - st.jump_cost) > 1e-12) return false;
    tot += jump;
    cur = st.index;
  }
  if (std::abs(tot - cert.total_cost) > 1e-9) return false;
  int target = cert.target;
  for (int m = 0; m < cert.horizon; ++m) target = sys.sigma[target];
  if (cert.horizon == 0) return cert.start == cert.target;
  return within_terminal(sys, cur, target);
}

struct ProximalityPartition {
  std::vector<std::vector<int>> classes;
  double eps_class = 0.0;
  double merge_threshold = 0.0;
  int horizon = 0;
  std::vector<std::pair<int, int>> asymmetric_pairs;
  double max_within_cost = 0.0;  // over evaluated merged pairs
  double min_cross_cost = kInf;  // over evaluated unmerged pairs
};

// Union-find classification.  Chain proximality demands interceptions for
// *every* positive epsilon, so the numerical merge threshold is the
// resolution floor min(eps_class, h/2) rather than eps_class itself: costs
// below it are indistinguishable from zero at sampling scale h, while a
// genuine rotation keeps every pair at cost d(x,y) >= h.  Candidate pairs
// are the within-component adjacencies, a seeded random sample, and one
// representative pair per component pair.
inline ProximalityPartition classify(const DiscretizedSystem& sys, double eps_class,
                                     int M, int random_pairs = 200,
                                     std::uint64_t seed = 1) {
  int n = sys.size();
  ProximalityPartition part;
  part.eps_class = eps_class;
  part.merge_threshold = std::min(eps_class, sys.h / 2.0);
  part.horizon = M;

  std::vector<std::pair<int, int>> pairs;
  auto lm = detail::layer_moves(sys);
  for (int i = 0; i < n; ++i)
    if (lm.adj[i][0] != i) pairs.push_back({i, lm.adj[i][0]});
  std::mt19937_64 rng(seed);
  for (int t = 0; t < random_pairs; ++t) {
    int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % n);
    if (i != j) pairs.push_back({i, j});
  }
  for (std::size_t a = 0; a < lm.comp_members.size(); ++a)
    for (std::size_t b = a + 1; b < lm.comp_members.size(); ++b)
      pairs.push_back({lm.comp_members[a][0], lm.comp_members[b][0]});

  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };

  for (auto [i, j] : pairs) {
    double fwd = interception_cost(sys, i, j, M).cost;
    double bwd = interception_cost(sys, j, i, M).cost;
    bool fw = fwd < part.merge_threshold;
    bool bw = bwd < part.merge_threshold;
    if (fw && bw) {
      parent[find(i)] = find(j);
      part.max_within_cost = std::max({part.max_within_cost, fwd, bwd});
    } else if (fw != bw) {
      part.asymmetric_pairs.push_back({i, j});
    } else {
      part.min_cross_cost = std::min({part.min_cross_cost, fwd, bwd});
    }
  }

  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  for (auto& [root, members] : groups) part.classes.push_back(members);
  return part;
}

struct RecurrenceChain {
  std::vector<std::pair<int, int>> segments;  // (start index, sigma steps)
  std::vector<double> jumps;
};

// (b, eps)-chain recurrence: a cycle of orbit segments of flow length at
// least b returning to x, with every inter-segment jump at most eps.
inline std::pair<bool, std::optional<RecurrenceChain>> chain_recurrent(
    const DiscretizedSystem& sys, int x, double b, double eps, int horizon) {
  if (b <= 0.0 || eps <= 0.0)
    throw Error(Errc::invalid_model, "chain_recurrent: b and eps must be positive");
  int k_min = std::max(1, static_cast<int>(std::ceil(b / sys.step_length)));
  int n = sys.size();

  struct Visit { int steps; int pred_index; int pred_k; };
  std::vector<Visit> visited(n, {-1, -1, 0});
  std::queue<int> q;
  visited[x] = {0, -1, 0};
  q.push(x);
  while (!q.empty()) {
    int i = q.front();
    q.pop();
    int used = visited[i].steps;
    int cur = i;
    for (int k = 1; k <= horizon - used; ++k) {
      cur = sys.sigma[cur];
      if (k < k_min) continue;
      // closing jump back to x
      if (sys.metric(cur, x) <= eps) {
        RecurrenceChain chain;
        // reconstruct forward path of segments
        std::vector<std::pair<int, int>> segs{{i, k}};
        int node = i;
        while (visited[node].pred_index >= 0) {
          segs.push_back({visited[node].pred_index, visited[node].pred_k});
          node = visited[node].pred_index;
        }
        std::reverse(segs.begin(), segs.end());
        chain.segments = segs;
        for (std::size_t s = 0; s + 1 < segs.size(); ++s) {
          int end = segs[s].first;
          for (int t = 0; t < segs[s].second; ++t) end = sys.sigma[end];
          chain.jumps.push_back(sys.metric(end, segs[s + 1].first));
        }
        int end = cur;
        chain.jumps.push_back(sys.metric(end, x));
        return {true, chain};
      }
      // jump to any point within eps and continue
      for (int j = 0; j < n; ++j) {
        if (visited[j].steps >= 0) continue;
        if (sys.metric(cur, j) <= eps) {
          visited[j] = {used + k, i, k};
          q.push(j);
        }
      }
    }
  }
  return {false, std::nullopt};
}

}  // namespace horolab
