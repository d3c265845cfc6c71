#pragma once

// The acceptance suite: every numerically checkable claim the library makes,
// pinned to concrete tolerances and golden constants, one pass/fail line per
// criterion.  `verify-all` in the CLI and the ctest acceptance binary both
// run through here.

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "horolab/chain_prox.hpp"
#include "horolab/cover.hpp"
#include "horolab/io.hpp"
#include "horolab/lipschitz.hpp"
#include "horolab/moebius.hpp"
#include "horolab/slack.hpp"
#include "horolab/slack_graph.hpp"

namespace horolab::acceptance {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double limit_seconds = 0.0;
  std::string detail;
};

struct SuiteResult {
  std::vector<CriterionResult> results;
  bool all_pass = true;
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

inline MoebiusElement random_element(std::mt19937_64& rng) {
  for (;;) {
    double a = 2.0 * uniform01(rng) - 1.0;
    double b = 2.0 * uniform01(rng) - 1.0;
    double c = 2.0 * uniform01(rng) - 1.0;
    double d = 2.0 * uniform01(rng) - 1.0;
    if (a * d - b * c > 1e-6) return MoebiusElement::normalize(a, b, c, d);
  }
}

struct BundleContext {
  FuchsianCoverSpec spec;
  std::vector<VertexSpec> vertices;
  std::optional<ConnectorScan> connectors_len8;
  std::optional<std::pair<ModelTau, CompatibilityReport>> model;

  const ConnectorScan& connectors(int max_len, double cap) {
    if (!connectors_len8)
      connectors_len8 = enumerate_connectors(spec, vertices, max_len, cap, 40000000);
    return *connectors_len8;
  }

  ModelTau& tau() {
    if (!model) model = sample_model_tau(spec, vertices, 3.0, 0.1, 4);
    return model->first;
  }
  const CompatibilityReport& tau_report() {
    tau();
    return model->second;
  }

  // cheapest distinct self-connectors at a vertex, as matrix-backed seeds
  SlackGraph seed_graph(int vertex, int nseeds, int max_len = 4) {
    auto scan = enumerate_connectors(spec, vertices, max_len, 6.0);
    std::vector<const ConnectorCandidate*> selfs;
    for (const auto& c : scan.candidates)
      if (c.source == vertex && c.target == vertex) selfs.push_back(&c);
    std::sort(selfs.begin(), selfs.end(),
              [](auto* a, auto* b) { return a->raw_slack < b->raw_slack; });
    std::vector<GraphEdge> edges;
    double last = -1.0;
    for (auto* c : selfs) {
      if (static_cast<int>(edges.size()) >= nseeds) break;
      if (std::abs(c->raw_slack - last) < 1e-9) continue;
      GraphEdge e;
      e.id = "seed" + std::to_string(edges.size());
      e.src = e.dst = 0;
      e.slack = c->raw_slack;
      e.matrix = c->matrix;
      last = c->raw_slack;
      edges.push_back(std::move(e));
    }
    return build_graph({{vertices[vertex].name, VertexFlag::imc}}, edges,
                       {vertices[vertex].length});
  }

  // graph over both vertices with explicit connector slacks (no closure)
  SlackGraph connector_graph(int max_len, double cap) {
    auto scan = enumerate_connectors(spec, vertices, max_len, cap);
    std::vector<GraphVertex> gv;
    for (const auto& v : vertices) gv.push_back({v.name, VertexFlag::imc});
    std::vector<GraphEdge> edges;
    int k = 0;
    for (const auto& c : scan.candidates) {
      GraphEdge e;
      e.id = "c" + std::to_string(k++);
      e.src = c.source;
      e.dst = c.target;
      e.slack = c.raw_slack;
      edges.push_back(std::move(e));
    }
    return build_graph(gv, edges);
  }
};

inline BundleContext load_bundle(const ExperimentConfig& cfg) {
  BundleContext ctx;
  ctx.spec = cover_spec_from_json(Json::parse(read_text_file(cfg.bundle_path)));
  ctx.vertices = build_vertices(ctx.spec, ctx.spec.vertex_words);
  return ctx;
}

// randomized broken chains for the straightening harness
inline BrokenChain random_chain(std::mt19937_64& rng, int segments) {
  BrokenChain chain;
  chain.min_segment_length = 1.0;
  UnitTangent cur{{4.0 * uniform01(rng) - 2.0, std::exp(1.5 * (2.0 * uniform01(rng) - 1.0))},
                  wrap_angle(2 * kPi * uniform01(rng))};
  double eps_target = std::pow(10.0, -4.0 + 3.0 * uniform01(rng));  // [1e-4, 1e-1]
  double total_jumps = 0.0;
  for (int s = 0; s < segments; ++s) {
    double len = 1.0 + uniform01(rng);
    chain.segments.push_back({cur, len});
    UnitTangent end = chain.segments.back().end_frame();
    if (s + 1 < segments) {
      double delta = eps_target / (segments - 1);
      double u = uniform01(rng);
      UnitTangent next = end;
      next.dir = wrap_angle(next.dir + (2.0 * (rng() & 1) - 1.0) * u * delta);
      double move = (1.0 - u) * delta;
      UnitTangent mover = next;
      mover.dir = wrap_angle(next.dir + kPi / 2);
      next.base = geodesic_flow(mover, move).base;
      total_jumps += t1_distance(end, next);
      cur = next;
    }
  }
  chain.jump_total = std::max(total_jumps, 1e-7);
  return chain;
}

// exhaustive leaf-aware path oracle for the ray-threshold example
struct RayOracle {
  double rho = kInf;
  std::vector<double> imc_values;
};

inline RayOracle ray_oracle(const SlackGraph& g, int y, int x, double budget) {
  RayOracle out;
  struct Node {
    int v;
    double s;
    bool leaf;
  };
  std::vector<double> imc;
  if (y == x) imc.push_back(0.0);
  std::vector<Node> frontier{{y, 0.0, g.vertices[y].flag == VertexFlag::infinite_leaf}};
  while (!frontier.empty()) {
    std::vector<Node> next;
    for (const auto& nd : frontier)
      for (const auto& e : g.edges) {
        if (e.src != nd.v || !e.slack) continue;
        double s = nd.s + *e.slack;
        if (s > budget + 1e-12) continue;
        bool leaf = nd.leaf || g.vertices[e.dst].flag == VertexFlag::infinite_leaf;
        if (e.dst == x) {
          if (leaf) out.rho = std::min(out.rho, s);
          else imc.push_back(s);
        }
        next.push_back({e.dst, s, leaf});
      }
    frontier = std::move(next);
  }
  std::sort(imc.begin(), imc.end());
  imc.erase(std::unique(imc.begin(), imc.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            imc.end());
  for (double v : imc)
    if (v < out.rho - 1e-12) out.imc_values.push_back(v);
  return out;
}

}  // namespace detail

// ---- deterministic artifact pipeline (used by verify-all and criterion 16) ----

inline void write_artifacts(const ExperimentConfig& cfg, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto put = [&](const std::string& name, const Json& payload) {
    write_text_file(dir + "/" + name, emit_json(artifact(cfg, payload)));
  };
  auto put_csv = [&](const std::string& name, const std::string& csv) {
    write_text_file(dir + "/" + name,
                    "# " + std::string(kToolVersion) + " config=" + cfg.hash() + "\n" + csv);
  };

  // bruhat
  auto nau = bruhat_nau(MoebiusElement::normalize(1, 1, 1, 2));
  put("bruhat.json", Json{{"n", nau.n_param}, {"t", nau.t}, {"u", nau.u_param}});

  // bundle connectors and slacks
  auto ctx = acceptance::detail::load_bundle(cfg);
  auto scan = enumerate_connectors(ctx.spec, ctx.vertices, 4, cfg.slack_cap);
  Json conn = Json::array();
  for (const auto& c : scan.candidates)
    conn.push_back(Json{{"source", ctx.vertices[c.source].name},
                        {"target", ctx.vertices[c.target].name},
                        {"word", word_to_json(ctx.spec, c.word)},
                        {"slack", c.raw_slack},
                        {"line", line_to_json(c.line)}});
  put("connectors.json", Json{{"count", scan.candidates.size()}, {"connectors", conn}});

  // twist family of the cheapest self connector
  for (const auto& c : scan.candidates) {
    if (c.source != c.target) continue;
    const auto& v = ctx.vertices[c.source];
    auto fam = twist_family(v.base_lift, evaluate_word(ctx.spec, c.word), v.base_lift,
                            v.matrix, 0, 30, "bundle-self");
    put("twist.json", twist_family_to_json(fam));
    put_csv("twist.csv", twist_family_to_csv(fam));
    break;
  }

  // toy zset
  {
    GraphEdge e1{"e0", 0, 0, 1.0, std::nullopt, std::nullopt};
    GraphEdge e2{"e1", 0, 0, 1.5, std::nullopt, std::nullopt};
    auto g = build_graph({{"v", VertexFlag::imc}}, {e1, e2});
    auto z = enumerate_path_slacks(g, 0, 0, 3.2, 0.9);
    put("zset.json", zset_to_json(z));
    put_csv("zset.csv", zset_to_csv(z));
  }

  // depth report on the bundle seed graph
  {
    auto g = ctx.seed_graph(0, 1);
    double s0 = *g.edges[0].slack;
    double budget = 5.0 * s0 / 0.9 + 0.12;
    double h0 = 4e-4;
    ExpansionOptions opt;
    opt.budget = budget;
    opt.tolerance = h0 / 200.0;
    opt.member_window = 4.0 * h0;
    auto rep = check_filtration(g, 0, 0, budget, h0, s0 / 2.0, 4, std::nullopt, opt,
                                cfg.witness_cap);
    put("depth.json", depth_report_to_json(rep));
  }

  // census of the toy two-vertex graph
  {
    std::vector<GraphEdge> es;
    auto mk = [&](const char* id, int s, int d, double v) {
      GraphEdge e;
      e.id = id;
      e.src = s;
      e.dst = d;
      e.slack = v;
      es.push_back(e);
    };
    mk("aa", 0, 0, 1.0);
    mk("ab", 0, 1, 0.8);
    mk("ba", 1, 0, 0.9);
    mk("bb", 1, 1, 1.2);
    auto g = build_graph({{"a", VertexFlag::imc}, {"b", VertexFlag::imc}}, es);
    put("census.json", census_to_json(census(g, 5.0, 0.7)));
  }

  // chain proximality on a rotation sample
  {
    ModelSpec m;
    m.kind = ModelKind::rotation;
    m.alpha = std::sqrt(2.0) - 1.0;
    auto sys = discretize(m, 200);
    auto part = classify(sys, cfg.class_threshold, 100, 60, cfg.seed);
    put("chainprox.json", partition_to_json(part));
    auto r = interception_cost(sys, 0, 50, 100);
    put("chainrec.json",
        Json{{"interception_cost", r.cost},
             {"certificate", r.certificate ? certificate_to_json(*r.certificate)
                                           : Json(nullptr)}});
  }

  // mcshane toy
  {
    PartialLipschitzFunction<double> f{{0.0, 10.0},
                                       {0.0, 3.0},
                                       [](const double& a, const double& b) {
                                         return std::abs(a - b);
                                       }};
    auto vals = mcshane_extend(f, {5.0, 2.0, 7.5});
    put("mcshane.json", Json{{"queries", {5.0, 2.0, 7.5}}, {"values", vals}});
  }
}

// ---- the sixteen criteria ----

inline SuiteResult run_all(const ExperimentConfig& cfg, std::ostream& log,
                           const std::string& golden_path = "golden/registry.json") {
  SuiteResult suite;
  GoldenRegistry registry = GoldenRegistry::load(golden_path);
  auto ctx = detail::load_bundle(cfg);

  auto run = [&](int index, const std::string& name, double limit,
                 const std::function<std::pair<bool, std::string>()>& fn) {
    CriterionResult r;
    r.index = index;
    r.name = name;
    r.limit_seconds = limit;
    auto t0 = std::chrono::steady_clock::now();
    try {
      auto [ok, detail] = fn();
      r.pass = ok;
      r.detail = detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > limit) {
      r.pass = false;
      r.detail += " [over the " + std::to_string(limit) + " s budget]";
    }
    suite.all_pass = suite.all_pass && r.pass;
    log << "[" << std::setw(2) << index << "/16] " << (r.pass ? "PASS" : "FAIL") << "  "
        << name << "  (" << std::fixed << std::setprecision(2) << r.seconds << " s)";
    if (!r.detail.empty()) log << "  " << r.detail;
    log << "\n" << std::defaultfloat;
    suite.results.push_back(std::move(r));
  };

  // 1. Bruhat round trip and the delta identity
  run(1, "bruhat-roundtrip", 1.0, [&]() -> std::pair<bool, std::string> {
    std::mt19937_64 rng(cfg.seed ^ 0x1111);
    double worst = 0.0;
    int tested = 0;
    for (int k = 0; k < 10000; ++k) {
      auto m = detail::random_element(rng);
      if (std::abs(m.a) <= 1e-6) continue;
      ++tested;
      auto nau = bruhat_nau(m);
      worst = std::max(worst, nau_reconstruct(nau).frobenius_distance(m));
      if (log_delta(m) != 2.0 * std::log(std::abs(m.a)))
        return {false, "log_delta identity broken"};
    }
    std::ostringstream os;
    os << tested << " matrices, worst reconstruction " << worst;
    return {worst < 1e-9, os.str()};
  });

  // 2. Stable/unstable convention self-test
  run(2, "convention-selftest", 1.0, [&]() -> std::pair<bool, std::string> {
    auto dist_at = [&](const MoebiusElement& pert, double t) {
      auto flowed = realize(pert * MoebiusElement::a_flow(-t));
      auto base = realize(MoebiusElement::a_flow(-t));
      return t1_distance(flowed, base);
    };
    auto n = MoebiusElement::n_lower(0.1);
    auto u = MoebiusElement::u_upper(0.1);
    double n_ratio = dist_at(n, 5.0) / dist_at(n, 0.0);
    double u_ratio = dist_at(u, 5.0) / dist_at(u, 0.0);
    std::ostringstream os;
    os << "lower contracts x" << n_ratio << ", upper expands x" << u_ratio;
    return {n_ratio < 1e-2 && u_ratio > 10.0, os.str()};
  });

  // 3. Bruhat slack vs geometric slack with the McShane model tau
  run(3, "slack-cross-oracle", 60.0, [&]() -> std::pair<bool, std::string> {
    const auto& rep = ctx.tau_report();
    if (rep.violation_count > 0 || rep.line_conflicts)
      return {false, "model tau incompatible"};
    const auto& scan = ctx.connectors(cfg.max_len, cfg.slack_cap);
    if (scan.candidates.size() < 20)
      return {false, "fewer than 20 connectors"};
    double worst = 0.0;
    const ModelTau& base = ctx.tau();
    for (const auto& c : scan.candidates) {
      ModelTau local = base;  // private copy keeps per-connector refinements local
      auto cmp = connector_cross_check(ctx.spec, ctx.vertices, c, local, 1e-3);
      worst = std::max(worst, cmp.difference);
      if (cmp.difference >= 1e-3) {
        std::ostringstream os;
        os << "connector [" << word_to_string(ctx.spec, c.word) << "] off by "
           << cmp.difference;
        return {false, os.str()};
      }
    }
    std::ostringstream os;
    os << scan.candidates.size() << " connectors, worst gap " << worst;
    return {true, os.str()};
  });

  // 4. Twist-family law
  run(4, "twist-family-law", 10.0, [&]() -> std::pair<bool, std::string> {
    auto scan = enumerate_connectors(ctx.spec, ctx.vertices, 4, cfg.slack_cap);
    int families = 0;
    double worst = 0.0;
    for (const auto& c : scan.candidates) {
      if (c.source != c.target) continue;
      const auto& v = ctx.vertices[c.source];
      auto fam = twist_family(v.base_lift, evaluate_word(ctx.spec, c.word), v.base_lift,
                              v.matrix, 0, 40, "f" + std::to_string(families));
      if (!fam.forward_limit) continue;
      for (const auto& [k, s] : fam.slacks) {
        if (k < fam.detection_threshold) continue;
        double resid = std::abs(s - *fam.forward_limit -
                                twist_correction(fam.u_param, fam.n_param, k * fam.rate));
        worst = std::max(worst, resid);
        if (resid >= 1e-8) return {false, "family residual " + std::to_string(resid)};
      }
      ++families;
      if (families >= 8) break;
    }
    std::ostringstream os;
    os << families << " families, worst residual " << worst;
    return {families >= 5, os.str()};
  });

  // 5. Broken-geodesic straightening harness against pinned golden ratios
  run(5, "broken-geodesic-harness", 120.0, [&]() -> std::pair<bool, std::string> {
    std::mt19937_64 rng(cfg.seed ^ 0x5555);
    auto tau = [](std::complex<double> z) { return std::log(z.imag()); };
    double kappa = 0.0, kappa_h = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      auto chain = detail::random_chain(rng, 10);
      if (chain.jump_total < 1e-4 || chain.jump_total > 1e-1) continue;
      auto rep = straighten_and_compare(chain, tau);
      kappa = std::max(kappa, rep.ratio);
      kappa_h = std::max(kappa_h, rep.hausdorff_ratio);
    }
    std::string msg;
    bool ok = registry.check("kappa_hat", kappa, &msg);
    std::string msg2;
    ok = registry.check("kappa_hat_hausdorff", kappa_h, &msg2) && ok;
    std::ostringstream os;
    os << "kappa_hat " << kappa << ", hausdorff " << kappa_h;
    if (!msg.empty()) os << "; " << msg;
    if (!msg2.empty()) os << "; " << msg2;
    return {ok && std::isfinite(kappa) && std::isfinite(kappa_h), os.str()};
  });

  // 6. Z enumeration vs exhaustive concatenation
  run(6, "zset-vs-bruteforce", 30.0, [&]() -> std::pair<bool, std::string> {
    std::mt19937_64 rng(cfg.seed ^ 0x6666);
    for (int trial = 0; trial < 10; ++trial) {
      int nv = 1 + static_cast<int>(detail::uniform01(rng) * 3);
      int ne = 1 + static_cast<int>(detail::uniform01(rng) * 4);
      std::vector<GraphVertex> vs;
      for (int i = 0; i < nv; ++i)
        vs.push_back({"v" + std::to_string(i), VertexFlag::imc});
      std::vector<GraphEdge> es;
      double min_slack = kInf;
      for (int i = 0; i < ne; ++i) {
        GraphEdge e;
        e.id = "e" + std::to_string(i);
        e.src = static_cast<int>(detail::uniform01(rng) * nv);
        e.dst = static_cast<int>(detail::uniform01(rng) * nv);
        e.slack = 0.3 + 2.0 * detail::uniform01(rng);
        min_slack = std::min(min_slack, *e.slack);
        es.push_back(e);
      }
      auto g = build_graph(vs, es);
      double budget = std::min(20.0 * min_slack, 9.0);
      int y = static_cast<int>(detail::uniform01(rng) * nv);
      int x = static_cast<int>(detail::uniform01(rng) * nv);
      auto z = enumerate_path_slacks(g, y, x, budget, min_slack, {}, 2000000);
      // oracle: exhaustive concatenation, left-to-right sums
      std::vector<double> want;
      if (y == x) want.push_back(0.0);
      struct Node { int v; double s; };
      std::vector<Node> frontier{{y, 0.0}};
      while (!frontier.empty()) {
        std::vector<Node> next;
        for (const auto& nd : frontier)
          for (const auto& e : g.edges) {
            if (e.src != nd.v) continue;
            double s = nd.s + *e.slack;
            if (s > budget + 1e-12) continue;
            if (e.dst == x) want.push_back(s);
            next.push_back({e.dst, s});
          }
        frontier = std::move(next);
      }
      std::sort(want.begin(), want.end());
      want.erase(std::unique(want.begin(), want.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 want.end());
      if (z.values.size() != want.size())
        return {false, "cardinality mismatch on trial " + std::to_string(trial)};
      for (std::size_t i = 0; i < want.size(); ++i)
        if (std::abs(z.values[i].value - want[i]) > 1e-11)
          return {false, "value mismatch on trial " + std::to_string(trial)};
    }
    return {true, "10 random graphs agree exactly at the dedup resolution"};
  });

  // 7. Subadditivity on shipped-bundle triples
  run(7, "subadditivity", 60.0, [&]() -> std::pair<bool, std::string> {
    auto g = ctx.connector_graph(5, cfg.slack_cap);
    double b1 = 3.2, b2 = 6.4;
    double delta = kInf;
    for (const auto& e : g.edges) delta = std::min(delta, *e.slack);
    int nv = static_cast<int>(g.vertices.size());
    std::map<std::pair<int, int>, TruncatedZSet> zs1, zs2;
    for (int a = 0; a < nv; ++a)
      for (int b = 0; b < nv; ++b) {
        zs1[{a, b}] = enumerate_path_slacks(g, a, b, b1, delta, {}, cfg.witness_cap);
        zs2[{a, b}] = enumerate_path_slacks(g, a, b, b2, delta, {}, cfg.witness_cap);
      }
    std::size_t checked = 0, violations = 0;
    for (int z = 0; z < nv; ++z)
      for (int y = 0; y < nv; ++y)
        for (int x = 0; x < nv; ++x) {
          auto v = check_subadditivity(zs1[{y, z}], zs1[{z, x}], zs2[{y, x}]);
          checked += 1;
          violations += v.size();
        }
    std::ostringstream os;
    os << checked << " triples, " << violations << " violations";
    return {violations == 0, os.str()};
  });

  // 8. Filtration on bundle-derived twist-family graphs
  run(8, "filtration", 120.0, [&]() -> std::pair<bool, std::string> {
    for (int vertex : {0, 1}) {
      auto g = ctx.seed_graph(vertex, 1);
      if (g.edges.empty()) return {false, "no seed edge"};
      double s0 = *g.edges[0].slack;
      double budget = 5.0 * s0 / 0.9 + 0.12;
      double h0 = 4e-4;
      ExpansionOptions opt;
      opt.budget = budget;
      opt.tolerance = h0 / 200.0;
      opt.member_window = 4.0 * h0;
      auto rep = check_filtration(g, 0, 0, budget, h0, s0 / 2.0, 4, std::nullopt, opt,
                                  cfg.witness_cap);
      if (!rep.stabilized) return {false, "h-sweep not stabilized"};
      for (const auto& sweep : rep.sweeps)
        for (const auto& lvl : sweep.levels)
          if (!lvl.match) {
            std::ostringstream os;
            os << "vertex " << vertex << " level " << lvl.level << " at h " << sweep.h
               << ": dH " << lvl.hausdorff;
            return {false, os.str()};
          }
    }
    return {true, "levels 1..4 match across the h-sweep on both vertex graphs"};
  });

  // 9. Depth growth at rate delta-hat
  run(9, "depth-growth", 120.0, [&]() -> std::pair<bool, std::string> {
    double delta_hat = bundle_excursion_delta(ctx.vertices, ctx.tau(), 0.2, 200,
                                              cfg.seed ^ 0x9999);
    std::string gmsg;
    bool gok = registry.check("delta_hat", delta_hat, &gmsg);
    auto g = ctx.seed_graph(0, 1);
    double s0 = *g.edges[0].slack;
    double budget = 5.0 * s0 / 0.9 + 0.12;
    double h0 = 4e-4;
    ExpansionOptions opt;
    opt.budget = budget;
    opt.tolerance = h0 / 200.0;
    opt.member_window = 4.0 * h0;
    auto rep = check_filtration(g, 0, 0, budget, h0, s0 / 2.0, 4, std::nullopt, opt,
                                cfg.witness_cap);
    // level minima from the finest sweep: need min(level i) >= delta_hat * i
    const auto& fine = rep.sweeps.front();
    for (const auto& lvl : fine.levels) {
      if (lvl.derived_size == 0)
        return {false, "level " + std::to_string(lvl.level) + " empty"};
      if (lvl.min_value < delta_hat * lvl.level) {
        std::ostringstream os;
        os << "level " << lvl.level << " min " << lvl.min_value << " below "
           << delta_hat * lvl.level;
        return {false, os.str()};
      }
    }
    std::ostringstream os;
    os << "delta_hat " << delta_hat << ", levels 1..4 nonempty with linear growth";
    if (!gmsg.empty()) os << "; " << gmsg;
    return {gok, os.str()};
  });

  // 10. Ray threshold on the two-vertex imc/leaf example
  run(10, "ray-threshold", 1.0, [&]() -> std::pair<bool, std::string> {
    std::vector<GraphVertex> vs{{"x", VertexFlag::imc}, {"w", VertexFlag::infinite_leaf}};
    std::vector<GraphEdge> es;
    auto mk = [&](const char* id, int s, int d, double v) {
      GraphEdge e;
      e.id = id;
      e.src = s;
      e.dst = d;
      e.slack = v;
      es.push_back(e);
    };
    mk("s1", 0, 0, 1.0);
    mk("s2", 0, 0, 1.3);
    mk("xw", 0, 1, 0.7);
    mk("wx", 1, 0, 0.9);
    auto g = build_graph(vs, es);
    auto res = ray_threshold(g, 0, 0, 6.0, 0.5);
    auto oracle = detail::ray_oracle(g, 0, 0, 6.0);
    if (std::abs(res.rho - 1.6) > 1e-12) return {false, "rho != 1.6"};
    if (std::abs(res.rho - oracle.rho) > 1e-12) return {false, "rho disagrees with oracle"};
    std::vector<double> want{0.0, 1.0, 1.3};
    if (res.assembled.values.size() != want.size() ||
        oracle.imc_values.size() != want.size())
      return {false, "assembled set size mismatch"};
    for (std::size_t i = 0; i < want.size(); ++i) {
      if (std::abs(res.assembled.values[i].value - want[i]) > 1e-12)
        return {false, "assembled set mismatch"};
      if (std::abs(oracle.imc_values[i] - want[i]) > 1e-12)
        return {false, "oracle mismatch"};
    }
    for (const auto& v : res.assembled.values)
      if (v.value >= res.rho) return {false, "value at or above rho"};
    return {true, "rho = 1.6, Z = {0, 1.0, 1.3} u [1.6, inf)"};
  });

  // 11. Census counts and reversal
  run(11, "census", 10.0, [&]() -> std::pair<bool, std::string> {
    for (int nv : {1, 2, 3}) {
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
      auto g = build_graph(vs, es);
      auto rep = census(g, 5.0, 0.8);
      if (rep.class_count != static_cast<std::size_t>(2 * nv + 1))
        return {false, "class count wrong for |V| = " + std::to_string(nv)};
      if (!rep.reversal_ok) return {false, "reversal check failed"};
      if (!rep.membership_reflexive) return {false, "membership not reflexive"};
    }
    return {true, "2|V|+1 classes and reversal agreement for |V| in {1,2,3}"};
  });

  // 12. Chain proximality: rotation lower bound and singleton classes
  run(12, "chainprox-rotation", 60.0, [&]() -> std::pair<bool, std::string> {
    ModelSpec m;
    m.kind = ModelKind::rotation;
    m.alpha = std::sqrt(2.0) - 1.0;
    auto sys = discretize(m, 1000);
    std::mt19937_64 rng(cfg.seed ^ 0xCCCC);
    for (int t = 0; t < 60; ++t) {
      int x = static_cast<int>(rng() % 1000), y = static_cast<int>(rng() % 1000);
      if (x == y) continue;
      auto r = interception_cost(sys, x, y, 500);
      if (r.cost < sys.metric(x, y) - sys.h - 1e-12)
        return {false, "isometry bound violated"};
      if (r.certificate && !replay_certificate(sys, *r.certificate))
        return {false, "certificate replay failed"};
    }
    auto part = classify(sys, cfg.class_threshold, 500, 200, cfg.seed ^ 0xCC00);
    std::ostringstream os;
    os << part.classes.size() << " classes, merge threshold " << part.merge_threshold;
    return {part.classes.size() == 1000 && part.asymmetric_pairs.empty(), os.str()};
  });

  // 13. Chain proximality: doubling collapse and laminar components
  run(13, "chainprox-doubling-laminar", 120.0, [&]() -> std::pair<bool, std::string> {
    ModelSpec m;
    m.kind = ModelKind::doubling;
    auto sys = discretize(m, 1 << 14);
    std::mt19937_64 rng(cfg.seed ^ 0xDDDD);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      int x = static_cast<int>(rng() % sys.size()), y = static_cast<int>(rng() % sys.size());
      auto r = interception_cost(sys, x, y, 20);
      worst = std::max(worst, r.cost);
    }
    if (worst > std::pow(2.0, -9.0))
      return {false, "doubling cost above 2^-9: " + std::to_string(worst)};
    auto dpart = classify(sys, cfg.class_threshold, 20, 50, cfg.seed ^ 0xDD00);
    if (dpart.classes.size() != 1) return {false, "doubling did not collapse to one class"};

    ModelSpec lam;
    lam.kind = ModelKind::laminar;
    lam.laminar = {{48, 0.02, 0.6}, {48, 0.02, 0.6}};
    lam.separation = 0.3;
    auto lsys = discretize(lam, 10);
    auto lpart = classify(lsys, 3.0 * lsys.h, 600, 150, cfg.seed ^ 0xDD11);
    if (lpart.classes.size() != 2) return {false, "laminar classes != 2"};
    if (!lpart.asymmetric_pairs.empty()) return {false, "asymmetric pairs found"};
    for (const auto& cls : lpart.classes) {
      int c = lsys.component[cls.front()];
      for (int i : cls)
        if (lsys.component[i] != c) return {false, "class crosses components"};
    }
    std::ostringstream os;
    os << "doubling worst cost " << worst << "; laminar classes match components";
    return {true, os.str()};
  });

  // 14. (b, eps)-chain recurrence
  run(14, "chain-recurrence", 10.0, [&]() -> std::pair<bool, std::string> {
    ModelSpec m;
    m.kind = ModelKind::rotation;
    m.alpha = 0.25;
    auto rot = discretize(m, 8);
    auto [ok1, chain1] = chain_recurrent(rot, 0, 2.0, 1e-6, 50);
    if (!ok1 || !chain1) return {false, "periodic point not recurrent"};
    for (double j : chain1->jumps)
      if (j > 1e-6) return {false, "periodic chain has nonzero jumps"};

    ModelSpec ab;
    ab.kind = ModelKind::custom;
    ab.custom_positions = {0.0, 1.0, 1.1, 1.2};
    ab.custom_sigma = {1, 2, 3, 3};
    auto abs_sys = discretize(ab, 4);
    auto [bad, none] = chain_recurrent(abs_sys, 0, 1.0, 0.5, 40);
    if (bad) return {false, "absorbing model recurred below the escape gap"};

    ModelSpec r2;
    r2.kind = ModelKind::rotation;
    r2.alpha = std::sqrt(2.0) - 1.0;
    auto rot2 = discretize(r2, 50);
    for (int x : {0, 7, 23}) {
      auto [recur, ch] = chain_recurrent(rot2, x, 3.0, rot2.h * 1.5, 200);
      if (!recur) return {false, "rotation point not recurrent at eps > h"};
    }
    return {true, "periodic true, absorbing false, rotation dense"};
  });

  // 15. McShane extension properties
  run(15, "mcshane", 10.0, [&]() -> std::pair<bool, std::string> {
    std::mt19937_64 rng(cfg.seed ^ 0xFFFF);
    PartialLipschitzFunction<double> f;
    f.metric = [](const double& a, const double& b) { return std::abs(a - b); };
    for (int i = 0; i < 50; ++i) {
      double p = 10.0 * detail::uniform01(rng);
      f.domain.push_back(p);
      f.values.push_back(0.6 * p + 0.1 * std::sin(3.0 * p));
    }
    auto [ok, worst] = check_lipschitz(f);
    if (!ok) return {false, "fixture not 1-Lipschitz"};
    auto at_domain = mcshane_extend(f, f.domain);
    for (std::size_t i = 0; i < f.domain.size(); ++i)
      if (at_domain[i] != f.values[i]) return {false, "extension property broken"};
    std::vector<double> qs;
    for (int i = 0; i < 200; ++i) qs.push_back(12.0 * detail::uniform01(rng) - 1.0);
    auto vals = mcshane_extend(f, qs);
    int pairs = 0;
    for (std::size_t i = 0; i < qs.size() && pairs < 10000; ++i)
      for (std::size_t j = i + 1; j < qs.size() && pairs < 10000; ++j, ++pairs)
        if (std::abs(vals[i] - vals[j]) > std::abs(qs[i] - qs[j]) + 1e-12)
          return {false, "1-Lipschitz bound broken on query pairs"};
    for (int trial = 0; trial < 100; ++trial) {
      double lam = detail::uniform01(rng);
      std::size_t i = static_cast<std::size_t>(detail::uniform01(rng) * qs.size());
      double alt = lam * mcshane_value(f, qs[i]) + (1 - lam) * mcshane_value_lower(f, qs[i]);
      if (alt > vals[i] + 1e-12) return {false, "maximality broken"};
    }
    std::ostringstream os;
    os << pairs << " query pairs within 1e-12, 100 alternative extensions dominated";
    return {true, os.str()};
  });

  // 16. Determinism of the artifact pipeline
  run(16, "determinism", 120.0, [&]() -> std::pair<bool, std::string> {
    namespace fs = std::filesystem;
    std::string d1 = cfg.output_dir + "/verify-run1";
    std::string d2 = cfg.output_dir + "/verify-run2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    write_artifacts(cfg, d1);
    write_artifacts(cfg, d2);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(d1)) {
      ++files;
      auto name = entry.path().filename().string();
      if (read_text_file(d1 + "/" + name) != read_text_file(d2 + "/" + name))
        return {false, "artifact differs: " + name};
    }
    return {files > 0, std::to_string(files) + " artifacts byte-identical across runs"};
  });

  return suite;
}

}  // namespace horolab::acceptance
