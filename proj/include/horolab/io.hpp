#pragma once

// Serialization and experiment plumbing: deterministic JSON emission
// (sorted keys, fixed 17-significant-digit floats), the schemas for cover
// specs and slack graphs, a small TOML-subset config reader with CLI
// overrides, config hashing, and the golden-value registry.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "horolab/chain_prox.hpp"
#include "horolab/cover.hpp"
#include "horolab/moebius.hpp"
#include "horolab/slack.hpp"
#include "horolab/slack_graph.hpp"

namespace horolab {

using Json = nlohmann::json;  // std::map keys: iteration is sorted

inline const char* kToolVersion = "horolab 1.0.0";

inline std::string format_double(double x) {
  char buf[40];
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Deterministic emitter: nlohmann's own dump chooses shortest-round-trip
// floats; artifacts instead pin %.17g so the byte stream is part of the
// contract.
inline void emit_json(std::ostream& os, const Json& j, int indent, int depth) {
  std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  std::string pad1(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) { os << "{}"; return; }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad1 << Json(it.key()).dump() << ": ";
        emit_json(os, it.value(), indent, depth + 1);
      }
      os << "\n" << pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) { os << "[]"; return; }
      os << "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << ",\n";
        first = false;
        os << pad1;
        emit_json(os, v, indent, depth + 1);
      }
      os << "\n" << pad << "]";
      return;
    }
    case Json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
      return;
  }
}

inline std::string emit_json(const Json& j, int indent = 2) {
  std::ostringstream os;
  emit_json(os, j, indent, 0);
  os << "\n";
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::validation_error, "cannot write " + path);
  f << content;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::validation_error, "cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fnv1a_hex(const std::string& s) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(s)));
  return buf;
}

// ---- matrices, lines, tangents ----

inline Json matrix_to_json(const MoebiusElement& m) {
  return Json::array({m.a, m.b, m.c, m.d});
}

inline MoebiusElement matrix_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4)
    throw Error(Errc::validation_error, "matrix: expected a row-major 4-tuple");
  return MoebiusElement::normalize(j[0].get<double>(), j[1].get<double>(),
                                   j[2].get<double>(), j[3].get<double>());
}

inline Json boundary_to_json(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

inline double boundary_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw Error(Errc::validation_error, "boundary point: bad string");
  }
  return j.get<double>();
}

inline Json line_to_json(const GeodesicLine& L) {
  return Json{{"xi_minus", boundary_to_json(L.xi_minus)},
              {"xi_plus", boundary_to_json(L.xi_plus)}};
}

// ---- cover spec ----

inline FuchsianCoverSpec cover_spec_from_json(const Json& j) {
  FuchsianCoverSpec spec;
  spec.c = j.at("c").get<double>();
  for (const auto& g : j.at("generators")) {
    spec.generator_names.push_back(g.at("name").get<std::string>());
    spec.generators.push_back(matrix_from_json(g.at("matrix")));
  }
  spec.phi.resize(spec.generators.size(), 0);
  for (auto it = j.at("phi").begin(); it != j.at("phi").end(); ++it)
    spec.phi[spec.generator_index(it.key())] = it.value().get<int>();
  if (j.contains("relations"))
    for (const auto& r : j.at("relations")) {
      std::vector<std::string> toks;
      for (const auto& t : r) toks.push_back(t.get<std::string>());
      spec.relations.push_back(word_from_tokens(spec, toks));
    }
  if (j.contains("vertices"))
    for (const auto& v : j.at("vertices")) {
      std::vector<std::string> toks;
      for (const auto& t : v.at("word")) toks.push_back(t.get<std::string>());
      spec.vertex_words.push_back(
          {v.at("name").get<std::string>(), word_from_tokens(spec, toks)});
    }
  return spec;
}

inline Json word_to_json(const FuchsianCoverSpec& spec, const Word& w) {
  Json arr = Json::array();
  for (int s : w) {
    std::string tok = spec.generator_names[std::abs(s) - 1];
    if (s < 0) tok += "^-1";
    arr.push_back(tok);
  }
  return arr;
}

inline Json cover_spec_to_json(const FuchsianCoverSpec& spec) {
  Json j;
  j["schema"] = "horolab/fuchsian-cover-spec/v1";
  j["c"] = spec.c;
  Json gens = Json::array();
  for (std::size_t i = 0; i < spec.generators.size(); ++i)
    gens.push_back(Json{{"name", spec.generator_names[i]},
                        {"matrix", matrix_to_json(spec.generators[i])}});
  j["generators"] = gens;
  Json phi;
  for (std::size_t i = 0; i < spec.generator_names.size(); ++i)
    phi[spec.generator_names[i]] = spec.phi[i];
  j["phi"] = phi;
  Json rels = Json::array();
  for (const auto& r : spec.relations) rels.push_back(word_to_json(spec, r));
  j["relations"] = rels;
  Json verts = Json::array();
  for (const auto& [name, w] : spec.vertex_words)
    verts.push_back(Json{{"name", name}, {"word", word_to_json(spec, w)}});
  j["vertices"] = verts;
  return j;
}

// ---- slack graph ----

inline SlackGraph graph_from_json(const Json& j) {
  std::vector<GraphVertex> vs;
  std::vector<double> rates;
  for (const auto& v : j.at("vertices")) {
    GraphVertex gv;
    gv.id = v.at("id").get<std::string>();
    std::string flag = v.value("flag", "imc");
    gv.flag = flag == "infinite_leaf" ? VertexFlag::infinite_leaf : VertexFlag::imc;
    vs.push_back(gv);
    rates.push_back(v.value("rate", 0.0));
  }
  std::vector<GraphEdge> es;
  int k = 0;
  auto index_of = [&](const std::string& id) {
    for (std::size_t i = 0; i < vs.size(); ++i)
      if (vs[i].id == id) return static_cast<int>(i);
    throw Error(Errc::dangling_edge, "graph json: unknown vertex " + id);
  };
  for (const auto& e : j.at("edges")) {
    GraphEdge ge;
    ge.id = e.value("id", "e" + std::to_string(k));
    ++k;
    ge.src = index_of(e.at("src").get<std::string>());
    ge.dst = index_of(e.at("dst").get<std::string>());
    if (e.contains("slack")) ge.slack = e.at("slack").get<double>();
    if (e.contains("family")) {
      FamilySpec f;
      f.base = e.at("family").at("base").get<double>();
      f.coeff = e.at("family").at("correction_params").get<double>();
      f.rate = e.at("family").at("c").get<double>();
      f.k0 = e.at("family").value("k0", 0);
      ge.family = f;
    }
    if (e.contains("matrix")) ge.matrix = matrix_from_json(e.at("matrix"));
    es.push_back(ge);
  }
  return build_graph(vs, es, rates);
}

inline Json graph_to_json(const SlackGraph& g) {
  Json j;
  j["schema"] = "horolab/slack-graph/v1";
  Json vs = Json::array();
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    Json v{{"id", g.vertices[i].id},
           {"flag", g.vertices[i].flag == VertexFlag::infinite_leaf ? "infinite_leaf"
                                                                    : "imc"}};
    if (g.vertex_rate[i] > 0.0) v["rate"] = g.vertex_rate[i];
    vs.push_back(v);
  }
  j["vertices"] = vs;
  Json es = Json::array();
  for (const auto& e : g.edges) {
    Json je{{"id", e.id},
            {"src", g.vertices[e.src].id},
            {"dst", g.vertices[e.dst].id}};
    if (e.slack) je["slack"] = *e.slack;
    if (e.family)
      je["family"] = Json{{"base", e.family->base},
                          {"correction_params", e.family->coeff},
                          {"c", e.family->rate},
                          {"k0", e.family->k0}};
    if (e.matrix) je["matrix"] = matrix_to_json(*e.matrix);
    es.push_back(je);
  }
  j["edges"] = es;
  return j;
}

inline Json zset_to_json(const TruncatedZSet& z) {
  Json j;
  j["schema"] = "horolab/zset/v1";
  j["source"] = z.source;
  j["target"] = z.target;
  j["budget"] = z.budget;
  j["tolerance"] = z.tolerance;
  Json vals = Json::array();
  for (const auto& v : z.values) {
    Json witness = Json::array();
    for (int ei : v.witness) witness.push_back(z.edge_table[ei].id);
    int max_len = 63 - std::countl_zero(v.length_mask | 1ull);
    vals.push_back(Json{{"slack", v.value},
                        {"witness", witness},
                        {"max_path_length", max_len}});
  }
  j["values"] = vals;
  if (z.ray_start) j["ray_start"] = *z.ray_start;
  return j;
}

inline std::string zset_to_csv(const TruncatedZSet& z) {
  std::ostringstream os;
  os << "slack,path_length\n";
  for (const auto& v : z.values)
    os << format_double(v.value) << "," << v.witness.size() << "\n";
  return os.str();
}

inline std::string twist_family_to_csv(const TwistFamily& fam) {
  std::ostringstream os;
  os << "k,slack,residual\n";
  for (const auto& [k, s] : fam.slacks) {
    double res = fam.forward_limit ? s - *fam.forward_limit : 0.0;
    os << k << "," << format_double(s) << "," << format_double(res) << "\n";
  }
  return os.str();
}

inline Json twist_family_to_json(const TwistFamily& fam) {
  Json j;
  j["schema"] = "horolab/twist-family/v1";
  j["edge_id"] = fam.edge_id;
  j["u_param"] = fam.u_param;
  j["n_param"] = fam.n_param;
  j["rate"] = fam.rate;
  Json slacks;
  for (const auto& [k, s] : fam.slacks) slacks[std::to_string(k)] = s;
  j["slacks"] = slacks;
  if (fam.forward_limit) j["forward_limit"] = *fam.forward_limit;
  if (fam.backward_limit) j["backward_limit"] = *fam.backward_limit;
  j["detection_threshold"] = fam.detection_threshold;
  return j;
}

inline Json comparison_to_json(const ComparisonReport& r) {
  return Json{{"schema", "horolab/chain-comparison/v1"},
              {"straight_slack", r.straight_slack},
              {"chain_slack_sum", r.chain_slack_sum},
              {"difference", r.difference},
              {"epsilon", r.epsilon},
              {"hausdorff", r.hausdorff},
              {"ratio", r.ratio},
              {"hausdorff_ratio", r.hausdorff_ratio}};
}

inline Json depth_report_to_json(const DepthReport& rep) {
  Json j;
  j["schema"] = "horolab/depth-report/v1";
  j["margin"] = rep.margin;
  j["stabilized"] = rep.stabilized;
  j["estimated_depth"] = rep.estimated_depth;
  Json sweeps = Json::array();
  for (const auto& s : rep.sweeps) {
    Json levels = Json::array();
    for (const auto& l : s.levels)
      levels.push_back(Json{{"level", l.level},
                            {"h", l.h},
                            {"derived_size", l.derived_size},
                            {"hom_size", l.hom_size},
                            {"unresolved", l.unresolved},
                            {"hausdorff", l.hausdorff},
                            {"min_value", l.min_value},
                            {"match", l.match},
                            {"vacuous", l.vacuous}});
    sweeps.push_back(Json{{"h", s.h}, {"levels", levels}});
  }
  j["sweeps"] = sweeps;
  return j;
}

inline Json census_to_json(const CensusReport& rep) {
  Json j;
  j["schema"] = "horolab/census/v1";
  j["class_count"] = rep.class_count;
  Json cls = Json::array();
  for (const auto& c : rep.classes)
    cls.push_back(Json{{"end", c.end}, {"vertex", c.vertex}});
  j["classes"] = cls;
  j["reversal_ok"] = rep.reversal_ok;
  j["reversal_discrepancies"] = rep.reversal_discrepancies;
  j["membership_reflexive"] = rep.membership_reflexive;
  return j;
}

inline Json partition_to_json(const ProximalityPartition& p) {
  Json j;
  j["schema"] = "horolab/proximality-partition/v1";
  j["eps_class"] = p.eps_class;
  j["merge_threshold"] = p.merge_threshold;
  j["horizon"] = p.horizon;
  Json cls = Json::array();
  for (const auto& c : p.classes) cls.push_back(c);
  j["classes"] = cls;
  j["class_count"] = p.classes.size();
  Json asym = Json::array();
  for (auto [a, b] : p.asymmetric_pairs) asym.push_back(Json::array({a, b}));
  j["asymmetric_pairs"] = asym;
  j["max_within_cost"] = p.max_within_cost;
  j["min_cross_cost"] = std::isinf(p.min_cross_cost) ? Json("inf") : Json(p.min_cross_cost);
  return j;
}

inline Json certificate_to_json(const InterceptionCertificate& c) {
  Json chain = Json::array();
  for (const auto& st : c.chain)
    chain.push_back(Json{{"index", st.index}, {"jump_cost", st.jump_cost}});
  return Json{{"schema", "horolab/interception-certificate/v1"},
              {"start", c.start},
              {"target", c.target},
              {"horizon", c.horizon},
              {"chain", chain},
              {"total_cost", c.total_cost}};
}

// ---- experiment config ----

struct ExperimentConfig {
  std::uint64_t seed = 42;
  double tol_algebraic = 1e-9;
  double tol_geometric = 1e-6;
  double class_threshold = 0.1;
  double budget = 6.0;
  int horizon = 1000;
  int max_len = 8;
  double slack_cap = 6.0;
  std::uint64_t word_cap = 4000000;
  std::uint64_t witness_cap = 200000;
  std::string bundle_path = "examples/genus2-octagon.json";
  std::string output_dir = "out";

  Json to_json() const {
    return Json{{"seed", seed},
                {"tol_algebraic", tol_algebraic},
                {"tol_geometric", tol_geometric},
                {"class_threshold", class_threshold},
                {"budget", budget},
                {"horizon", horizon},
                {"max_len", max_len},
                {"slack_cap", slack_cap},
                {"word_cap", word_cap},
                {"witness_cap", witness_cap},
                {"bundle_path", bundle_path}};
  }

  std::string hash() const { return fnv1a_hex(emit_json(to_json(), 0)); }
};

// TOML subset: comments, [sections], key = value with strings, integers,
// floats and booleans.  Keys flatten to "section.key".
inline std::map<std::string, std::string> parse_toml(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line, section;
  auto trim = [](std::string s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::validation_error, "config: bad line '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!val.empty() && val.front() == '"' && val.back() == '"')
      val = val.substr(1, val.size() - 2);
    out[section.empty() ? key : section + "." + key] = val;
  }
  return out;
}

inline ExperimentConfig config_from_toml(const std::string& text) {
  auto kv = parse_toml(text);
  ExperimentConfig cfg;
  auto get = [&](const std::string& k, auto& target) {
    auto it = kv.find(k);
    if (it == kv.end()) return;
    std::istringstream is(it->second);
    is >> target;
  };
  get("seed", cfg.seed);
  get("tolerances.algebraic", cfg.tol_algebraic);
  get("tolerances.geometric", cfg.tol_geometric);
  get("tolerances.class_threshold", cfg.class_threshold);
  get("budgets.budget", cfg.budget);
  get("budgets.horizon", cfg.horizon);
  get("budgets.max_len", cfg.max_len);
  get("budgets.slack_cap", cfg.slack_cap);
  get("budgets.word_cap", cfg.word_cap);
  get("budgets.witness_cap", cfg.witness_cap);
  auto it = kv.find("paths.bundle");
  if (it != kv.end()) cfg.bundle_path = it->second;
  it = kv.find("paths.output_dir");
  if (it != kv.end()) cfg.output_dir = it->second;
  return cfg;
}

// ---- golden registry ----

struct GoldenEntry {
  double value = 0.0;
  double tolerance = 0.0;
};

struct GoldenRegistry {
  std::map<std::string, GoldenEntry> entries;
  std::string config_hash;

  static GoldenRegistry load(const std::string& path) {
    GoldenRegistry reg;
    Json j = Json::parse(read_text_file(path));
    reg.config_hash = j.value("config_hash", "");
    for (auto it = j.at("entries").begin(); it != j.at("entries").end(); ++it)
      reg.entries[it.key()] = GoldenEntry{it.value().at("value").get<double>(),
                                          it.value().at("tolerance").get<double>()};
    return reg;
  }

  bool check(const std::string& name, double value, std::string* msg = nullptr) const {
    auto it = entries.find(name);
    if (it == entries.end()) {
      if (msg) *msg = "no golden entry named " + name;
      return false;
    }
    bool ok = std::abs(value - it->second.value) <= it->second.tolerance;
    if (!ok && msg)
      *msg = name + ": got " + format_double(value) + ", pinned " +
             format_double(it->second.value) + " +- " +
             format_double(it->second.tolerance);
    return ok;
  }
};

// Artifact envelope: every artifact embeds the config hash and tool version.
inline Json artifact(const ExperimentConfig& cfg, Json payload) {
  Json j;
  j["tool"] = kToolVersion;
  j["config_hash"] = cfg.hash();
  j["config"] = cfg.to_json();
  j["payload"] = std::move(payload);
  return j;
}

}  // namespace horolab
