#include "causelab/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "causelab/nullfn.hpp"

namespace causelab::config {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  raise(ErrorCode::ConfigError, field + ": " + why);
}

const json& need(const json& j, const std::string& field, const char* key) {
  if (!j.is_object()) bad(field, "must be an object");
  const auto it = j.find(key);
  if (it == j.end()) bad(field + "." + key, "is missing");
  return *it;
}

void check_keys(const json& j, const std::string& field, std::set<std::string> allowed) {
  if (!j.is_object()) bad(field, "must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) bad(field + "." + key, "is not a recognized key");
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "must be a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) bad(field, "must be an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& field) {
  if (!j.is_string()) bad(field, "must be a string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& field) {
  if (!j.is_array()) bad(field, "must be an array");
  return j;
}

std::vector<std::string> string_list(const json& j, const std::string& field) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < as_array(j, field).size(); ++i)
    out.push_back(as_string(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> number_list(const json& j, const std::string& field) {
  std::vector<double> out;
  for (std::size_t i = 0; i < as_array(j, field).size(); ++i)
    out.push_back(as_number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

ScmSpec spec_from_json(const json& j) {
  check_keys(j, "scm", {"mechanism", "nodes", "edges"});
  ScmSpec spec;
  const std::string mech = as_string(need(j, "scm", "mechanism"), "scm.mechanism");
  if (mech == "linear_gaussian")
    spec.mechanism = Mechanism::LinearGaussian;
  else if (mech == "tabular_discrete")
    spec.mechanism = Mechanism::TabularDiscrete;
  else
    bad("scm.mechanism", "unknown mechanism '" + mech + "'");

  const json& nodes = as_array(need(j, "scm", "nodes"), "scm.nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string field = "scm.nodes[" + std::to_string(i) + "]";
    check_keys(nodes[i], field, {"name", "role", "noise_sd", "intercept", "support", "cpt"});
    Node node;
    node.name = as_string(need(nodes[i], field, "name"), field + ".name");
    const std::string role = as_string(need(nodes[i], field, "role"), field + ".role");
    const auto parsed = role_from_string(role);
    if (!parsed) bad(field + ".role", "unknown role '" + role + "'");
    node.role = *parsed;
    if (nodes[i].contains("noise_sd"))
      node.noise_sd = as_number(nodes[i]["noise_sd"], field + ".noise_sd");
    if (nodes[i].contains("intercept"))
      node.intercept = as_number(nodes[i]["intercept"], field + ".intercept");
    if (nodes[i].contains("support"))
      node.support = as_int(nodes[i]["support"], field + ".support");
    if (nodes[i].contains("cpt")) node.cpt = number_list(nodes[i]["cpt"], field + ".cpt");
    spec.nodes.push_back(std::move(node));
  }

  const json& edges = as_array(need(j, "scm", "edges"), "scm.edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string field = "scm.edges[" + std::to_string(i) + "]";
    check_keys(edges[i], field, {"from", "to", "coeff"});
    Edge edge;
    edge.from = as_string(need(edges[i], field, "from"), field + ".from");
    edge.to = as_string(need(edges[i], field, "to"), field + ".to");
    if (edges[i].contains("coeff")) edge.coeff = as_number(edges[i]["coeff"], field + ".coeff");
    spec.edges.push_back(std::move(edge));
  }
  return spec;
}

json spec_to_json(const ScmSpec& spec) {
  json j;
  j["mechanism"] =
      spec.mechanism == Mechanism::LinearGaussian ? "linear_gaussian" : "tabular_discrete";
  j["nodes"] = json::array();
  for (const auto& node : spec.nodes) {
    json n{{"name", node.name}, {"role", to_string(node.role)}};
    if (spec.mechanism == Mechanism::LinearGaussian) {
      n["noise_sd"] = node.noise_sd;
      n["intercept"] = node.intercept;
    } else {
      n["support"] = node.support;
      n["cpt"] = node.cpt;
    }
    j["nodes"].push_back(std::move(n));
  }
  j["edges"] = json::array();
  for (const auto& edge : spec.edges) {
    json e{{"from", edge.from}, {"to", edge.to}};
    if (spec.mechanism == Mechanism::LinearGaussian) e["coeff"] = edge.coeff;
    j["edges"].push_back(std::move(e));
  }
  return j;
}

ScmSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    raise(ErrorCode::ConfigError, "'" + path + "' is not valid JSON: " + e.what());
  }
  return spec_from_json(j);
}

void save_spec(const ScmSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write '" + path + "'");
  out << spec_to_json(spec).dump(2) << '\n';
}

namespace {

InterventionQuery query_from_json(const json& j, const std::string& field, const ScmSpec& spec) {
  check_keys(j, field, {"set", "response"});
  InterventionQuery q;
  const json& set = need(j, field, "set");
  if (!set.is_object() || set.empty()) bad(field + ".set", "must be a non-empty object");
  for (const auto& [name, value] : set.items())
    q.set_to.emplace_back(name, as_number(value, field + ".set." + name));
  if (j.contains("response"))
    q.response = as_string(j["response"], field + ".response");
  else if (spec.outcome_index() >= 0)
    q.response = spec.nodes[static_cast<std::size_t>(spec.outcome_index())].name;
  return q;
}

NullFunction null_from_json(const json& j, const std::string& field, const ScmSpec& spec) {
  if (j.contains("cause")) {
    check_keys(j, field, {"cause"});
    const std::string name = as_string(j["cause"], field + ".cause");
    const Node* node = spec.find(name);
    if (!node) bad(field + ".cause", "unknown node '" + name + "'");
    return identity_null(name, node->support);
  }
  check_keys(j, field, {"domain", "weights", "offset"});
  NullFunction f;
  f.kind = NullFunction::Kind::Linear;
  f.domain = string_list(need(j, field, "domain"), field + ".domain");
  const auto w = number_list(need(j, field, "weights"), field + ".weights");
  if (w.size() != f.domain.size()) bad(field + ".weights", "length must match domain");
  f.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  if (j.contains("offset")) f.offset = as_number(j["offset"], field + ".offset");
  f.description = "linear over " + std::to_string(f.domain.size()) + " null causes";
  return f;
}

}  // namespace

ExperimentConfig config_from_json(const json& j, const std::string& base_dir) {
  check_keys(j, "config",
             {"scm", "scm_file", "queries", "methods", "grid", "k", "partition", "output"});
  ExperimentConfig config;
  const bool inline_scm = j.contains("scm");
  const bool file_scm = j.contains("scm_file");
  if (inline_scm == file_scm) bad("scm", "exactly one of scm and scm_file is required");
  if (inline_scm) {
    config.scm = spec_from_json(j["scm"]);
  } else {
    std::filesystem::path p = as_string(j["scm_file"], "scm_file");
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    config.scm = load_spec(p.string());
  }

  const json& queries = as_array(need(j, "config", "queries"), "queries");
  for (std::size_t i = 0; i < queries.size(); ++i)
    config.queries.push_back(
        query_from_json(queries[i], "queries[" + std::to_string(i) + "]", config.scm));

  config.methods = string_list(need(j, "config", "methods"), "methods");

  const json& grid = need(j, "config", "grid");
  check_keys(grid, "grid", {"sizes", "seeds"});
  for (double v : number_list(need(grid, "grid", "sizes"), "grid.sizes")) {
    if (v < 1.0) bad("grid.sizes", "sample sizes must be positive");
    config.grid.sizes.push_back(static_cast<std::size_t>(v));
  }
  for (double v : number_list(need(grid, "grid", "seeds"), "grid.seeds")) {
    if (v < 0.0) bad("grid.seeds", "seeds must be non-negative");
    config.grid.seeds.push_back(static_cast<std::uint64_t>(v));
  }

  if (j.contains("k")) config.k = as_int(j["k"], "k");
  if (j.contains("partition")) {
    const json& p = j["partition"];
    check_keys(p, "partition", {"intervened", "adjusted", "null_causes", "f"});
    CausePartition part;
    part.intervened = string_list(need(p, "partition", "intervened"), "partition.intervened");
    part.adjusted = string_list(need(p, "partition", "adjusted"), "partition.adjusted");
    part.null_causes = string_list(need(p, "partition", "null_causes"), "partition.null_causes");
    const json& f = as_array(need(p, "partition", "f"), "partition.f");
    for (std::size_t i = 0; i < f.size(); ++i)
      part.f.push_back(
          null_from_json(f[i], "partition.f[" + std::to_string(i) + "]", config.scm));
    config.partition = std::move(part);
  }
  if (j.contains("output")) config.output = as_string(j["output"], "output");
  return config;
}

json config_to_json(const ExperimentConfig& config) {
  json j;
  j["scm"] = spec_to_json(config.scm);
  j["queries"] = json::array();
  for (const auto& q : config.queries) {
    json set = json::object();
    for (const auto& [name, value] : q.set_to) set[name] = value;
    j["queries"].push_back(json{{"set", std::move(set)}, {"response", q.response}});
  }
  j["methods"] = config.methods;
  j["grid"] = {{"sizes", config.grid.sizes}, {"seeds", config.grid.seeds}};
  j["k"] = config.k;
  if (config.partition) {
    json p{{"intervened", config.partition->intervened},
           {"adjusted", config.partition->adjusted},
           {"null_causes", config.partition->null_causes}};
    p["f"] = json::array();
    for (const auto& comp : config.partition->f) {
      if (comp.kind == NullFunction::Kind::Linear) {
        json fj{{"domain", comp.domain}, {"offset", comp.offset}};
        std::vector<double> w(comp.weights.data(), comp.weights.data() + comp.weights.size());
        fj["weights"] = w;
        p["f"].push_back(std::move(fj));
        continue;
      }
      // The file schema covers linear functions and single-cause identities;
      // anything else has no faithful encoding.
      bool identity = comp.kind == NullFunction::Kind::Table && comp.domain.size() == 1 &&
                      comp.cards.size() == 1 &&
                      comp.table.size() == static_cast<std::size_t>(comp.cards[0]);
      for (std::size_t v = 0; identity && v < comp.table.size(); ++v)
        identity = comp.table[v] == static_cast<double>(v);
      if (!identity)
        raise(ErrorCode::ConfigError,
              "partition.f: only linear and single-cause identity functions serialize");
      p["f"].push_back(json{{"cause", comp.domain[0]}});
    }
    j["partition"] = std::move(p);
  }
  j["output"] = config.output;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    raise(ErrorCode::ConfigError, "'" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, std::filesystem::path(path).parent_path().string());
}

}  // namespace causelab::config
