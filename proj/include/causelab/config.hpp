#pragma once

#include <string>

#include "json.hpp"

#include "causelab/harness.hpp"
#include "causelab/scm.hpp"

namespace causelab::config {

// Declarative world description:
//   { "mechanism": "linear_gaussian" | "tabular_discrete",
//     "nodes": [ { "name", "role", "noise_sd"?, "intercept"?, "support"?, "cpt"? } ],
//     "edges": [ { "from", "to", "coeff"? } ] }
// Roles use the snake_case names from role_from_string. Unknown keys, missing
// required fields, or type mismatches raise ConfigError naming the field.
ScmSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ScmSpec& spec);

ScmSpec load_spec(const std::string& path);
void save_spec(const ScmSpec& spec, const std::string& path);

// Experiment file: the world (inline under "scm" or a path under "scm_file",
// resolved against the config file's directory) plus
//   "queries": [ { "set": { name: value, ... }, "response"? } ]
//   "methods": [ ... ], "grid": { "sizes": [...], "seeds": [...] },
//   "k"?, "partition"? { "intervened", "adjusted", "null_causes",
//                        "f": [ { "cause" } | { "domain", "weights", "offset"? } ] },
//   "output"?
ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& base_dir);
nlohmann::json config_to_json(const ExperimentConfig& config);

ExperimentConfig load_config(const std::string& path);

}  // namespace causelab::config
