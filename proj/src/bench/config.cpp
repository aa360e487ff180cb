#include <cstdlib>
#include <fstream>
#include <set>

#include "lockbox/bench/experiment.hpp"
#include "lockbox/core/seeding.hpp"

namespace lockbox::bench {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

SpecEntry spec_entry(const json& j) {
  if (j.is_string()) return {j.get<std::string>(), 0, std::nullopt};
  if (!j.is_object()) throw ConfigError("spec entries are names or objects");
  reject_unknown(j, {"name", "expect_weight_sign", "min_attention_gain"}, "spec entry");
  SpecEntry e;
  if (!j.contains("name")) throw ConfigError("spec entry without 'name'");
  read(j, "name", e.name);
  read(j, "expect_weight_sign", e.expect_weight_sign);
  if (e.expect_weight_sign < -1 || e.expect_weight_sign > 1) {
    throw ConfigError("expect_weight_sign must be -1, 0 or 1");
  }
  if (j.contains("min_attention_gain")) {
    double gain = 0.0;
    read(j, "min_attention_gain", gain);
    e.min_attention_gain = gain;
  }
  return e;
}

void read_dqn(const json& j, learning::DQNConfig& d) {
  reject_unknown(j,
                 {"episodes", "gamma", "learning_rate", "epsilon_start", "epsilon_end",
                  "epsilon_decay_fraction", "replay_capacity", "batch_size", "target_sync",
                  "episode_steps", "hidden"},
                 "dqn");
  read(j, "episodes", d.episodes);
  read(j, "gamma", d.gamma);
  read(j, "learning_rate", d.learning_rate);
  read(j, "epsilon_start", d.epsilon_start);
  read(j, "epsilon_end", d.epsilon_end);
  read(j, "epsilon_decay_fraction", d.epsilon_decay_fraction);
  read(j, "replay_capacity", d.replay_capacity);
  read(j, "batch_size", d.batch_size);
  read(j, "target_sync", d.target_sync);
  read(j, "episode_steps", d.episode_steps);
  read(j, "hidden", d.hidden);
  if (d.episodes < 1 || d.batch_size == 0 || d.replay_capacity < d.batch_size ||
      d.target_sync < 1 || d.episode_steps < 1 || d.hidden == 0 || !(d.learning_rate > 0.0) ||
      d.gamma < 0.0 || d.gamma > 1.0) {
    throw ConfigError("invalid dqn settings");
  }
}

}  // namespace

ExperimentConfig experiment_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("experiment config must be a JSON object");
  reject_unknown(doc,
                 {"id", "kind", "specs", "generator", "scales", "trials", "step_cap", "variants",
                  "seed", "output_dir", "jobs", "attention", "dqn", "checks", "notes"},
                 "experiment config");
  ExperimentConfig c;
  read(doc, "id", c.id);
  if (c.id.empty() || c.id.find_first_of("/\\,") != std::string::npos) {
    throw ConfigError("experiment id must be a plain non-empty name");
  }
  if (doc.contains("kind")) c.kind = kind_from_string(doc["kind"].get<std::string>());
  if (doc.contains("specs")) {
    if (!doc["specs"].is_array() || doc["specs"].empty()) {
      throw ConfigError("'specs' must be a non-empty list");
    }
    c.specs.clear();
    for (const auto& s : doc["specs"]) c.specs.push_back(spec_entry(s));
  }
  if (doc.contains("generator")) c.generator = generator_from_json(doc["generator"]);
  read(doc, "scales", c.scales);
  read(doc, "trials", c.trials);
  read(doc, "step_cap", c.step_cap);
  if (doc.contains("variants")) {
    c.variants.clear();
    for (const auto& v : doc["variants"]) c.variants.push_back(variant_from_string(v.get<std::string>()));
    if (c.variants.empty()) throw ConfigError("'variants' must not be empty");
  }
  read(doc, "seed", c.seed);
  read(doc, "output_dir", c.output_dir);
  read(doc, "jobs", c.jobs);
  if (doc.contains("attention")) {
    const auto& a = doc["attention"];
    reject_unknown(a, {"ridge_lambda", "anchor"}, "attention");
    read(a, "ridge_lambda", c.ridge_lambda);
    std::string anchor = "last_attempted";
    read(a, "anchor", anchor);
    if (anchor == "last_attempted") {
      c.attention_anchor = planner::AttentionAnchor::last_attempted;
    } else if (anchor == "last_moved") {
      c.attention_anchor = planner::AttentionAnchor::last_moved;
    } else {
      throw ConfigError("unknown attention anchor '" + anchor + "'");
    }
  }
  if (doc.contains("dqn")) read_dqn(doc["dqn"], c.dqn);
  if (doc.contains("checks")) {
    const auto& k = doc["checks"];
    reject_unknown(k, {"dqn_max_final_success", "demo_min_solved"}, "checks");
    read(k, "dqn_max_final_success", c.dqn_max_final_success);
    read(k, "demo_min_solved", c.demo_min_solved);
  }
  if (c.trials < 1) throw ConfigError("trials must be at least 1");
  if (c.step_cap < 1) throw ConfigError("step_cap must be at least 1");
  if (c.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (!(c.ridge_lambda > 0.0)) throw ConfigError("ridge_lambda must be positive");
  for (auto s : c.scales) {
    if (s < 1 || s > 20) throw ConfigError("scales must lie in 1..20");
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  json specs = json::array();
  for (const auto& s : c.specs) {
    json e{{"name", s.name}, {"expect_weight_sign", s.expect_weight_sign}};
    if (s.min_attention_gain) e["min_attention_gain"] = *s.min_attention_gain;
    specs.push_back(e);
  }
  json variants = json::array();
  for (auto v : c.variants) variants.push_back(to_string(v));
  json doc{{"id", c.id},
           {"kind", to_string(c.kind)},
           {"specs", specs},
           {"scales", c.scales},
           {"trials", c.trials},
           {"step_cap", c.step_cap},
           {"variants", variants},
           {"seed", c.seed},
           {"attention",
            {{"ridge_lambda", c.ridge_lambda},
             {"anchor", c.attention_anchor == planner::AttentionAnchor::last_moved
                            ? "last_moved"
                            : "last_attempted"}}},
           {"dqn",
            {{"episodes", c.dqn.episodes},
             {"gamma", c.dqn.gamma},
             {"learning_rate", c.dqn.learning_rate},
             {"epsilon_start", c.dqn.epsilon_start},
             {"epsilon_end", c.dqn.epsilon_end},
             {"epsilon_decay_fraction", c.dqn.epsilon_decay_fraction},
             {"replay_capacity", c.dqn.replay_capacity},
             {"batch_size", c.dqn.batch_size},
             {"target_sync", c.dqn.target_sync},
             {"episode_steps", c.dqn.episode_steps},
             {"hidden", c.dqn.hidden}}},
           {"checks",
            {{"dqn_max_final_success", c.dqn_max_final_success},
             {"demo_min_solved", c.demo_min_solved}}}};
  if (c.generator) doc["generator"] = generator_to_json(*c.generator);
  // output_dir and jobs are run settings, not part of the experiment's identity
  return doc;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open experiment config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return experiment_from_json(doc);
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("LOCKBOX_BENCH_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return "bench-out";
}

std::filesystem::path experiment_dir(const ExperimentConfig& config) {
  const std::filesystem::path root =
      config.output_dir.empty() ? default_output_dir() : std::filesystem::path(config.output_dir);
  return root / config.id;
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t cell, int trial) {
  return derive_seed(master, cell, static_cast<std::uint64_t>(trial));
}

}  // namespace lockbox::bench
