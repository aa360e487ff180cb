#include "lockbox/core/config_io.hpp"

#include <cstdlib>
#include <fstream>

#ifndef LOCKBOX_DATA_DIR
#define LOCKBOX_DATA_DIR "data/configs"
#endif

namespace lockbox {

using nlohmann::json;

namespace {

json vec3(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(what + ": expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

json generator_to_json(const GeneratorParams& p) {
  return {{"n_joints", p.n_joints},
          {"dependency_mix",
           {{"one_to_one", p.dependency_mix.one_to_one},
            {"many_to_one", p.dependency_mix.many_to_one},
            {"bistable", p.dependency_mix.bistable}}},
          {"distance_preference", p.distance_preference},
          {"seed", p.seed},
          {"min_solution_steps", p.min_solution_steps},
          {"target", p.target ? json(*p.target) : json(nullptr)}};
}

GeneratorParams generator_from_json(const json& j) {
  GeneratorParams p;
  p.n_joints = required<std::size_t>(j, "n_joints");
  if (j.contains("dependency_mix")) {
    const auto& mix = j["dependency_mix"];
    p.dependency_mix.one_to_one = mix.value("one_to_one", p.dependency_mix.one_to_one);
    p.dependency_mix.many_to_one = mix.value("many_to_one", p.dependency_mix.many_to_one);
    p.dependency_mix.bistable = mix.value("bistable", p.dependency_mix.bistable);
  } else {
    p.dependency_mix = default_mix(p.n_joints);
  }
  p.distance_preference = j.value("distance_preference", 0.0);
  p.seed = j.value("seed", std::uint64_t{0});
  p.min_solution_steps = j.value("min_solution_steps", 1);
  if (j.contains("target") && !j["target"].is_null()) p.target = j["target"].get<std::string>();
  if (j.contains("workspace")) {
    p.workspace.lo = vec3_from(j["workspace"].at("lo"), "workspace.lo");
    p.workspace.hi = vec3_from(j["workspace"].at("hi"), "workspace.hi");
  }
  return p;
}

json to_json(const LockboxSpec& spec) {
  json joints = json::array();
  for (const auto& joint : spec.joints) {
    json entry = {{"id", joint.id},
                  {"kind", to_string(joint.kind)},
                  {"position", vec3(joint.handle_position)},
                  {"initial_state", joint.initial_state}};
    if (joint.mechanism) {
      entry["mechanism"] = {{"axis", vec3(joint.mechanism->axis)},
                            {"range", joint.mechanism->range},
                            {"radius", joint.mechanism->radius}};
    }
    joints.push_back(std::move(entry));
  }
  json edges = json::array();
  for (const auto& edge : spec.edges) {
    edges.push_back(
        {{"locker", edge.locker}, {"locked", edge.locked}, {"required_state", edge.required_state}});
  }
  return {{"name", spec.name},
          {"joints", std::move(joints)},
          {"edges", std::move(edges)},
          {"target", spec.target},
          {"goal_state", spec.goal_state}};
}

LockboxSpec spec_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("lockbox config must be a JSON object");
  LockboxSpec spec;
  spec.name = doc.value("name", std::string{});
  for (const auto& entry : required<json>(doc, "joints")) {
    JointSpec joint;
    joint.id = required<std::string>(entry, "id");
    try {
      joint.kind = joint_kind_from_string(required<std::string>(entry, "kind"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    joint.handle_position = vec3_from(required<json>(entry, "position"), joint.id + ".position");
    joint.initial_state = entry.value("initial_state", 0);
    if (entry.contains("mechanism")) {
      const auto& m = entry["mechanism"];
      MechanismGeometry geometry;
      geometry.axis = vec3_from(required<json>(m, "axis"), joint.id + ".mechanism.axis");
      geometry.range = required<double>(m, "range");
      geometry.radius = m.value("radius", geometry.radius);
      joint.mechanism = geometry;
    }
    spec.joints.push_back(std::move(joint));
  }
  for (const auto& entry : doc.value("edges", json::array())) {
    spec.edges.push_back({required<std::string>(entry, "locker"),
                          required<std::string>(entry, "locked"),
                          entry.value("required_state", 1)});
  }
  spec.target = required<std::string>(doc, "target");
  if (doc.contains("goal_state")) {
    spec.goal_state = doc["goal_state"].get<int>();
  } else {
    int initial = 0;
    for (const auto& joint : spec.joints) {
      if (joint.id == spec.target) initial = joint.initial_state;
    }
    spec.goal_state = 1 - initial;
  }
  return spec;
}

json to_json(const LockboxConfig& config) {
  json doc = to_json(config.spec);
  if (!config.notes.empty()) doc["notes"] = config.notes;
  if (!config.scales.empty()) {
    json scales = json::object();
    for (const auto& [n, variant] : config.scales) {
      scales[std::to_string(n)] = {{"joints", variant.joints}, {"target", variant.target}};
    }
    doc["scales"] = std::move(scales);
  }
  if (config.generated_by) doc["generated_by"] = generator_to_json(*config.generated_by);
  return doc;
}

LockboxConfig config_from_json(const json& doc) {
  LockboxConfig config;
  config.spec = spec_from_json(doc);
  config.notes = doc.value("notes", std::string{});
  if (doc.contains("scales")) {
    for (const auto& [key, value] : doc["scales"].items()) {
      ScaleVariant variant;
      variant.joints = required<std::vector<std::string>>(value, "joints");
      variant.target = required<std::string>(value, "target");
      config.scales[static_cast<std::size_t>(std::stoul(key))] = std::move(variant);
    }
  }
  if (doc.contains("generated_by")) config.generated_by = generator_from_json(doc["generated_by"]);
  return config;
}

LockboxConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

void save_config(const LockboxConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config " + path.string());
  out << to_json(config).dump(2) << '\n';
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("LOCKBOX_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return LOCKBOX_DATA_DIR;
}

LockboxConfig load_reference(const std::string& name_or_path) {
  const std::filesystem::path candidate = data_dir() / (name_or_path + ".json");
  if (std::filesystem::exists(candidate)) return load_config(candidate);
  if (std::filesystem::exists(name_or_path)) return load_config(name_or_path);
  throw ConfigError("unknown reference config '" + name_or_path + "'");
}

LockboxSpec spec_for_scale(const LockboxConfig& config, std::size_t scale) {
  if (auto it = config.scales.find(scale); it != config.scales.end()) {
    return restrict_to(config.spec, it->second.joints, it->second.target);
  }
  if (scale == config.spec.size()) return config.spec;
  throw ConfigError("config '" + config.spec.name + "' has no variant for scale " +
                    std::to_string(scale));
}

}  // namespace lockbox
