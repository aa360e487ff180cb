#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lockbox/core/generator.hpp"
#include "lockbox/core/lockbox.hpp"

namespace lockbox {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A named sub-lockbox of a reference config (joints + target).
struct ScaleVariant {
  std::vector<std::string> joints;
  std::string target;
};

// A lockbox config file: the LockboxSpec plus optional per-scale variants and the
// generator parameters that produced it, if any.
struct LockboxConfig {
  LockboxSpec spec;
  std::map<std::size_t, ScaleVariant> scales;
  std::optional<GeneratorParams> generated_by;
  std::string notes;
};

nlohmann::json to_json(const LockboxSpec& spec);
LockboxSpec spec_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const LockboxConfig& config);

// Generator parameters as stored under "generated_by"; base_joints are not
// serialized (a config's own joints play that role).
nlohmann::json generator_to_json(const GeneratorParams& params);
GeneratorParams generator_from_json(const nlohmann::json& doc);
LockboxConfig config_from_json(const nlohmann::json& doc);

LockboxConfig load_config(const std::filesystem::path& path);
void save_config(const LockboxConfig& config, const std::filesystem::path& path);

// Directory holding the shipped reference configs. LOCKBOX_DATA_DIR
// overrides the compiled-in location.
std::filesystem::path data_dir();

// "physical-5", "sim-7-ID1", "sim-7-ID2", or a path to a JSON file.
LockboxConfig load_reference(const std::string& name_or_path);

// Spec for a given scale: the config's variant when declared, the full spec
// when the scale equals its joint count.
LockboxSpec spec_for_scale(const LockboxConfig& config, std::size_t scale);

}  // namespace lockbox
