#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lockbox/core/config_io.hpp"
#include "lockbox/learning/attention.hpp"
#include "lockbox/learning/dqn.hpp"
#include "lockbox/planner/heuristic.hpp"

namespace lockbox::bench {

inline constexpr int kSchemaVersion = 1;

enum class Variant { base, attention, dqn };
enum class ExperimentKind { sweep, deps, demo, dqn };

// "base", "base+attention", "dqn"
std::string to_string(Variant variant);
Variant variant_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);
ExperimentKind kind_from_string(const std::string& name);

// A lockbox source plus what the dependency study expects of it.
struct SpecEntry {
  std::string name;            // reference config name or path
  int expect_weight_sign = 0;  // -1, +1, or 0 for no expectation
  std::optional<double> min_attention_gain;
};

struct ExperimentConfig {
  std::string id = "experiment";
  ExperimentKind kind = ExperimentKind::sweep;
  std::vector<SpecEntry> specs{SpecEntry{"sim-7-ID1", 0, std::nullopt}};
  // Replaces `specs` with one generated lockbox when present.
  std::optional<GeneratorParams> generator;
  std::vector<std::size_t> scales;  // empty: full size of each spec
  int trials = 1000;
  int step_cap = 1000;
  std::vector<Variant> variants{Variant::base, Variant::attention};
  std::uint64_t seed = 0;
  std::string output_dir;  // empty: default_output_dir()
  int jobs = 1;
  double ridge_lambda = 1.0;
  planner::AttentionAnchor attention_anchor = planner::AttentionAnchor::last_attempted;
  learning::DQNConfig dqn;
  double dqn_max_final_success = 0.2;  // dqn check at the largest scale
  int demo_min_solved = 9;
};

// Throws ConfigError on unknown keys, bad values or violated invariants.
ExperimentConfig experiment_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig load_experiment(const std::filesystem::path& path);

// LOCKBOX_BENCH_OUT when set, otherwise "bench-out".
std::filesystem::path default_output_dir();
// <output_dir>/<id>
std::filesystem::path experiment_dir(const ExperimentConfig& config);

struct ResultRow {
  std::string experiment;
  std::string config;
  std::size_t scale = 0;
  Variant variant = Variant::base;
  int trial = 0;
  std::uint64_t seed = 0;
  bool solved = false;
  int steps = 0;
  int min_steps = 0;  // shortest solution of the trial's lockbox
  double wall_time_ms = 0.0;
  std::optional<learning::FeatureVec> weights;
};

struct CellSummary {
  std::string config;
  std::size_t scale = 0;
  Variant variant = Variant::base;
  int trials = 0;
  int solved = 0;
  double success_rate = 0.0;
  double mean_steps = 0.0;
  double min = 0, q25 = 0, median = 0, q75 = 0, max = 0;  // steps
  std::optional<learning::FeatureVec> mean_weights;
};

// Cells in first-appearance order of (config, scale, variant).
std::vector<CellSummary> summarize(const std::vector<ResultRow>& rows);

// Per-trial CSV; wall-clock time is left out so that reruns are byte-identical.
void write_trials_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_trials_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells);
void write_timings_csv(std::ostream& out, const std::vector<ResultRow>& rows);
// Box plot of the step distribution of every cell.
void write_steps_svg(std::ostream& out, const std::vector<ResultRow>& rows,
                     const std::string& title);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  std::filesystem::path directory;
  std::vector<ResultRow> rows;
  std::vector<CellSummary> cells;
  std::vector<Check> checks;
  bool passed() const;
};

// Seed of one trial: derive_seed(master, cell, trial) with
// cell = 1000 * spec index + scale, so every variant of a cell sees the same
// label permutations.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t cell, int trial);

// One heuristic or DQN trial on a label-randomized copy of `spec`.
ResultRow run_trial(const ExperimentConfig& config, const LockboxSpec& spec,
                    const std::string& config_name, std::size_t scale, Variant variant,
                    int trial, std::uint64_t seed, const learning::QNetwork* net = nullptr);

// Calls fn(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

// Each runner writes its files under experiment_dir(config) and fills in the
// checks; none of them throws on a failed check.
ExperimentReport run_sweep(const ExperimentConfig& config);
ExperimentReport run_dependency_study(const ExperimentConfig& config);
ExperimentReport run_integrated_demo(const ExperimentConfig& config);
ExperimentReport run_dqn_pipeline(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config);

// Mean final attention weights of the attention rows of one config.
std::optional<learning::FeatureVec> mean_weights(const std::vector<ResultRow>& rows,
                                                 const std::string& config, Variant variant);

}  // namespace lockbox::bench
