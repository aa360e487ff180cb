#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "lockbox/bench/experiment.hpp"
#include "lockbox/core/generator.hpp"
#include "lockbox/planner/environment.hpp"
#include "lockbox/sim/mechanism.hpp"

namespace lockbox::bench {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Cell {
  std::string config;
  std::size_t scale = 0;
  std::uint64_t id = 0;
  const SpecEntry* entry = nullptr;
  LockboxSpec spec;
};

std::vector<Cell> cells_of(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  if (config.generator) {
    auto spec = generate_random(*config.generator);
    for (auto s : config.scales) {
      if (s != spec.size()) throw ConfigError("a generated lockbox only has its own scale");
    }
    cells.push_back({spec.name, spec.size(), spec.size(), nullptr, std::move(spec)});
    return cells;
  }
  for (std::size_t i = 0; i < config.specs.size(); ++i) {
    const auto reference = load_reference(config.specs[i].name);
    std::vector<std::size_t> scales = config.scales;
    if (scales.empty()) scales.push_back(reference.spec.size());
    for (auto s : scales) {
      cells.push_back({reference.spec.name, s, 1000 * i + s, &config.specs[i],
                       spec_for_scale(reference, s)});
    }
  }
  return cells;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.imbue(std::locale::classic());
  return out;
}

void write_common(const ExperimentConfig& config, ExperimentReport& report,
                  const std::vector<std::string>& extra_files) {
  std::filesystem::create_directories(report.directory);
  {
    auto out = open_out(report.directory / "trials.csv");
    write_trials_csv(out, report.rows);
  }
  {
    auto out = open_out(report.directory / "summary.csv");
    write_summary_csv(out, report.cells);
  }
  {
    auto out = open_out(report.directory / "timings.csv");
    write_timings_csv(out, report.rows);
  }
  {
    auto out = open_out(report.directory / "steps.svg");
    write_steps_svg(out, report.rows, config.id + ": manipulation steps per trial");
  }
  nlohmann::json files = {"trials.csv", "summary.csv", "timings.csv", "steps.svg"};
  for (const auto& f : extra_files) files.push_back(f);
  auto out = open_out(report.directory / "manifest.json");
  out << nlohmann::json{{"schema_version", kSchemaVersion},
                        {"experiment", to_json(config)},
                        {"files", files}}
             .dump(2)
      << '\n';
}

// Summary recomputed from the CSV on disk must agree with the in-memory one.
Check consistency_check(const ExperimentReport& report) {
  std::ifstream in(report.directory / "trials.csv");
  const auto cells = summarize(read_trials_csv(in));
  bool same = cells.size() == report.cells.size();
  for (std::size_t i = 0; same && i < cells.size(); ++i) {
    const auto& a = cells[i];
    const auto& b = report.cells[i];
    same = a.config == b.config && a.scale == b.scale && a.variant == b.variant &&
           a.solved == b.solved && a.trials == b.trials &&
           std::abs(a.mean_steps - b.mean_steps) < 1e-9 && a.median == b.median &&
           a.mean_weights.has_value() == b.mean_weights.has_value() &&
           (!a.mean_weights || (*a.mean_weights - *b.mean_weights).cwiseAbs().maxCoeff() < 1e-9);
  }
  return {"summary matches trials.csv", same, std::to_string(cells.size()) + " cells"};
}

Check bounds_check(const ExperimentConfig& config, const std::vector<ResultRow>& rows) {
  int bad = 0;
  for (const auto& r : rows) {
    if (r.steps > config.step_cap || (r.solved && r.steps < r.min_steps)) ++bad;
  }
  return {"steps within cap and above the optimum", bad == 0,
          std::to_string(bad) + " offending rows"};
}

const CellSummary* find_cell(const std::vector<CellSummary>& cells, const std::string& config,
                             std::size_t scale, Variant variant) {
  for (const auto& c : cells) {
    if (c.config == config && c.scale == scale && c.variant == variant) return &c;
  }
  return nullptr;
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.setf(std::ios::fixed);
  out.precision(precision);
  out << v;
  return out.str();
}

struct TrainedNets {
  std::map<std::size_t, learning::QNetwork> nets;
  std::map<std::size_t, learning::DQNTrainStats> stats;
  std::map<std::size_t, double> seconds;
};

TrainedNets train_nets(const ExperimentConfig& config, const std::vector<std::size_t>& scales) {
  TrainedNets out;
  std::vector<std::optional<learning::QNetwork>> nets(scales.size());
  std::vector<learning::DQNTrainStats> stats(scales.size());
  std::vector<double> seconds(scales.size());
  parallel_for(scales.size(), config.jobs, [&](std::size_t i) {
    auto d = config.dqn;
    d.seed = trial_seed(config.seed, 1000000 + scales[i], 0);
    const auto start = Clock::now();
    nets[i] = learning::dqn_train(d, scales[i], learning::generated_specs(scales[i]), &stats[i]);
    seconds[i] = ms_since(start) / 1000.0;
  });
  for (std::size_t i = 0; i < scales.size(); ++i) {
    out.nets.emplace(scales[i], std::move(*nets[i]));
    out.stats[scales[i]] = stats[i];
    out.seconds[scales[i]] = seconds[i];
  }
  return out;
}

ExperimentReport run_matrix(const ExperimentConfig& config, const std::vector<Cell>& cells,
                            const TrainedNets* nets) {
  struct Job {
    const Cell* cell;
    Variant variant;
    int trial;
  };
  std::vector<Job> jobs;
  for (const auto& cell : cells) {
    for (auto v : config.variants) {
      for (int t = 0; t < config.trials; ++t) jobs.push_back({&cell, v, t});
    }
  }
  ExperimentReport report;
  report.directory = experiment_dir(config);
  report.rows.resize(jobs.size());
  parallel_for(jobs.size(), config.jobs, [&](std::size_t i) {
    const auto& job = jobs[i];
    const learning::QNetwork* net = nullptr;
    if (job.variant == Variant::dqn) net = &nets->nets.at(job.cell->scale);
    report.rows[i] = run_trial(config, job.cell->spec, job.cell->config, job.cell->scale,
                               job.variant, job.trial,
                               trial_seed(config.seed, job.cell->id, job.trial), net);
  });
  report.cells = summarize(report.rows);
  return report;
}

std::vector<std::size_t> scales_of(const std::vector<Cell>& cells) {
  std::vector<std::size_t> out;
  for (const auto& c : cells) {
    if (std::find(out.begin(), out.end(), c.scale) == out.end()) out.push_back(c.scale);
  }
  return out;
}

bool wants(const ExperimentConfig& config, Variant v) {
  return std::find(config.variants.begin(), config.variants.end(), v) != config.variants.end();
}

void add_sweep_checks(const ExperimentConfig& config, const std::vector<Cell>& cells,
                      ExperimentReport& report) {
  for (const auto& c : report.cells) {
    if (c.variant == Variant::dqn) continue;
    report.checks.push_back({to_string(c.variant) + " solves every trial of " + c.config +
                                 " n=" + std::to_string(c.scale),
                             c.solved == c.trials,
                             std::to_string(c.solved) + "/" + std::to_string(c.trials)});
  }
  if (wants(config, Variant::base) && wants(config, Variant::attention)) {
    for (const auto& cell : cells) {
      const auto* base = find_cell(report.cells, cell.config, cell.scale, Variant::base);
      const auto* att = find_cell(report.cells, cell.config, cell.scale, Variant::attention);
      report.checks.push_back({"attention mean steps <= base on " + cell.config +
                                   " n=" + std::to_string(cell.scale),
                               att->mean_steps <= base->mean_steps,
                               fmt(att->mean_steps) + " vs " + fmt(base->mean_steps)});
    }
  }
}

std::string dqn_file(std::size_t scale) { return "dqn-scale-" + std::to_string(scale) + ".json"; }

void write_nets(const ExperimentReport& report, const TrainedNets& trained,
                std::vector<std::string>& files) {
  std::filesystem::create_directories(report.directory / "nets");
  for (const auto& [scale, net] : trained.nets) {
    auto out = open_out(report.directory / "nets" / dqn_file(scale));
    out << learning::to_json(net).dump() << '\n';
    files.push_back("nets/" + dqn_file(scale));
  }
  {
    auto out = open_out(report.directory / "training.csv");
    out << "scale,episodes,solved_episodes,environment_steps,gradient_steps,last_loss\n";
    for (const auto& [scale, s] : trained.stats) {
      out << scale << ',' << s.episodes << ',' << s.solved_episodes << ',' << s.environment_steps
          << ',' << s.gradient_steps << ',' << std::setprecision(17) << s.last_loss << '\n';
    }
  }
  auto out = open_out(report.directory / "training_timings.csv");
  out << "scale,seconds\n";
  for (const auto& [scale, sec] : trained.seconds) out << scale << ',' << sec << '\n';
  files.insert(files.end(), {"training.csv", "training_timings.csv"});
}

// Forwards to a kinematic environment and keeps per-attempt bookkeeping.
class RecordingEnvironment : public planner::Environment {
 public:
  explicit RecordingEnvironment(planner::KinematicEnvironment& inner)
      : inner_(inner), moved_before_(inner.joints().size(), false) {}

  const std::vector<std::string>& joints() const override { return inner_.joints(); }
  std::size_t target() const override { return inner_.target(); }
  bool solved() const override { return inner_.solved(); }
  planner::JointFeatures features(std::size_t j) const override { return inner_.features(j); }
  int steps() const override { return inner_.steps(); }
  const LockboxState& state() const override { return inner_.state(); }

  bool try_manipulate(std::size_t joint) override {
    const int probes = inner_.stats().probes;
    const bool revisit = moved_before_[joint];
    const bool moved = inner_.try_manipulate(joint);
    const int used = inner_.stats().probes - probes;
    if (revisit) {
      ++revisits_;
      if (used != 0) ++wiggled_revisits_;
    } else if (used != 6) {
      ++odd_first_visits_;
    }
    if (moved) moved_before_[joint] = true;
    segments_.push_back({joint, inner_.trace().size()});
    return moved;
  }

  int revisits() const { return revisits_; }
  int wiggled_revisits() const { return wiggled_revisits_; }
  int odd_first_visits() const { return odd_first_visits_; }
  // (joint, end of its samples in the trace) per attempt
  const std::vector<std::pair<std::size_t, std::size_t>>& segments() const { return segments_; }

 private:
  planner::KinematicEnvironment& inner_;
  std::vector<bool> moved_before_;
  int revisits_ = 0;
  int wiggled_revisits_ = 0;
  int odd_first_visits_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> segments_;
};

struct DemoRun {
  ResultRow row;
  int probes = 0;
  int cache_hits = 0;
  int revisits = 0;
  int wiggled_revisits = 0;
  int odd_first_visits = 0;
  int ticks = 0;
  int samples_over_bound = 0;
  double worst_ratio = 0.0;  // max |F_i| / bound_i
};

void write_force_svg(std::ostream& out, const std::vector<sim::TraceSample>& trace,
                     const std::vector<std::pair<std::size_t, std::size_t>>& segments,
                     const std::vector<std::string>& ids, const sim::ControlParams& params) {
  const double width = 900, height = 320, left = 60, right = 20, top = 30, bottom = 40;
  const double limit = params.wrench_limit.tail<3>().maxCoeff();
  double top_force = limit * 1.5;
  for (const auto& s : trace) top_force = std::max(top_force, s.wrench.tail<3>().cwiseAbs().maxCoeff());
  const double n = std::max<double>(1.0, static_cast<double>(trace.size()) - 1.0);
  auto x = [&](double i) { return left + (width - left - right) * i / n; };
  auto y = [&](double f) { return top + (height - top - bottom) * (1.0 - f / top_force); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2
      << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">largest force component per "
         "control cycle</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << y(limit) << "\" x2=\"" << width - right
      << "\" y2=\"" << y(limit) << "\" stroke=\"red\" stroke-dasharray=\"4 3\"/>\n"
      << "<text x=\"" << left - 6 << "\" y=\"" << y(limit) + 4 << "\" text-anchor=\"end\">"
      << limit << " N</text>\n";
  std::size_t begin = 0;
  for (const auto& [joint, end] : segments) {
    out << "<line x1=\"" << x(static_cast<double>(begin)) << "\" y1=\"" << top << "\" x2=\""
        << x(static_cast<double>(begin)) << "\" y2=\"" << height - bottom
        << "\" stroke=\"#ccc\"/>\n<text x=\"" << x(static_cast<double>(begin)) + 2 << "\" y=\""
        << height - bottom + 14 << "\">" << ids[joint] << "</text>\n";
    begin = end;
  }
  out << "<polyline fill=\"none\" stroke=\"#3182bd\" points=\"";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << x(static_cast<double>(i)) << ',' << y(trace[i].wrench.tail<3>().cwiseAbs().maxCoeff())
        << ' ';
  }
  out << "\"/>\n</svg>\n";
}

}  // namespace

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

ResultRow run_trial(const ExperimentConfig& config, const LockboxSpec& spec,
                    const std::string& config_name, std::size_t scale, Variant variant, int trial,
                    std::uint64_t seed, const learning::QNetwork* net) {
  const auto start = Clock::now();
  const auto labeled = randomize_labels(spec, seed);
  planner::SymbolicEnvironment env(labeled);
  planner::TrialResult result;
  if (variant == Variant::dqn) {
    if (net == nullptr) throw std::invalid_argument("dqn trial without a network");
    result = learning::dqn_solve(*net, env, config.step_cap);
  } else {
    planner::SolverConfig solver;
    solver.max_steps = config.step_cap;
    solver.use_attention = variant == Variant::attention;
    solver.combination_order = solver.use_attention ? planner::CombinationOrder::size_then_score
                                                    : planner::CombinationOrder::size_then_lex;
    solver.ridge_lambda = config.ridge_lambda;
    solver.attention_anchor = config.attention_anchor;
    solver.seed = seed;
    result = planner::heuristic_solve(env, solver);
  }
  ResultRow row;
  row.experiment = config.id;
  row.config = config_name;
  row.scale = scale;
  row.variant = variant;
  row.trial = trial;
  row.seed = seed;
  row.solved = result.solved;
  row.steps = result.steps;
  row.min_steps = min_remaining_steps(labeled, initial_state(labeled)).value_or(-1);
  row.weights = result.final_weights;
  row.wall_time_ms = ms_since(start);
  return row;
}

ExperimentReport run_sweep(const ExperimentConfig& config) {
  const auto cells = cells_of(config);
  std::optional<TrainedNets> trained;
  if (wants(config, Variant::dqn)) trained = train_nets(config, scales_of(cells));
  auto report = run_matrix(config, cells, trained ? &*trained : nullptr);
  std::vector<std::string> files;
  if (trained) {
    std::filesystem::create_directories(report.directory);
    write_nets(report, *trained, files);
  }
  write_common(config, report, files);
  add_sweep_checks(config, cells, report);
  report.checks.push_back(bounds_check(config, report.rows));
  report.checks.push_back(consistency_check(report));
  return report;
}

ExperimentReport run_dependency_study(const ExperimentConfig& config) {
  if (config.generator) throw ConfigError("the dependency study compares reference configs");
  const auto cells = cells_of(config);
  auto report = run_matrix(config, cells, nullptr);
  std::filesystem::create_directories(report.directory);
  {
    auto out = open_out(report.directory / "weights.csv");
    out << "config,scale,variant,feature,mean_weight\n";
    const char* names[5] = {"dx", "dy", "dz", "dk", "bias"};
    for (const auto& c : report.cells) {
      if (!c.mean_weights) continue;
      for (int i = 0; i < 5; ++i) {
        out << c.config << ',' << c.scale << ',' << to_string(c.variant) << ',' << names[i] << ','
            << std::setprecision(17) << (*c.mean_weights)[i] << '\n';
      }
    }
  }
  write_common(config, report, {"weights.csv"});
  for (const auto& cell : cells) {
    const auto* base = find_cell(report.cells, cell.config, cell.scale, Variant::base);
    const auto* att = find_cell(report.cells, cell.config, cell.scale, Variant::attention);
    if (cell.entry->min_attention_gain) {
      const bool have = base != nullptr && att != nullptr;
      const double gain = have ? 1.0 - att->mean_steps / base->mean_steps : 0.0;
      report.checks.push_back(
          {"attention gain on " + cell.config + " >= " + fmt(100 * *cell.entry->min_attention_gain, 0) + "%",
           have && gain >= *cell.entry->min_attention_gain,
           have ? fmt(att->mean_steps, 2) + " vs " + fmt(base->mean_steps, 2) + " steps, gain " +
                      fmt(100 * gain, 1) + "%"
                : "needs base and base+attention"});
    }
    if (cell.entry->expect_weight_sign != 0) {
      const bool have = att != nullptr && att->mean_weights.has_value();
      const learning::FeatureVec w = have ? *att->mean_weights : learning::FeatureVec::Zero();
      const int sign = cell.entry->expect_weight_sign;
      const bool ok = have && w[0] * sign > 0 && w[1] * sign > 0 && w[2] * sign > 0;
      report.checks.push_back(
          {std::string("distance weights ") + (sign < 0 ? "negative" : "positive") + " on " +
               cell.config,
           ok,
           have ? "mean (dx, dy, dz, dk, bias) = (" + fmt(w[0], 4) + ", " + fmt(w[1], 4) + ", " +
                      fmt(w[2], 4) + ", " + fmt(w[3], 4) + ", " + fmt(w[4], 4) + ")"
                : "no attention weights"});
    }
  }
  report.checks.push_back(bounds_check(config, report.rows));
  report.checks.push_back(consistency_check(report));
  return report;
}

ExperimentReport run_integrated_demo(const ExperimentConfig& config) {
  if (config.generator) throw ConfigError("the demo needs a config with mechanism geometry");
  const auto cells = cells_of(config);
  const Cell& cell = cells.front();
  const Variant variant = config.variants.front();
  if (variant == Variant::dqn) throw ConfigError("the demo runs the heuristic solver");
  const sim::ControlParams params;
  const sim::Vector6d bound =
      params.wrench_limit + sim::default_stiffness().cwiseProduct(params.twist_limit) * params.dt;

  ExperimentReport report;
  report.directory = experiment_dir(config);
  std::filesystem::create_directories(report.directory / "traces");
  std::vector<DemoRun> runs(static_cast<std::size_t>(config.trials));
  std::vector<std::string> files{"demo_runs.csv", "forces.svg"};
  std::mutex svg_mutex;
  parallel_for(runs.size(), config.jobs, [&](std::size_t i) {
    const auto start = Clock::now();
    const int trial = static_cast<int>(i);
    const auto seed = trial_seed(config.seed, cell.id, trial);
    const auto labeled = randomize_labels(cell.spec, seed);
    planner::KinematicEnvironment kinematic(labeled, params, seed);
    kinematic.record_trace(true);
    RecordingEnvironment env(kinematic);
    planner::SolverConfig solver;
    solver.max_steps = config.step_cap;
    solver.use_attention = variant == Variant::attention;
    solver.ridge_lambda = config.ridge_lambda;
    solver.attention_anchor = config.attention_anchor;
    solver.seed = seed;
    const auto result = planner::heuristic_solve(env, solver);

    DemoRun& run = runs[i];
    run.row = {config.id, cell.config, cell.scale, variant, trial, seed, result.solved,
               result.steps, min_remaining_steps(labeled, initial_state(labeled)).value_or(-1),
               0.0, result.final_weights};
    run.probes = kinematic.stats().probes;
    run.cache_hits = kinematic.stats().cache_hits;
    run.revisits = env.revisits();
    run.wiggled_revisits = env.wiggled_revisits();
    run.odd_first_visits = env.odd_first_visits();
    run.ticks = kinematic.stats().ticks;
    for (const auto& s : kinematic.trace()) {
      for (int k = 0; k < 6; ++k) {
        const double ratio = std::abs(s.wrench[k]) / bound[k];
        run.worst_ratio = std::max(run.worst_ratio, ratio);
        if (std::abs(s.wrench[k]) > bound[k] + 1e-9) {
          ++run.samples_over_bound;
          break;
        }
      }
    }
    std::ostringstream name;
    name << "run-" << std::setw(3) << std::setfill('0') << trial << ".csv";
    auto out = open_out(report.directory / "traces" / name.str());
    out << "attempt,joint,t,x,y,z,fx,fy,fz,tx,ty,tz\n" << std::setprecision(10);
    std::size_t begin = 0;
    const auto& trace = kinematic.trace();
    const auto& segs = env.segments();
    for (std::size_t a = 0; a < segs.size(); ++a) {
      for (std::size_t k = begin; k < segs[a].second; ++k) {
        const auto& s = trace[k];
        // + 0.0 folds negative zeros
        out << a + 1 << ',' << labeled.joints[segs[a].first].id << ',' << s.t << ','
            << s.position.x() + 0.0 << ',' << s.position.y() + 0.0 << ','
            << s.position.z() + 0.0 << ',' << s.wrench[3] + 0.0 << ',' << s.wrench[4] + 0.0
            << ',' << s.wrench[5] + 0.0 << ',' << s.wrench[0] + 0.0 << ',' << s.wrench[1] + 0.0
            << ',' << s.wrench[2] + 0.0 << '\n';
      }
      begin = segs[a].second;
    }
    if (trial == 0) {
      const std::lock_guard<std::mutex> lock(svg_mutex);
      std::vector<std::string> ids;
      for (const auto& j : labeled.joints) ids.push_back(j.id);
      auto svg = open_out(report.directory / "forces.svg");
      write_force_svg(svg, trace, segs, ids, params);
    }
    run.row.wall_time_ms = ms_since(start);
  });
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::ostringstream name;
    name << "traces/run-" << std::setw(3) << std::setfill('0') << i << ".csv";
    files.push_back(name.str());
  }

  int solved = 0, wiggled = 0, odd = 0, over = 0, hits = 0, revisits = 0;
  double worst = 0.0;
  {
    auto out = open_out(report.directory / "demo_runs.csv");
    out << "run,seed,solved,steps,probes,cache_hits,revisits,wiggled_revisits,ticks,"
           "worst_force_ratio\n";
    for (const auto& r : runs) {
      report.rows.push_back(r.row);
      solved += r.row.solved ? 1 : 0;
      wiggled += r.wiggled_revisits;
      odd += r.odd_first_visits;
      over += r.samples_over_bound;
      hits += r.cache_hits;
      revisits += r.revisits;
      worst = std::max(worst, r.worst_ratio);
      out << r.row.trial << ',' << r.row.seed << ',' << (r.row.solved ? 1 : 0) << ','
          << r.row.steps << ',' << r.probes << ',' << r.cache_hits << ',' << r.revisits << ','
          << r.wiggled_revisits << ',' << r.ticks << ',' << std::setprecision(10)
          << r.worst_ratio << '\n';
    }
  }
  report.cells = summarize(report.rows);
  write_common(config, report, files);
  report.checks.push_back({"kinematic lockbox solved in >= " +
                               std::to_string(config.demo_min_solved) + " runs",
                           solved >= config.demo_min_solved,
                           std::to_string(solved) + "/" + std::to_string(runs.size())});
  report.checks.push_back({"revisited joints skip the wiggle", wiggled == 0 && odd == 0 && hits == revisits,
                           std::to_string(revisits) + " revisits, " + std::to_string(hits) +
                               " cache hits, " + std::to_string(wiggled) + " wiggled"});
  report.checks.push_back({"forces within limit plus one-step overshoot", over == 0,
                           "worst |F|/bound = " + fmt(worst, 4)});
  report.checks.push_back(consistency_check(report));
  return report;
}

ExperimentReport run_dqn_pipeline(const ExperimentConfig& config) {
  if (!wants(config, Variant::dqn)) throw ConfigError("the dqn pipeline needs the dqn variant");
  auto report = run_sweep(config);
  std::vector<const CellSummary*> dqn;
  for (const auto& c : report.cells) {
    if (c.variant == Variant::dqn) dqn.push_back(&c);
  }
  std::stable_sort(dqn.begin(), dqn.end(),
                   [](const CellSummary* a, const CellSummary* b) { return a->scale < b->scale; });
  bool monotone = true;
  std::string rates;
  for (std::size_t i = 0; i < dqn.size(); ++i) {
    if (i > 0 && dqn[i]->success_rate > dqn[i - 1]->success_rate) monotone = false;
    rates += (i ? ", " : "") + std::string("n=") + std::to_string(dqn[i]->scale) + ": " +
             fmt(100 * dqn[i]->success_rate, 1) + "%";
  }
  report.checks.push_back({"dqn success non-increasing with scale", monotone, rates});
  if (!dqn.empty()) {
    const auto* last = dqn.back();
    report.checks.push_back({"dqn success at n=" + std::to_string(last->scale) + " below " +
                                 fmt(100 * config.dqn_max_final_success, 0) + "%",
                             last->success_rate < config.dqn_max_final_success,
                             fmt(100 * last->success_rate, 1) + "%"});
    if (dqn.size() > 1) {
      report.checks.push_back({"dqn success declines from n=" + std::to_string(dqn.front()->scale) +
                                   " to n=" + std::to_string(last->scale),
                               last->success_rate < dqn.front()->success_rate, rates});
    }
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::sweep: return run_sweep(config);
    case ExperimentKind::deps: return run_dependency_study(config);
    case ExperimentKind::demo: return run_integrated_demo(config);
    case ExperimentKind::dqn: return run_dqn_pipeline(config);
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace lockbox::bench
