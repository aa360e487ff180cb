#include "lockbox/planner/heuristic.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <ostream>
#include <stdexcept>

namespace lockbox::planner {

std::vector<Combination> enumerate_combinations(const std::vector<std::size_t>& free,
                                                const std::vector<std::uint8_t>& current,
                                                const std::vector<double>* scores) {
  if (current.size() != free.size()) {
    throw std::invalid_argument("current assignment does not match the free joints");
  }
  if (free.size() > 20) throw std::length_error("too many free joints to enumerate");
  std::vector<Combination> out;
  std::vector<double> mean;
  const std::uint32_t count = 1U << free.size();
  std::uint32_t now = 0;
  for (std::size_t i = 0; i < free.size(); ++i) now |= static_cast<std::uint32_t>(current[i] & 1U) << i;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    if (mask == now) continue;
    Combination c;
    double total = 0.0;
    for (std::size_t i = 0; i < free.size(); ++i) {
      c.bits.push_back(static_cast<std::uint8_t>((mask >> i) & 1U));
      if (c.bits[i] != current[i]) {
        c.flips.push_back(i);
        if (scores != nullptr) total += (*scores)[free[i]];
      }
    }
    mean.push_back(total / static_cast<double>(c.flips.size()));
    out.push_back(std::move(c));
  }
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (out[a].flips.size() != out[b].flips.size()) return out[a].flips.size() < out[b].flips.size();
    if (mean[a] != mean[b]) return mean[a] > mean[b];
    return out[a].flips < out[b].flips;
  });
  std::vector<Combination> sorted;
  sorted.reserve(out.size());
  for (auto i : order) sorted.push_back(std::move(out[i]));
  return sorted;
}

std::vector<std::size_t> order_locked(const std::vector<std::size_t>& locked,
                                      const std::vector<double>* scores) {
  auto out = locked;
  if (scores != nullptr) {
    std::stable_sort(out.begin(), out.end(),
                     [&](std::size_t a, std::size_t b) { return (*scores)[a] > (*scores)[b]; });
  }
  return out;
}

namespace {

class Solver {
 public:
  Solver(Environment& env, const SolverConfig& config)
      : env_(env),
        config_(config),
        n_(env.joints().size()),
        belief_(n_, 0),
        movable_(n_, false),
        rng_(config.seed) {
    if (config.max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
    if (n_ == 0) throw std::invalid_argument("environment has no joints");
    by_id_.resize(n_);
    std::iota(by_id_.begin(), by_id_.end(), 0);
    const auto& ids = env_.joints();
    std::stable_sort(by_id_.begin(), by_id_.end(),
                     [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    if (config.use_attention) model_.emplace(config.ridge_lambda);
  }

  TrialResult run() {
    if (env_.solved()) {
      result_.solved = true;
      return finish();
    }
    for (std::size_t j = 0; j < n_ && !done_; ++j) movable_[j] = attempt(j);
    while (!done_) round();
    return finish();
  }

 private:
  TrialResult finish() {
    if (model_) result_.final_weights = model_->weights();
    return std::move(result_);
  }

  bool attempt(std::size_t joint) {
    const bool moved = env_.try_manipulate(joint);
    ++result_.steps;
    result_.attempt_log.push_back({env_.joints()[joint], moved});
    if (moved) belief_[joint] ^= 1U;
    if (model_) {
      const auto from = env_.features(anchor().value_or(joint));
      const auto to = env_.features(joint);
      model_->update({learning::attention_features(from.position, from.kind, to.position, to.kind),
                      moved ? 1 : -1});
    }
    last_ = joint;
    if (moved) last_moved_ = joint;
    if (env_.solved()) {
      result_.solved = true;
      done_ = true;
    } else if (result_.steps >= config_.max_steps) {
      done_ = true;
    }
    return moved;
  }

  // Scores of every joint relative to the last attempted one; empty when
  // attention is off or has nothing to go on yet.
  std::optional<std::vector<double>> scores() const {
    const auto ref = anchor();
    if (!model_ || !model_->fitted() || !ref) return std::nullopt;
    const auto from = env_.features(*ref);
    std::vector<double> s(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const auto to = env_.features(j);
      s[j] = model_->score(
          learning::attention_features(from.position, from.kind, to.position, to.kind));
    }
    // never scored against itself: undoing the latest move comes last
    s[*ref] = -std::numeric_limits<double>::infinity();
    return s;
  }

  std::optional<std::size_t> anchor() const {
    return config_.attention_anchor == AttentionAnchor::last_moved ? last_moved_ : last_;
  }

  static const std::vector<double>* ptr(const std::optional<std::vector<double>>& s) {
    return s ? &*s : nullptr;
  }

  // One pass over the combinations; returns early on restart or termination.
  void round() {
    std::vector<std::size_t> free;
    std::vector<std::size_t> locked;
    // id order, so that lexicographic fallbacks and score ties follow joint ids
    for (auto j : by_id_) (movable_[j] ? free : locked).push_back(j);
    std::vector<std::uint8_t> current;
    for (auto j : free) current.push_back(belief_[j]);

    const auto combo_scores =
        config_.combination_order == CombinationOrder::size_then_score ? scores() : std::nullopt;
    auto combinations = enumerate_combinations(free, current, ptr(combo_scores));
    perturb_ = revisiting();
    if (perturb_) shuffle_within_sizes(combinations);
    if (combinations.empty()) {
      try_locked(locked);
      return;
    }
    for (const auto& c : combinations) {
      if (!realize(free, c)) return;
      if (try_locked(locked) || done_) return;
    }
  }

  // The solver is deterministic, so returning to a configuration it has
  // already restarted from would repeat the same cycle forever. Such a round
  // shuffles its combinations within each size class and the order in which
  // each combination is realized.
  bool revisiting() {
    std::vector<std::uint8_t> key = belief_;
    for (bool m : movable_) key.push_back(m ? 1 : 0);
    return !seen_.insert(std::move(key)).second;
  }

  void shuffle_within_sizes(std::vector<Combination>& combinations) {
    auto begin = combinations.begin();
    while (begin != combinations.end()) {
      auto end = std::find_if(begin, combinations.end(), [&](const Combination& c) {
        return c.flips.size() != begin->flips.size();
      });
      std::shuffle(begin, end, rng_);
      begin = end;
    }
  }

  // False when a joint refused to move (it is demoted) or the trial ended.
  bool realize(const std::vector<std::size_t>& free, const Combination& c) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < free.size(); ++i) {
      if (belief_[free[i]] != c.bits[i]) todo.push_back(free[i]);
    }
    if (perturb_) {
      std::shuffle(todo.begin(), todo.end(), rng_);
    } else {
      const auto s = scores();
      todo = order_locked(todo, ptr(s));
    }
    for (auto j : todo) {
      if (!attempt(j)) {
        movable_[j] = false;
        return false;
      }
      if (done_) return false;
    }
    return true;
  }

  // True when a locked joint moved (it is promoted).
  bool try_locked(const std::vector<std::size_t>& locked) {
    const auto s = scores();
    for (auto j : order_locked(locked, ptr(s))) {
      if (attempt(j)) {
        movable_[j] = true;
        return true;
      }
      if (done_) return false;
    }
    return false;
  }

  Environment& env_;
  const SolverConfig& config_;
  std::size_t n_;
  std::vector<std::size_t> by_id_;
  std::vector<std::uint8_t> belief_;  // toggles since the start of the trial
  std::vector<bool> movable_;
  std::optional<learning::AttentionModel> model_;
  std::optional<std::size_t> last_;
  std::optional<std::size_t> last_moved_;
  bool done_ = false;
  std::set<std::vector<std::uint8_t>> seen_;
  bool perturb_ = false;
  std::mt19937_64 rng_;
  TrialResult result_;
};

}  // namespace

TrialResult heuristic_solve(Environment& env, const SolverConfig& config) {
  return Solver(env, config).run();
}

void write_attempt_log_header(std::ostream& out) {
  out << "trial_id,step,joint,moved,solved_after\n";
}

void write_attempt_log(std::ostream& out, std::size_t trial_id, const TrialResult& result) {
  for (std::size_t i = 0; i < result.attempt_log.size(); ++i) {
    const auto& a = result.attempt_log[i];
    const bool solved_after = result.solved && i + 1 == result.attempt_log.size();
    out << trial_id << ',' << i + 1 << ',' << a.joint << ',' << (a.moved ? 1 : 0) << ','
        << (solved_after ? 1 : 0) << '\n';
  }
}

}  // namespace lockbox::planner
