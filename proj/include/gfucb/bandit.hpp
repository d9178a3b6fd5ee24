#pragma once

// Multitask contextual bandit environments and the online learning loops.

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gfucb/confidence.hpp"
#include "gfucb/erm.hpp"
#include "gfucb/function_space.hpp"
#include "gfucb/rng.hpp"

namespace gfucb {

/// One round of contexts: per task, the inputs of its available actions and
/// their noiseless mean rewards.
struct Round {
  std::vector<std::vector<Input>> actions;
  std::vector<std::vector<double>> means;
  /// Optional per-action labels (the digit shown, for example).
  std::vector<std::vector<int>> labels;

  int tasks() const { return static_cast<int>(actions.size()); }
};

/// Context and reward-noise streams are derived per global task id from the
/// replication seed, so a task sees the same data whatever it is grouped with.
class BanditEnv {
 public:
  virtual ~BanditEnv() = default;

  virtual int tasks() const = 0;
  virtual int input_dim() const = 0;
  /// Restarts every stream for a new replication.
  virtual void reset(std::uint64_t seed) = 0;
  virtual Round next_round() = 0;
  /// One reward-noise draw for `task`.
  virtual double noise(int task) = 0;
  /// Ground-truth function when the environment is realizable.
  virtual const MultiheadFunction* truth() const { return nullptr; }
};

struct StepOutcome {
  std::vector<double> rewards;
  std::vector<double> regrets;
};

/// Plays one action per task: reward = mean + fresh noise, regret = best mean
/// of the round minus the chosen mean. Throws InputError on a bad index.
StepOutcome step_env(BanditEnv& env, const Round& round, std::span<const int> actions);

/// Realizable environment over finite per-task input universes: each round
/// shows K distinct inputs drawn uniformly from the task's universe.
class FiniteBanditEnv : public BanditEnv {
 public:
  FiniteBanditEnv(MultiheadFunction truth, std::vector<std::vector<Input>> universes, int K,
                  double noise_sigma, std::vector<int> task_ids = {});

  int tasks() const override { return truth_.tasks(); }
  int input_dim() const override { return truth_.input_dim(); }
  void reset(std::uint64_t seed) override;
  Round next_round() override;
  double noise(int task) override;
  const MultiheadFunction* truth() const override { return &truth_; }

  const std::vector<std::vector<Input>>& universes() const { return universes_; }
  int actions_per_round() const { return K_; }

 private:
  MultiheadFunction truth_;
  std::vector<std::vector<Input>> universes_;
  int K_;
  double sigma_;
  std::vector<int> ids_;
  std::vector<Rng> context_;
  std::vector<Rng> noise_;
};

struct FiniteInstanceConfig {
  int tasks = 2;
  int k = 2;
  int input_dim = 3;
  /// Inputs per task universe.
  int universe_size = 3;
  int representations = 4;
  int heads_per_rep = 3;
  /// Std of the head entries before projection onto the sqrt(k) ball.
  double head_scale = 1.0;
  std::uint64_t seed = 0;
};

/// A random finite class over random per-task universes with a realizable
/// truth drawn from its members.
struct FiniteInstance {
  FunctionClass cls;
  MultiheadFunction truth;
  int truth_index = 0;
  std::vector<std::vector<Input>> universes;
};

/// Representations are lookup tables with values on the unit ball; heads are
/// Gaussian, projected onto the sqrt(k) ball.
FiniteInstance make_finite_instance(const FiniteInstanceConfig& cfg);

constexpr int kDigits = 10;

struct DigitWorldConfig {
  int dim = 16;
  /// Prototype vectors per digit; an image picks one uniformly.
  int styles = 1;
  /// 0: independent uniform maps. r > 0: each map is a random convex
  /// combination of r uniform base maps, so the maps span r dimensions.
  int map_rank = 0;
  double observation_noise = 0.05;
  double reward_noise = 0.01;
  std::uint64_t prototype_seed = 1;
  std::uint64_t map_seed = 2;
};

/// Unit prototype vectors (styles of each digit) and ten digit-to-reward maps.
struct DigitWorld {
  Matrix prototypes;  // dim x (10 * styles), digit j owns columns j*styles ..
  int styles = 1;
  Matrix maps;        // 10 tasks x 10 digits, entries in [0, 1]
  double observation_noise = 0.05;
  double reward_noise = 0.01;

  int dim() const { return static_cast<int>(prototypes.rows()); }
  int task_count() const { return static_cast<int>(maps.rows()); }
};

/// Random prototypes and uniform reward maps whose best digits are distinct
/// across tasks.
DigitWorld make_digit_world(const DigitWorldConfig& cfg);

/// The same prototypes with maps sigma(j) = j / 10 for every task.
DigitWorld with_linear_maps(DigitWorld world, int tasks);

/// Draws one noisy image of `digit`.
Input digit_image(const DigitWorld& world, int digit, Rng& rng);

/// Bandit over a subset of the world's tasks: each round shows K distinct
/// digits as noisy images.
class DigitBanditEnv : public BanditEnv {
 public:
  DigitBanditEnv(std::shared_ptr<const DigitWorld> world, std::vector<int> task_ids, int K);

  int tasks() const override { return static_cast<int>(ids_.size()); }
  int input_dim() const override { return world_->dim(); }
  void reset(std::uint64_t seed) override;
  Round next_round() override;
  double noise(int task) override;

  const DigitWorld& world() const { return *world_; }
  const std::vector<int>& task_ids() const { return ids_; }

 private:
  std::shared_ptr<const DigitWorld> world_;
  std::vector<int> ids_;
  int K_;
  std::vector<Rng> context_;
  std::vector<Rng> noise_;
};

struct EpisodeRecord {
  int t = 0;
  std::vector<int> actions;
  std::vector<Input> inputs;
  std::vector<double> regrets;
  double inst_regret = 0.0;
  double cum_regret = 0.0;
  /// Width of the confidence set at the played inputs; NaN when skipped.
  double width = std::numeric_limits<double>::quiet_NaN();
  /// Finite classes: width over the class members inside the set only.
  double class_width = std::numeric_limits<double>::quiet_NaN();
  /// Mean over tasks of optimistic minus center value at the chosen action.
  double bonus_mean = std::numeric_limits<double>::quiet_NaN();
  double radius = std::numeric_limits<double>::quiet_NaN();
  double optimistic_value = std::numeric_limits<double>::quiet_NaN();
  /// 1 when the environment's truth is inside the set, 0 when not, -1 unknown.
  int truth_contained = -1;
  double wall_ms = 0.0;
};

struct GfucbConfig {
  int T = 100;
  BetaConfig beta;
  SearchConfig search;
  TrainConfig train;
  bool include_center = true;
  bool record_width = true;
  std::uint64_t env_seed = 0;
  /// Seeds the representation initialization and training shuffles.
  std::uint64_t seed = 0;
  /// Called after each step with the current center and confidence set.
  std::function<void(int t, const ConfidenceSet&)> on_step;
};

struct RunResult {
  std::vector<EpisodeRecord> records;
  std::optional<MultiheadFunction> center;
  SampleLog log{1};
};

/// Algorithm 1: fit, build the confidence set, select optimistically, play.
RunResult run_gfucb(BanditEnv& env, const FunctionClass& cls, const GfucbConfig& cfg);

struct EpsGreedyConfig {
  int T = 100;
  double epsilon = 0.1;
  TrainConfig train;
  std::uint64_t env_seed = 0;
  std::uint64_t seed = 0;
};

/// Independent per-task fits; explores uniformly with probability epsilon.
RunResult run_eps_greedy(BanditEnv& env, const FunctionClass& cls, const EpsGreedyConfig& cfg);

}  // namespace gfucb
