#pragma once

// Multitask episodic linear MDPs over finite state and action sets, the
// inherent Bellman error of a finite class, and the backward least-squares
// value iteration loop with per-level confidence sets.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "gfucb/bandit.hpp"
#include "gfucb/confidence.hpp"
#include "gfucb/function_space.hpp"
#include "gfucb/rng.hpp"

namespace gfucb {

struct LinearMdpConfig {
  int states = 4;
  int actions = 2;
  int horizon = 2;
  int k = 2;
  int tasks = 2;
  /// Reward noise is uniform on [-noise, noise].
  double noise = 0.05;
  std::uint64_t seed = 0;
};

/// Levels are 0-based: h = 0 is the first step of an episode.
class LinearMdpEnv {
 public:
  /// features: k x (S*A), column s*A + a is phi*(s, a).
  /// reward_heads[h]: k x M. transitions[h][i]: (S*A) x S, row-stochastic.
  LinearMdpEnv(int states, int actions, Matrix features, std::vector<Matrix> reward_heads,
               std::vector<std::vector<Matrix>> transitions, double noise);

  /// Simplex features, rewards phi^T theta with theta entries in [0, 1/H],
  /// and kernels phi^T mu with every mu row a distribution over states. The
  /// Bellman image of any bounded Q is then linear in phi*.
  static LinearMdpEnv zero_ibe(const LinearMdpConfig& cfg);

  int states() const { return S_; }
  int actions() const { return A_; }
  int horizon() const { return static_cast<int>(reward_heads_.size()); }
  int tasks() const { return static_cast<int>(reward_heads_.front().cols()); }
  int k() const { return static_cast<int>(features_.rows()); }
  int input_dim() const { return S_ + A_; }
  double noise_level() const { return noise_; }

  /// One-hot state followed by one-hot action.
  Input input(int s, int a) const;
  std::vector<Input> all_inputs() const;
  int pair_index(int s, int a) const { return s * A_ + a; }

  const Matrix& features() const { return features_; }
  /// phi* as a lookup table over all_inputs().
  std::shared_ptr<const Representation> true_representation() const;

  double mean_reward(int h, int task, int s, int a) const;
  const Matrix& transition(int h, int task) const;

  /// V*[h][task] over states for h = 0..H, with V*[H] = 0.
  const std::vector<std::vector<Vector>>& optimal_values() const { return v_star_; }
  /// Q*_h(s, a) for one task, as an S x A matrix.
  Matrix optimal_q(int h, int task) const;
  /// Heads w with Q*_h = phi*^T w (zero-IBE environments only).
  Matrix optimal_heads(int h) const;

  /// Episode streams: initial states and reward noise per task, plus
  /// transitions.
  void reset(std::uint64_t seed);
  int draw_initial_state(int task);
  double draw_noise(int task);
  int draw_next_state(int h, int task, int s, int a);

 private:
  void solve_optimal();

  int S_;
  int A_;
  Matrix features_;
  std::vector<Matrix> reward_heads_;
  std::vector<std::vector<Matrix>> transitions_;
  double noise_;
  std::vector<std::vector<Matrix>> mu_;  // [h][task]: k x S, when known
  std::vector<std::vector<Vector>> v_star_;
  std::vector<Rng> context_;
  std::vector<Rng> noise_rng_;
  std::vector<Rng> transition_rng_;
};

struct LevelClassConfig {
  /// Random simplex-valued tables besides phi*.
  int distractors = 2;
  /// Perturbed copies of the Q* heads on phi*, and random heads per
  /// distractor.
  int heads_per_rep = 3;
  /// Std of the head perturbations.
  double head_noise = 0.2;
  std::uint64_t seed = 0;
};

/// One finite class per level with value range [0, 1] and head bound sqrt(k).
/// phi* carries the exact Q*_h heads first. distractors = heads_per_rep = 0
/// gives the singleton class. Zero-IBE environments only.
std::vector<FunctionClass> make_level_classes(const LinearMdpEnv& env, const LevelClassConfig& cfg);

/// min over w of max_j |A_j w - b_j|, solved exactly as a linear program by
/// enumerating vertices in the column space of A.
double chebyshev_fit(const Matrix& A, const Vector& b);

/// max over h and over next-level functions Q_{h+1} from `next` (only Q = 0
/// at the last level) of the best sup-norm fit by `approx` (representation
/// with free heads, per task) of the exact Bellman image T_h Q_{h+1}.
double inherent_bellman_error(const LinearMdpEnv& env, const FunctionClass& next,
                              const FunctionClass& approx);
double inherent_bellman_error(const LinearMdpEnv& env, const FunctionClass& cls);

/// (B1 + sqrt(M T) I + sqrt(B2))^2 with B1 = sqrt(2Mk + log(N/delta)) + 1 and
/// B2 = 2 sqrt(M T + log(2 M T^2 / delta)); log N passed as `log_covering`.
/// The episode index t must lie in [1, T]; the radius depends on T only.
double beta_level(int M, int k, int T, int t, double log_covering, double delta, double ibe);

struct MdpRunConfig {
  int T = 50;
  double delta = 0.1;
  /// Inherent Bellman error assumed by the radius and the optimism check.
  double ibe = 0.0;
  /// Overrides beta_level when set: radius(t, h) with 1-based t.
  std::function<double(int t, int h)> radius;
  bool include_center = true;
  std::uint64_t env_seed = 0;
};

struct MdpEpisodeRecord {
  int episode = 0;
  std::vector<std::vector<int>> states;   // [h][task]
  std::vector<std::vector<int>> actions;  // [h][task]
  double optimal_value = 0.0;
  double policy_value = 0.0;
  double regret = 0.0;
  double cum_regret = 0.0;
  /// Optimistic level-0 value at the initial states.
  double optimistic_value = 0.0;
  /// optimistic_value >= optimal_value - M H I.
  bool optimistic = false;
  std::vector<double> radius;  // per level
  double bonus_mean = 0.0;     // level 0, mean over tasks
};

/// Backward fits from the center values, optimistic forward play; the regret
/// of each episode uses the exact value of the joint policy.
std::vector<MdpEpisodeRecord> run_algorithm2(LinearMdpEnv& env,
                                             const std::vector<FunctionClass>& level_classes,
                                             const MdpRunConfig& cfg);

/// The H = 1 problem as a contextual bandit: the context is the initial
/// state, the actions are (s, a) for every a, and the streams match the MDP's.
class InducedBanditEnv : public BanditEnv {
 public:
  explicit InducedBanditEnv(LinearMdpEnv env);

  int tasks() const override { return env_.tasks(); }
  int input_dim() const override { return env_.input_dim(); }
  void reset(std::uint64_t seed) override { env_.reset(seed); }
  Round next_round() override;
  double noise(int task) override { return env_.draw_noise(task); }

 private:
  LinearMdpEnv env_;
};

}  // namespace gfucb
