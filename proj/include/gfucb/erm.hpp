#pragma once

// Multitask least-squares fits: exact per-representation OLS for finite
// classes and gradient training for the two-layer family.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gfucb/function_space.hpp"

namespace gfucb {

/// Sum over tasks and logged rounds of (f_i(x) - y)^2.
double loss(const MultiheadFunction& f, const SampleLog& log);

/// Per-task minimum-norm OLS heads for a fixed representation, each projected
/// onto the ball of radius `head_bound`. Tasks without samples get w = 0.
Matrix ols_heads(const Representation& rep, const SampleLog& log, double head_bound);

struct FiniteFit {
  MultiheadFunction f;
  int rep_index = 0;
  double loss = 0.0;
  /// Loss of the OLS candidate of every representation, in class order.
  std::vector<double> rep_losses;
};

/// Global ERM over (representation, OLS heads) candidates. Ties go to the
/// lowest representation index. An empty log yields the first
/// representation with W = 0.
FiniteFit solve_finite_detailed(const FunctionClass& cls, const SampleLog& log);
MultiheadFunction solve_finite(const FunctionClass& cls, const SampleLog& log);

enum class Optimizer { GradientDescent, Adam };

std::string to_string(Optimizer o);
/// Accepts "gd" and "adam"; throws InputError otherwise.
Optimizer optimizer_from_string(const std::string& name);

struct TrainConfig {
  Optimizer optimizer = Optimizer::GradientDescent;
  double step_size = 1e-3;
  int epochs = 200;
  /// 0 means full batch.
  int batch_size = 0;
  std::uint64_t seed = 0;
};

struct TrainResult {
  MultiheadFunction f;
  double final_loss = 0.0;
  int steps = 0;
};

/// Minimizes loss() over the two-layer class, starting from `warm_start`
/// when given and from cls.initialize(cfg.seed) otherwise. Heads are
/// projected after every step. Throws TrainingError on a non-finite loss.
TrainResult solve_twolayer(const FunctionClass& cls, const SampleLog& log, const TrainConfig& cfg,
                           const std::optional<MultiheadFunction>& warm_start = std::nullopt);

/// Per-level Q regression: dispatches to the finite or two-layer solver.
/// The value range and head bound come from the class.
MultiheadFunction solve_mdp_level(const FunctionClass& cls, const SampleLog& log,
                                  const TrainConfig& cfg = {});

}  // namespace gfucb
