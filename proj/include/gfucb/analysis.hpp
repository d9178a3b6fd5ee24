#pragma once

// Post-hoc diagnostics: exploration bonus against prediction error, bonus
// decay with sample size, template kernels of a representation, the
// width-count audit, and regret aggregation over replications.

#include <cstdint>
#include <span>
#include <vector>

#include "gfucb/bandit.hpp"
#include "gfucb/confidence.hpp"
#include "gfucb/eluder.hpp"
#include "gfucb/erm.hpp"
#include "gfucb/function_space.hpp"

namespace gfucb {

/// A held-out input for one task with its mean reward.
struct TestPoint {
  Input x;
  int task = 0;
  double y = 0.0;
};

struct BonusPoint {
  /// |center(x) - y|
  double error = 0.0;
  /// Optimistic value at x minus center(x).
  double bonus = 0.0;
};

/// Per test point: exact maximum over the candidates for finite classes, a
/// single-input penalized search for the two-layer family.
std::vector<BonusPoint> bonus_diagnostic(const ConfidenceSet& cs, std::span<const TestPoint> test,
                                         const SearchConfig& cfg = {});

/// Fraction of points with bonus >= error; 0 for an empty list.
double fraction_above_diagonal(std::span<const BonusPoint> points);

/// Logs `rounds` rounds in which every task plays a uniformly random action
/// and observes a noisy reward.
SampleLog collect_uniform_log(BanditEnv& env, int rounds, std::uint64_t env_seed,
                              std::uint64_t seed);

/// `count` points cycling over tasks, each a uniformly random action of a
/// fresh round, labelled with its mean reward.
std::vector<TestPoint> collect_test_points(BanditEnv& env, int count, std::uint64_t env_seed,
                                           std::uint64_t seed);

struct DecayConfig {
  BetaConfig beta;
  /// Horizon passed to the radius schedule.
  int horizon = 300;
  SearchConfig search;
  TrainConfig train;
  bool include_center = true;
  /// Seeds the two-layer initialization shared by every sample size.
  std::uint64_t seed = 0;
};

struct DecayPoint {
  int n = 0;
  double mean_bonus = 0.0;
  double std_bonus = 0.0;
};

/// For each n: fit on the first n rounds of `pool`, build the confidence set
/// with the radius for n logged rounds, and summarize the bonuses on `test`.
std::vector<DecayPoint> bonus_decay_curve(const FunctionClass& cls, const SampleLog& pool,
                                          std::span<const int> sizes,
                                          std::span<const TestPoint> test, const DecayConfig& cfg);

/// Template T_g = mean of phi over group g, as the columns of a k x G matrix.
Matrix template_vectors(const Representation& rep, const std::vector<std::vector<Input>>& groups);

/// C(i, j) = <T_i, T_j>.
Matrix kernel_matrix(const Representation& rep, const std::vector<std::vector<Input>>& groups);

/// Fraction of ordered pairs (i, j != i) with C(i, i) > C(i, j).
double diagonal_dominance(const Matrix& C);

/// g(x_1, ..., x_M) = sum_i f_i(x_i) tabulated over every tuple of the
/// per-task universes (one universe is shared by all tasks). Tuples are
/// encoded by concatenating the inputs; the first task varies slowest.
ScalarClass scalarize(std::span<const MultiheadFunction> members,
                      const std::vector<std::vector<Input>>& universes);
ScalarClass scalarize(const FunctionClass& cls, const std::vector<std::vector<Input>>& universes);

/// Concatenation of per-task inputs, matching scalarize().
Input tuple_input(std::span<const Input> per_task);

struct AuditRow {
  double eps = 0.0;
  int count = 0;
  double bound = 0.0;
  int eluder_dimension = 0;
  /// False when the eluder search was truncated; the bound then uses a lower
  /// bound on the dimension, which can only make the check stricter.
  bool eluder_exact = true;
  bool pass = false;
};

struct AuditReport {
  std::vector<AuditRow> rows;
  bool pass = true;
};

/// Compares #{t : width_t > eps} with (4 M beta_T / eps^2 + 1) dim_E(cls, eps).
AuditReport width_count_audit(std::span<const double> widths, int M, double beta_T,
                              const ScalarClass& cls, std::span<const double> eps_grid,
                              EluderOptions options = {});

struct RegretCheckpoint {
  int t = 0;
  double mean = 0.0;
  /// Sample standard deviation over replications; 0 for one replication.
  double std = 0.0;
  int replications = 0;
};

/// Cumulative regret curves, one per replication, indexed by t - 1.
std::vector<RegretCheckpoint> aggregate_regret(const std::vector<std::vector<double>>& curves,
                                               std::span<const int> checkpoints);

}  // namespace gfucb
