#pragma once

// Functional confidence sets: radius schedules, membership, width, and the
// optimistic choice of a function and one action per task.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfucb/function_space.hpp"

namespace gfucb {

/// 12Mk + 12 log(N/delta) + 8 alpha sqrt(Mtk (Mt + log(2 M t^2 / delta))),
/// with log N passed as `log_covering`. alpha = 0 evaluates the alpha -> 0
/// limit.
double beta_theoretical(int M, int k, int t, double log_covering, double alpha, double delta);

/// a log(b t + c). Requires b t + c > 1.
double beta_practical(double t, double a, double b, double c);

struct BetaConfig {
  enum class Mode { Theoretical, Practical };
  Mode mode = Mode::Practical;
  /// Covering scale; 0 selects 1 / (k M T).
  double alpha = 0.0;
  double delta = 0.1;
  double a = 0.4;
  double b = 0.5;
  double c = 2.0;
  double lambda = 30.0;

  /// Radius for step t (1-based) of a horizon-T run. The theoretical
  /// schedule takes t; the practical one takes the t - 1 logged rounds.
  double radius(const FunctionClass& cls, int t, int horizon) const;
};

std::string to_string(BetaConfig::Mode mode);
BetaConfig::Mode beta_mode_from_string(const std::string& name);

/// Gradient search over the two-layer family for optimistic or pessimistic
/// values under a soft distance constraint.
struct SearchConfig {
  double lambda = 30.0;
  double step_size = 5e-4;
  int iterations = 200;
  /// Iterates with ||f - center||^2 <= radius * (1 + tolerance) are feasible.
  double tolerance = 0.05;
  /// Stop early once ||f - center||^2 exceeds this multiple of the radius.
  double divergence_factor = 10.0;
};

/// The set of functions f with ||f - center||^2 on the log at most radius.
/// Keeps references to the class and the log, which must outlive it.
class ConfidenceSet {
 public:
  /// For finite classes the candidate list is the center (when
  /// `include_center`) followed by every member passing contains(), in class
  /// order.
  ConfidenceSet(const FunctionClass& cls, MultiheadFunction center, double radius,
                const SampleLog& log, bool include_center = true);

  const FunctionClass& cls() const { return *cls_; }
  const MultiheadFunction& center() const { return center_; }
  double radius() const { return radius_; }
  const SampleLog& log() const { return *log_; }
  bool exact() const { return cls_->kind() == ClassKind::Finite; }

  bool contains(const MultiheadFunction& f) const;

  /// Finite classes only. Throws EmptyConfidenceSet when nothing qualifies.
  const std::vector<MultiheadFunction>& candidates() const;
  /// Class index of each candidate; -1 marks the center.
  const std::vector<int>& candidate_members() const { return candidate_members_; }

 private:
  const FunctionClass* cls_;
  MultiheadFunction center_;
  double radius_;
  const SampleLog* log_;
  std::vector<MultiheadFunction> candidates_;
  std::vector<int> candidate_members_;
};

struct SearchResult {
  MultiheadFunction f;
  /// Sum of the target head values at f.
  double objective = 0.0;
  double distance_sq = 0.0;
  int iterations = 0;
  /// True when no iterate beyond the center was feasible.
  bool fell_back = false;
};

/// Minimizes -sign * sum_j f^(task_j)(target_j) + lambda max(0, ||f - center||^2 - radius)
/// by gradient steps from the center; returns the best feasible iterate
/// (the center itself qualifies). sign = +1 maximizes, -1 minimizes.
SearchResult penalized_search(const ConfidenceSet& cs, std::span<const Input> targets,
                              std::span<const int> target_tasks, double sign,
                              const SearchConfig& cfg);

/// max over candidate pairs of sum_i (fbar_i(x_i) - flow_i(x_i)); exact for
/// finite classes, a two-search lower bound for the two-layer family.
double width(const ConfidenceSet& cs, std::span<const Input> per_task_inputs,
             const SearchConfig& cfg = {});

/// Width over an explicit list of functions; 0 for fewer than two.
double width_over(std::span<const MultiheadFunction> fs, std::span<const Input> per_task_inputs);

struct Selection {
  /// The chosen function (finite classes); unset for two-layer selection,
  /// which can pick a different search result per task.
  std::optional<MultiheadFunction> f;
  std::vector<int> actions;
  /// Optimistic value of each chosen action.
  std::vector<double> values;
  double value = 0.0;
};

/// argmax over f in the set and one action per task of sum_i f_i(a_i).
/// Finite: exact, ties to the lowest candidate then action index. Two-layer:
/// one joint penalized search per action rank (rank by center value); each
/// task plays the rank whose search ended highest on its head.
Selection optimistic_select(const ConfidenceSet& cs,
                            const std::vector<std::vector<Input>>& action_sets,
                            const SearchConfig& cfg = {});

}  // namespace gfucb
