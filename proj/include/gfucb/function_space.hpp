#pragma once

// Representation functions, multihead value functions and function classes.
//
// A multihead function is a shared representation phi: X -> R^k together
// with a k x M head matrix W; head i evaluates clip(<phi(x), w_i>). Every
// representation keeps ||phi(x)||_2 <= 1.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace gfucb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A context-action pair (bandit) or state-action pair (MDP), flattened.
using Input = Eigen::VectorXd;

/// phi(x) = B x, rescaled onto the unit ball when ||B x|| > 1.
struct LinearRep {
  Matrix B;  // k x d_in
};

/// Explicit lookup table over a finite input set. Every stored vector must
/// have norm at most 1.
class TableRep {
 public:
  TableRep(std::vector<Input> keys, Matrix values);

  int output_dim() const { return static_cast<int>(values_.rows()); }
  int input_dim() const;
  int size() const { return static_cast<int>(keys_.size()); }

  std::optional<int> find(const Input& x) const;
  /// Throws InputError for inputs outside the table.
  Eigen::Ref<const Vector> at(const Input& x) const;

  const std::vector<Input>& keys() const { return keys_; }
  const Matrix& values() const { return values_; }

 private:
  std::vector<Input> keys_;
  Matrix values_;  // k x n, column j is phi(keys_[j])
  std::map<std::vector<double>, int> index_;
};

/// Dense relu network: z = W2 relu(W1 x + b1) + b2, phi = z / max(||z||, 1).
struct TwoLayerRep {
  Matrix W1;  // hidden x d_in
  Vector b1;
  Matrix W2;  // k x hidden
  Vector b2;

  int input_dim() const { return static_cast<int>(W1.cols()); }
  int hidden() const { return static_cast<int>(W1.rows()); }
  int output_dim() const { return static_cast<int>(W2.rows()); }
};

using Representation = std::variant<LinearRep, TableRep, TwoLayerRep>;

int output_dim(const Representation& rep);
int input_dim(const Representation& rep);
Vector represent(const Representation& rep, const Input& x);

/// Closed interval the head values are clipped to: [-1, 1] for bandits,
/// [0, 1] for MDP Q-values.
struct ValueRange {
  double lo = -1.0;
  double hi = 1.0;

  double clip(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
  bool saturated(double v) const { return v < lo || v > hi; }
};

class MultiheadFunction {
 public:
  MultiheadFunction(std::shared_ptr<const Representation> rep, Matrix heads,
                    ValueRange range = {});

  const Representation& rep() const { return *rep_; }
  const std::shared_ptr<const Representation>& rep_ptr() const { return rep_; }
  const Matrix& heads() const { return heads_; }
  ValueRange range() const { return range_; }

  int tasks() const { return static_cast<int>(heads_.cols()); }
  int k() const { return static_cast<int>(heads_.rows()); }
  int input_dim() const { return gfucb::input_dim(*rep_); }

  /// <phi(x), w_task> before clipping.
  double raw(const Input& x, int task) const;

 private:
  std::shared_ptr<const Representation> rep_;
  Matrix heads_;
  ValueRange range_;
};

/// clip(<phi(x), w_task>) with task in [0, M).
double evaluate(const MultiheadFunction& f, const Input& x, int task);

/// Gradient of evaluate() with respect to the flattened parameters of a
/// two-layer function (see TwoLayerNet for the layout). Zero when the head
/// value is saturated by clipping.
Vector gradient(const MultiheadFunction& f, const Input& x, int task);

/// Per-task ordered history of (input, target) pairs; one sample per task
/// per round.
class SampleLog {
 public:
  struct Sample {
    Input x;
    double y;
  };

  explicit SampleLog(int tasks);

  void append_round(std::span<const Input> inputs, std::span<const double> targets);
  void set_target(int task, int round, double y);

  int tasks() const { return static_cast<int>(samples_.size()); }
  int rounds() const { return rounds_; }
  std::size_t size() const { return static_cast<std::size_t>(rounds_) * samples_.size(); }
  bool empty() const { return rounds_ == 0; }

  const std::vector<Sample>& task_samples(int task) const;

 private:
  std::vector<std::vector<Sample>> samples_;
  int rounds_ = 0;
};

/// Sum over tasks and logged rounds of (f_i(x) - g_i(x))^2.
double empirical_norm_sq(const MultiheadFunction& f, const MultiheadFunction& g,
                         const SampleLog& log);

/// k * d_in * log(1 + 2 * entry_bound / alpha): ball-covering bound for
/// linear representations with entries in [-entry_bound, entry_bound].
double log_covering_linear(int d_in, int k, double alpha, double entry_bound);

enum class ClassKind { Finite, LinearParametric, TwoLayer };

struct TwoLayerShape {
  int input_dim = 16;
  int hidden = 32;
  int k = 10;
  /// Std of W2 entries is rep_init_scale / sqrt(hidden).
  double rep_init_scale = 0.1;
  double head_init_scale = 0.1;
};

class FunctionClass {
 public:
  /// Finite class. Every member must use a representation from `reps`
  /// (pointer identity); log N(Phi) = log |reps|.
  static FunctionClass finite(std::vector<std::shared_ptr<const Representation>> reps,
                              std::vector<MultiheadFunction> members,
                              double head_norm_bound);

  static FunctionClass two_layer(const TwoLayerShape& shape, int tasks,
                                 double head_norm_bound, ValueRange range = {});

  /// Linear representations phi(x) = B x with |B_ij| <= entry_bound. Only the
  /// covering bound is available for this kind.
  static FunctionClass linear(int input_dim, int k, int tasks, double entry_bound,
                              double head_norm_bound, ValueRange range = {});

  ClassKind kind() const { return kind_; }
  int k() const { return k_; }
  int tasks() const { return tasks_; }
  int input_dim() const { return input_dim_; }
  double head_norm_bound() const { return head_norm_bound_; }
  ValueRange range() const { return range_; }

  const std::vector<std::shared_ptr<const Representation>>& representations() const {
    return reps_;
  }
  const std::vector<MultiheadFunction>& members() const { return members_; }
  /// Index into representations() of each member.
  const std::vector<int>& member_rep() const { return member_rep_; }
  const TwoLayerShape& shape() const { return shape_; }

  /// Bound on log N(Phi, alpha, sup-norm). Finite: log |Phi| for any alpha.
  /// Linear: log_covering_linear. Two-layer: throws DomainError.
  double log_covering(double alpha) const;

  /// The same class restricted to head `task` (M = 1).
  FunctionClass single_task(int task) const;

  /// Seeded random two-layer function from this class.
  MultiheadFunction initialize(std::uint64_t seed) const;

 private:
  FunctionClass() = default;

  ClassKind kind_ = ClassKind::Finite;
  int k_ = 0;
  int tasks_ = 0;
  int input_dim_ = 0;
  double head_norm_bound_ = 1.0;
  double entry_bound_ = 1.0;
  ValueRange range_;
  std::vector<std::shared_ptr<const Representation>> reps_;
  std::vector<MultiheadFunction> members_;
  std::vector<int> member_rep_;
  TwoLayerShape shape_;
};

/// Rescales each column of `heads` onto the ball of radius `bound`.
void project_heads(Matrix& heads, double bound);

}  // namespace gfucb
