#pragma once

// Batched forward/backward passes for two-layer multihead functions over a
// flat parameter vector. Shared by the ERM trainer and the penalized
// confidence-set search.

#include <vector>

#include "gfucb/function_space.hpp"

namespace gfucb {

/// Inputs stacked column-wise with the head each column is evaluated by.
struct Batch {
  Matrix X;                // d_in x N
  std::vector<int> task;   // size N
  Vector target;           // size N (unused by pure evaluation)

  int size() const { return static_cast<int>(task.size()); }
};

/// Stacks every sample of a log, task-major.
Batch make_batch(const SampleLog& log);

/// Parameter layout: W1 (col-major), b1, W2 (col-major), b2, heads (col-major).
class TwoLayerNet {
 public:
  TwoLayerNet(int input_dim, int hidden, int k, int tasks, ValueRange range);
  explicit TwoLayerNet(const MultiheadFunction& like);

  int param_count() const { return total_; }
  int head_offset() const { return off_heads_; }
  int k() const { return k_; }
  int tasks() const { return tasks_; }
  ValueRange range() const { return range_; }

  Vector flatten(const TwoLayerRep& rep, const Matrix& heads) const;
  Vector flatten(const MultiheadFunction& f) const;
  MultiheadFunction unflatten(const Vector& params) const;

  struct Cache {
    Matrix Z1;      // hidden x N
    Matrix A1;      // hidden x N
    Matrix Phi;     // k x N
    Vector norm;    // ||z|| per column
    Vector raw;     // unclipped head values
  };

  /// Unclipped head values for every column of the batch.
  void forward(const Vector& params, const Batch& batch, Cache& cache) const;

  /// grad += sum_j coeff_j * d raw_j / d params.
  void backward(const Vector& params, const Batch& batch, const Cache& cache,
                const Vector& coeff, Vector& grad) const;

  /// Rescales every head in `params` onto the ball of radius `bound`.
  void project_heads(Vector& params, double bound) const;

 private:
  int d_;
  int h_;
  int k_;
  int tasks_;
  ValueRange range_;
  int off_b1_;
  int off_w2_;
  int off_b2_;
  int off_heads_;
  int total_;
};

}  // namespace gfucb
