#pragma once

// Exact epsilon-dependence and eluder dimension for finite scalar function
// classes over finite input sets.

#include <span>
#include <vector>

#include "gfucb/function_space.hpp"

namespace gfucb {

/// Finite class of scalar functions tabulated on a shared input list.
struct ScalarClass {
  std::vector<Input> inputs;
  Matrix values;  // members x inputs

  int member_count() const { return static_cast<int>(values.rows()); }
  int input_count() const { return static_cast<int>(values.cols()); }

  /// Position of `x` in `inputs`; throws InputError when absent.
  int index_of(const Input& x) const;
};

/// True iff every member pair whose distance on `context` is at most eps
/// also differs by at most eps on `x`. Indices refer to cls.inputs; repeated
/// context entries count repeatedly.
bool is_eps_dependent(int x, std::span<const int> context, const ScalarClass& cls, double eps);
bool is_eps_dependent(const Input& x, std::span<const Input> context, const ScalarClass& cls,
                      double eps);

struct EluderOptions {
  long long node_budget = 1'000'000;
};

struct EluderResult {
  int dimension = 0;
  /// False when the node budget ran out; `dimension` is then a lower bound.
  bool exact = true;
  long long nodes = 0;
};

/// Longest input sequence in which, for one common eps' >= eps, every element
/// is eps'-independent of its predecessors. Throws SearchTruncated when the
/// budget is exhausted.
int eluder_dimension(const ScalarClass& cls, double eps, EluderOptions options = {});

/// Same search, but reports truncation instead of throwing.
EluderResult eluder_dimension_search(const ScalarClass& cls, double eps,
                                     EluderOptions options = {});

/// d * log(1/eps): reference curve for linear classes (no constant implied).
double eluder_linear_estimate(int d, double eps);

}  // namespace gfucb
