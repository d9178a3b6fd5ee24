#pragma once

#include <stdexcept>
#include <string>

namespace gfucb {

/// Shape or index mismatch between a function, an input, and a log.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric argument outside the domain of a formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An exhaustive search stopped at its node budget. The partial answer is
/// never returned as if it were exact.
class SearchTruncated : public std::runtime_error {
 public:
  SearchTruncated(const std::string& what, long long nodes, int best_so_far)
      : std::runtime_error(what), nodes_(nodes), best_so_far_(best_so_far) {}
  long long nodes() const { return nodes_; }
  /// Length of the longest valid sequence seen before the budget ran out.
  int best_so_far() const { return best_so_far_; }

 private:
  long long nodes_;
  int best_so_far_;
};

/// Gradient training produced a non-finite loss.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No candidate function satisfies the confidence-set membership test.
class EmptyConfidenceSet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gfucb
