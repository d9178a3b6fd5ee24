#include "gfucb/eluder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>

#include "gfucb/errors.hpp"

namespace gfucb {

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0)) throw DomainError("eluder: eps must be positive");
}

// Absolute gaps |f(x) - g(x)| for every pair of distinct member rows.
Matrix pair_gaps(const ScalarClass& cls) {
  std::vector<int> distinct;
  for (int a = 0; a < cls.member_count(); ++a) {
    bool dup = false;
    for (int b : distinct) {
      if (cls.values.row(a) == cls.values.row(b)) {
        dup = true;
        break;
      }
    }
    if (!dup) distinct.push_back(a);
  }
  const int m = static_cast<int>(distinct.size());
  Matrix gaps(m * (m - 1) / 2, cls.input_count());
  int p = 0;
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      gaps.row(p++) = (cls.values.row(distinct[a]) - cls.values.row(distinct[b])).cwiseAbs();
    }
  }
  return gaps;
}

// Depth-first search over input sets for one threshold v, with eps' -> v from
// below: x is independent of S when some pair has sqrt(sum_S gap^2) < v and
// gap(x) >= v. Independence of x given S depends only on the set S, so sets
// are memoized.
class ThresholdSearch {
 public:
  ThresholdSearch(const Matrix& gaps, long long budget, long long& nodes, int& best)
      : gaps_(gaps), budget_(budget), nodes_(nodes), best_(best),
        words_((gaps.cols() + 63) / 64) {}

  bool run(double v) {
    v_ = v;
    seen_.clear();
    std::vector<std::uint64_t> mask(static_cast<std::size_t>(words_), 0);
    return expand(mask, 0);
  }

 private:
  bool in(const std::vector<std::uint64_t>& mask, int x) const {
    return (mask[static_cast<std::size_t>(x / 64)] >> (x % 64)) & 1U;
  }

  std::vector<int> independent_candidates(const std::vector<std::uint64_t>& mask) const {
    const Eigen::Index pairs = gaps_.rows();
    std::vector<int> open_pairs;
    for (Eigen::Index p = 0; p < pairs; ++p) {
      double sum = 0.0;
      for (int x = 0; x < gaps_.cols(); ++x) {
        if (in(mask, x)) sum += gaps_(p, x) * gaps_(p, x);
      }
      if (std::sqrt(sum) < v_) open_pairs.push_back(static_cast<int>(p));
    }
    std::vector<int> out;
    for (int x = 0; x < gaps_.cols(); ++x) {
      if (in(mask, x)) continue;
      for (int p : open_pairs) {
        if (gaps_(p, x) >= v_) {
          out.push_back(x);
          break;
        }
      }
    }
    return out;
  }

  bool expand(std::vector<std::uint64_t>& mask, int depth) {
    const std::string key(reinterpret_cast<const char*>(mask.data()), mask.size() * 8);
    if (!seen_.insert(key).second) return true;
    if (++nodes_ > budget_) return false;
    best_ = std::max(best_, depth);
    const auto candidates = independent_candidates(mask);
    if (depth + static_cast<int>(candidates.size()) <= best_) return true;
    for (int x : candidates) {
      mask[static_cast<std::size_t>(x / 64)] |= (std::uint64_t{1} << (x % 64));
      const bool ok = expand(mask, depth + 1);
      mask[static_cast<std::size_t>(x / 64)] &= ~(std::uint64_t{1} << (x % 64));
      if (!ok) return false;
    }
    return true;
  }

  const Matrix& gaps_;
  long long budget_;
  long long& nodes_;
  int& best_;
  int words_;
  double v_ = 0.0;
  std::unordered_set<std::string> seen_;
};

}  // namespace

int ScalarClass::index_of(const Input& x) const {
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    if (inputs[j].size() == x.size() && inputs[j] == x) return static_cast<int>(j);
  }
  throw InputError("ScalarClass: input not in the class's input list");
}

bool is_eps_dependent(int x, std::span<const int> context, const ScalarClass& cls, double eps) {
  check_eps(eps);
  if (x < 0 || x >= cls.input_count()) throw InputError("is_eps_dependent: bad input index");
  for (int c : context) {
    if (c < 0 || c >= cls.input_count()) throw InputError("is_eps_dependent: bad context index");
  }
  for (int a = 0; a < cls.member_count(); ++a) {
    for (int b = a + 1; b < cls.member_count(); ++b) {
      double sum = 0.0;
      for (int c : context) {
        const double d = cls.values(a, c) - cls.values(b, c);
        sum += d * d;
      }
      if (std::sqrt(sum) <= eps && std::abs(cls.values(a, x) - cls.values(b, x)) > eps) {
        return false;
      }
    }
  }
  return true;
}

bool is_eps_dependent(const Input& x, std::span<const Input> context, const ScalarClass& cls,
                      double eps) {
  std::vector<int> idx;
  idx.reserve(context.size());
  for (const auto& c : context) idx.push_back(cls.index_of(c));
  return is_eps_dependent(cls.index_of(x), idx, cls, eps);
}

EluderResult eluder_dimension_search(const ScalarClass& cls, double eps, EluderOptions options) {
  check_eps(eps);
  EluderResult result;
  const Matrix gaps = pair_gaps(cls);
  if (gaps.size() == 0) return result;

  std::vector<double> thresholds;
  for (Eigen::Index i = 0; i < gaps.size(); ++i) {
    const double g = gaps.data()[i];
    if (g > eps) thresholds.push_back(g);
  }
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  int best = 0;
  ThresholdSearch search(gaps, options.node_budget, result.nodes, best);
  // Larger thresholds admit more premises, smaller ones more conclusions;
  // neither dominates, so every threshold is searched.
  for (auto it = thresholds.rbegin(); it != thresholds.rend(); ++it) {
    if (!search.run(*it)) {
      result.exact = false;
      break;
    }
  }
  result.dimension = best;
  return result;
}

int eluder_dimension(const ScalarClass& cls, double eps, EluderOptions options) {
  const auto r = eluder_dimension_search(cls, eps, options);
  if (!r.exact) {
    throw SearchTruncated("eluder_dimension: node budget of " +
                              std::to_string(options.node_budget) + " exhausted",
                          r.nodes, r.dimension);
  }
  return r.dimension;
}

double eluder_linear_estimate(int d, double eps) {
  if (d < 1) throw DomainError("eluder_linear_estimate: d must be at least 1");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eluder_linear_estimate: eps must lie in (0, 1)");
  return d * std::log(1.0 / eps);
}

}  // namespace gfucb
