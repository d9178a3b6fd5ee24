#include <vector>

#include "doctest.h"
#include "gfucb/eluder.hpp"
#include "gfucb/errors.hpp"
#include "gfucb/rng.hpp"
#include "oracles.hpp"

using namespace gfucb;

namespace {

ScalarClass tabulate(const Matrix& values) {
  ScalarClass c;
  for (int j = 0; j < values.cols(); ++j) c.inputs.push_back(Input::Constant(1, j));
  c.values = values;
  return c;
}

ScalarClass random_class(Rng& rng, int members, int inputs, int levels) {
  Matrix V(members, inputs);
  for (Eigen::Index e = 0; e < V.size(); ++e) {
    V.data()[e] = static_cast<double>(rng.index(static_cast<std::size_t>(levels))) / (levels - 1);
  }
  return tabulate(V);
}

}  // namespace

TEST_CASE("a singleton class has eluder dimension zero") {
  const auto c = tabulate(Matrix::Constant(1, 4, 0.3));
  CHECK(eluder_dimension(c, 0.1) == 0);
  const auto dup = tabulate(Matrix::Constant(3, 4, 0.3));
  CHECK(eluder_dimension(dup, 0.1) == 0);
}

TEST_CASE("two constant functions have eluder dimension one") {
  Matrix V(2, 3);
  V << 0, 0, 0, 1, 1, 1;
  const auto c = tabulate(V);
  CHECK(eluder_dimension(c, 0.5) == 1);
  CHECK(eluder_dimension(c, 0.99) == 1);
  // the gap never exceeds 1
  CHECK(eluder_dimension(c, 1.0) == 0);
}

TEST_CASE("indicator functions: one per input, with and without the zero function") {
  const int n = 4;
  Matrix ind = Matrix::Identity(n, n);
  CHECK(eluder_dimension(tabulate(ind), 0.5) == n - 1);
  Matrix with_zero = Matrix::Zero(n + 1, n);
  with_zero.topRows(n) = ind;
  CHECK(eluder_dimension(tabulate(with_zero), 0.5) == n);
}

TEST_CASE("eps-dependence follows the definition") {
  Matrix V(3, 3);
  V << 0.0, 0.0, 0.0,
       0.1, 0.0, 1.0,
       1.0, 1.0, 1.0;
  const auto c = tabulate(V);
  std::vector<int> none;
  // pairs (0,1) and (1,2) differ by more than 0.5 at input 2 with no context
  CHECK_FALSE(is_eps_dependent(2, none, c, 0.5));
  // context {0} keeps every pair within 0.5 only for (0,1); they differ by 1 at input 2
  std::vector<int> ctx{0};
  CHECK_FALSE(is_eps_dependent(2, ctx, c, 0.5));
  // context {0, 2} rules out every pair
  std::vector<int> both{0, 2};
  CHECK(is_eps_dependent(1, both, c, 0.5));
  // Input overload agrees with the index overload
  std::vector<Input> ctx_in{c.inputs[0], c.inputs[2]};
  CHECK(is_eps_dependent(c.inputs[1], ctx_in, c, 0.5));
  CHECK_THROWS_AS(is_eps_dependent(5, none, c, 0.5), InputError);
  CHECK_THROWS_AS(is_eps_dependent(0, none, c, 0.0), DomainError);
}

TEST_CASE("eluder dimension is nonincreasing in eps") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = random_class(rng, 4, 5, 5);
    int prev = 1 << 20;
    for (double eps : {0.05, 0.2, 0.4, 0.6, 0.9}) {
      const int d = eluder_dimension(c, eps);
      CHECK(d <= prev);
      prev = d;
    }
  }
}

TEST_CASE("eluder dimension matches exhaustive sequence enumeration") {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int members = 2 + static_cast<int>(rng.index(4));
    const int inputs = 2 + static_cast<int>(rng.index(4));
    const auto c = random_class(rng, members, inputs, 2 + static_cast<int>(rng.index(4)));
    for (double eps : {0.1, 0.3, 0.6}) {
      CAPTURE(trial);
      CAPTURE(eps);
      CHECK(eluder_dimension(c, eps) == oracle::eluder_dimension(c, eps));
    }
  }
}

TEST_CASE("eluder search reports budget exhaustion") {
  const int n = 6;
  Matrix V = Matrix::Zero(n + 1, n);
  V.topRows(n) = Matrix::Identity(n, n);
  const auto c = tabulate(V);
  EluderOptions tight;
  tight.node_budget = 2;
  const auto r = eluder_dimension_search(c, 0.5, tight);
  CHECK_FALSE(r.exact);
  CHECK(r.dimension <= n);
  CHECK_THROWS_AS(eluder_dimension(c, 0.5, tight), SearchTruncated);
  CHECK(eluder_dimension_search(c, 0.5).exact);
}

TEST_CASE("linear eluder reference curve") {
  CHECK(eluder_linear_estimate(3, 0.1) == doctest::Approx(3.0 * std::log(10.0)));
  CHECK_THROWS_AS(eluder_linear_estimate(0, 0.1), DomainError);
  CHECK_THROWS_AS(eluder_linear_estimate(2, 1.0), DomainError);
}
