#include <cmath>
#include <memory>

#include "doctest.h"
#include "gfucb/bandit.hpp"
#include "gfucb/erm.hpp"
#include "gfucb/errors.hpp"
#include "gfucb/rng.hpp"
#include "oracles.hpp"

using namespace gfucb;

namespace {

// Every round, each task samples a uniform input of its universe; targets
// are the truth plus Gaussian noise.
SampleLog sample_log(const FiniteInstance& inst, int rounds, double sigma, Rng& rng) {
  SampleLog log(inst.truth.tasks());
  for (int t = 0; t < rounds; ++t) {
    std::vector<Input> xs;
    std::vector<double> ys;
    for (int i = 0; i < inst.truth.tasks(); ++i) {
      const auto& u = inst.universes[static_cast<std::size_t>(i)];
      xs.push_back(u[rng.index(u.size())]);
      ys.push_back(evaluate(inst.truth, xs.back(), i) + sigma * rng.normal());
    }
    log.append_round(xs, ys);
  }
  return log;
}

}  // namespace

TEST_CASE("ols heads recover a realizable linear fit") {
  FiniteInstanceConfig cfg;
  cfg.universe_size = 5;
  cfg.head_scale = 0.3;
  cfg.seed = 4;
  const auto inst = make_finite_instance(cfg);
  Rng rng(1);
  const auto log = sample_log(inst, 30, 0.0, rng);
  const Matrix W = ols_heads(inst.truth.rep(), log, 100.0);
  MultiheadFunction fit(inst.truth.rep_ptr(), W);
  CHECK(loss(fit, log) < 1e-20);
  CHECK((W - oracle::ols_heads(inst.truth.rep(), log, 100.0)).norm() < 1e-9);
}

TEST_CASE("ols heads on one repeated feature row are the minimum-norm solution") {
  // Rank one: the fit is mean(y) phi / ||phi||^2 whatever the repetition count.
  Rng rng(12);
  std::vector<Input> keys{Input::Constant(1, 0.0)};
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Matrix V(3, 1);
    for (int r = 0; r < 3; ++r) V(r, 0) = rng.normal();
    V /= std::max(1.0, V.norm());
    const Representation rep = TableRep(keys, V);
    SampleLog log(1);
    double sum = 0.0;
    const int n = 2 + trial % 60;
    for (int r = 0; r < n; ++r) {
      std::vector<Input> xs{keys[0]};
      std::vector<double> ys{rng.normal()};
      sum += ys[0];
      log.append_round(xs, ys);
    }
    const Vector expected = V.col(0) * (sum / n / V.col(0).squaredNorm());
    const Matrix W = ols_heads(rep, log, 1e6);
    if ((W.col(0) - expected).norm() > 1e-9 * std::max(1.0, expected.norm())) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("ols heads of an empty task are zero") {
  const auto inst = make_finite_instance(FiniteInstanceConfig{});
  SampleLog log(2);
  CHECK(ols_heads(inst.truth.rep(), log, 1.0).isZero());
}

TEST_CASE("solve_finite is the exact global ERM over every candidate") {
  for (int trial = 0; trial < 25; ++trial) {
    FiniteInstanceConfig cfg;
    cfg.tasks = 1 + trial % 3;
    cfg.representations = 2 + trial % 5;
    cfg.heads_per_rep = 2;
    cfg.seed = 100 + static_cast<std::uint64_t>(trial);
    const auto inst = make_finite_instance(cfg);
    Rng rng(static_cast<std::uint64_t>(trial));
    const auto log = sample_log(inst, 1 + trial, 0.2, rng);

    const auto fit = solve_finite_detailed(inst.cls, log);
    const auto expected = oracle::rep_losses(inst.cls, log);
    REQUIRE(fit.rep_losses.size() == expected.size());
    double best = expected.front();
    for (std::size_t r = 0; r < expected.size(); ++r) {
      CHECK(fit.rep_losses[r] == doctest::Approx(expected[r]).epsilon(1e-9));
      best = std::min(best, expected[r]);
    }
    CHECK(fit.loss == doctest::Approx(best).epsilon(1e-9));
    CHECK(fit.loss == doctest::Approx(oracle::loss(fit.f, log)).epsilon(1e-12));
    for (const auto& m : inst.cls.members()) CHECK(fit.loss <= oracle::loss(m, log) + 1e-12);
  }
}

TEST_CASE("solve_finite on an empty log picks the first representation with zero heads") {
  const auto inst = make_finite_instance(FiniteInstanceConfig{});
  SampleLog log(2);
  const auto fit = solve_finite_detailed(inst.cls, log);
  CHECK(fit.rep_index == 0);
  CHECK(fit.f.heads().isZero());
  CHECK(fit.loss == 0.0);
}

TEST_CASE("a duplicated sample contributes twice to the loss") {
  const auto inst = make_finite_instance(FiniteInstanceConfig{});
  const auto& u = inst.universes;
  SampleLog once(2), twice(2);
  std::vector<Input> xs{u[0][0], u[1][0]};
  std::vector<double> ys{0.7, -0.4};
  once.append_round(xs, ys);
  twice.append_round(xs, ys);
  twice.append_round(xs, ys);
  const auto& f = inst.cls.members().front();
  CHECK(loss(f, twice) == doctest::Approx(2.0 * loss(f, once)));
}

TEST_CASE("optimizer names round-trip") {
  CHECK(optimizer_from_string("gd") == Optimizer::GradientDescent);
  CHECK(optimizer_from_string(to_string(Optimizer::Adam)) == Optimizer::Adam);
  CHECK_THROWS_AS(optimizer_from_string("sgd"), InputError);
}

TEST_CASE("two-layer training") {
  TwoLayerShape shape;
  shape.input_dim = 4;
  shape.hidden = 16;
  shape.k = 4;
  const auto cls = FunctionClass::two_layer(shape, 2, 2.0);

  SUBCASE("zero samples leave the initialization unchanged") {
    SampleLog empty(2);
    TrainConfig cfg;
    cfg.seed = 3;
    const auto r = solve_twolayer(cls, empty, cfg);
    CHECK(r.final_loss == 0.0);
    CHECK(r.steps == 0);
    CHECK(r.f.heads() == cls.initialize(3).heads());
  }

  // Teacher: a narrower seeded network; the student class is wider, so the
  // data is realizable.
  TwoLayerShape teacher_shape = shape;
  teacher_shape.hidden = 8;
  teacher_shape.rep_init_scale = 0.5;
  teacher_shape.head_init_scale = 0.5;
  const auto teacher = FunctionClass::two_layer(teacher_shape, 2, 2.0).initialize(99);
  Rng rng(5);
  SampleLog log(2);
  for (int t = 0; t < 100; ++t) {
    std::vector<Input> xs;
    std::vector<double> ys;
    for (int i = 0; i < 2; ++i) {
      Input x(4);
      for (int d = 0; d < 4; ++d) x(d) = rng.normal();
      ys.push_back(evaluate(teacher, x, i));
      xs.push_back(x);
    }
    log.append_round(xs, ys);
  }

  SUBCASE("noiseless realizable data is fit to small loss") {
    TwoLayerShape wide = shape;
    wide.hidden = 64;
    const auto student = FunctionClass::two_layer(wide, 2, 2.0);
    TrainConfig cfg;
    cfg.optimizer = Optimizer::Adam;
    cfg.step_size = 3e-3;
    cfg.epochs = 4000;
    for (std::uint64_t seed : {1, 2, 3}) {
      cfg.seed = seed;
      const auto r = solve_twolayer(student, log, cfg);
      CHECK(r.steps == cfg.epochs);
      CHECK(r.final_loss == doctest::Approx(loss(r.f, log)));
      CHECK(r.final_loss <= 1e-3);
    }
  }

  SUBCASE("the default schedule reduces the loss") {
    TrainConfig cfg;
    cfg.seed = 1;
    const auto r = solve_twolayer(cls, log, cfg);
    CHECK(r.final_loss < loss(cls.initialize(1), log));
  }

  SUBCASE("training is bit-reproducible for a fixed seed") {
    TrainConfig cfg;
    cfg.seed = 8;
    cfg.optimizer = Optimizer::Adam;
    cfg.batch_size = 32;
    cfg.epochs = 20;
    const auto a = solve_twolayer(cls, log, cfg);
    const auto b = solve_twolayer(cls, log, cfg);
    CHECK(a.final_loss == b.final_loss);
    CHECK(a.f.heads() == b.f.heads());
    CHECK(std::get<TwoLayerRep>(a.f.rep()).W1 == std::get<TwoLayerRep>(b.f.rep()).W1);
  }

  SUBCASE("heads stay inside the bound") {
    TrainConfig cfg;
    cfg.step_size = 0.05;
    cfg.epochs = 50;
    const auto r = solve_twolayer(cls, log, cfg);
    for (int i = 0; i < 2; ++i) CHECK(r.f.heads().col(i).norm() <= 2.0 + 1e-12);
  }

  SUBCASE("divergence raises a training error") {
    TwoLayerShape wide = shape;
    wide.rep_init_scale = 10.0;
    const auto loose = FunctionClass::two_layer(wide, 2, 1e300, ValueRange{-1e300, 1e300});
    SampleLog big(2);
    std::vector<Input> xs{Input::Constant(4, 1e100), Input::Constant(4, -1e100)};
    std::vector<double> ys{1e200, -1e200};
    big.append_round(xs, ys);
    TrainConfig cfg;
    cfg.step_size = 1e10;
    cfg.epochs = 5;
    CHECK_THROWS_AS(solve_twolayer(loose, big, cfg), TrainingError);
  }

  SUBCASE("invalid schedules are rejected") {
    TrainConfig cfg;
    cfg.step_size = 0.0;
    CHECK_THROWS_AS(solve_twolayer(cls, log, cfg), InputError);
  }
}

TEST_CASE("level regression with constant targets") {
  // One representation with a constant coordinate can express any constant.
  std::vector<Input> keys{Input::Constant(1, 0.0), Input::Constant(1, 1.0), Input::Constant(1, 2.0)};
  Matrix V(2, 3);
  V << 1.0, 1.0, 1.0, 0.0, 0.5, -0.5;
  V *= 0.7;
  auto rep = std::make_shared<const Representation>(TableRep(keys, V));
  Matrix W = Matrix::Zero(2, 1);
  const auto cls = FunctionClass::finite({rep}, {MultiheadFunction(rep, W, ValueRange{0.0, 1.0})},
                                         2.0);
  SampleLog log(1);
  for (const auto& x : keys) {
    std::vector<Input> xs{x};
    std::vector<double> ys{0.35};
    log.append_round(xs, ys);
  }
  const auto f = solve_mdp_level(cls, log);
  for (const auto& x : keys) CHECK(evaluate(f, x, 0) == doctest::Approx(0.35));
  CHECK(loss(f, log) < 1e-20);
  CHECK(f.range().lo == 0.0);

  const auto lin = FunctionClass::linear(1, 2, 1, 1.0, 1.0);
  CHECK_THROWS_AS(solve_mdp_level(lin, log), InputError);
}
