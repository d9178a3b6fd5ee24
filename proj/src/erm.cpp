#include "gfucb/erm.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "gfucb/errors.hpp"
#include "gfucb/rng.hpp"
#include "gfucb/two_layer.hpp"

namespace gfucb {

double loss(const MultiheadFunction& f, const SampleLog& log) {
  if (f.tasks() != log.tasks()) throw InputError("loss: task count mismatch");
  double total = 0.0;
  for (int i = 0; i < log.tasks(); ++i) {
    for (const auto& s : log.task_samples(i)) {
      const double d = evaluate(f, s.x, i) - s.y;
      total += d * d;
    }
  }
  return total;
}

Matrix ols_heads(const Representation& rep, const SampleLog& log, double head_bound) {
  const int k = output_dim(rep);
  Matrix heads = Matrix::Zero(k, log.tasks());
  for (int i = 0; i < log.tasks(); ++i) {
    const auto& samples = log.task_samples(i);
    if (samples.empty()) continue;
    Matrix features(static_cast<Eigen::Index>(samples.size()), k);
    Vector y(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t r = 0; r < samples.size(); ++r) {
      features.row(static_cast<Eigen::Index>(r)) = represent(rep, samples[r].x).transpose();
      y(static_cast<Eigen::Index>(r)) = samples[r].y;
    }
    // Repeated rows leave roundoff-sized pivots that the default threshold
    // counts as rank; a relative cutoff keeps the minimum-norm solution.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(features.rows(), features.cols());
    cod.setThreshold(1e-10);
    cod.compute(features);
    heads.col(i) = cod.solve(y);
  }
  project_heads(heads, head_bound);
  return heads;
}

FiniteFit solve_finite_detailed(const FunctionClass& cls, const SampleLog& log) {
  if (cls.kind() != ClassKind::Finite) throw InputError("solve_finite: class is not finite");
  if (cls.tasks() != log.tasks()) throw InputError("solve_finite: task count mismatch");
  const auto& reps = cls.representations();
  std::optional<FiniteFit> best;
  std::vector<double> losses;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    MultiheadFunction candidate(reps[r], ols_heads(*reps[r], log, cls.head_norm_bound()),
                                cls.range());
    const double l = loss(candidate, log);
    losses.push_back(l);
    if (!best || l < best->loss) best = FiniteFit{candidate, static_cast<int>(r), l, {}};
  }
  best->rep_losses = std::move(losses);
  return *best;
}

MultiheadFunction solve_finite(const FunctionClass& cls, const SampleLog& log) {
  return solve_finite_detailed(cls, log).f;
}

std::string to_string(Optimizer o) {
  return o == Optimizer::Adam ? "adam" : "gd";
}

Optimizer optimizer_from_string(const std::string& name) {
  if (name == "gd") return Optimizer::GradientDescent;
  if (name == "adam") return Optimizer::Adam;
  throw InputError("unknown optimizer '" + name + "' (expected gd or adam)");
}

namespace {

// Loss and its gradient over the columns of `batch`. Saturated outputs
// contribute their clipped residual but no gradient.
double loss_and_gradient(const TwoLayerNet& net, const Vector& params, const Batch& batch,
                         TwoLayerNet::Cache& cache, Vector& grad) {
  net.forward(params, batch, cache);
  const ValueRange range = net.range();
  Vector coeff(batch.size());
  double total = 0.0;
  for (int j = 0; j < batch.size(); ++j) {
    const double raw = cache.raw(j);
    const double resid = range.clip(raw) - batch.target(j);
    total += resid * resid;
    coeff(j) = range.saturated(raw) ? 0.0 : 2.0 * resid;
  }
  grad.setZero();
  net.backward(params, batch, cache, coeff, grad);
  return total;
}

Batch select_columns(const Batch& full, const std::vector<int>& order, std::size_t begin,
                     std::size_t end) {
  Batch b;
  const auto n = static_cast<Eigen::Index>(end - begin);
  b.X.resize(full.X.rows(), n);
  b.target.resize(n);
  b.task.resize(end - begin);
  for (std::size_t j = begin; j < end; ++j) {
    const auto col = static_cast<Eigen::Index>(j - begin);
    const int src = order[j];
    b.X.col(col) = full.X.col(src);
    b.target(col) = full.target(src);
    b.task[j - begin] = full.task[static_cast<std::size_t>(src)];
  }
  return b;
}

class Stepper {
 public:
  Stepper(const TrainConfig& cfg, int n) : cfg_(cfg) {
    if (cfg.optimizer == Optimizer::Adam) {
      m_ = Vector::Zero(n);
      v_ = Vector::Zero(n);
    }
  }

  void step(Vector& params, const Vector& grad) {
    if (cfg_.optimizer == Optimizer::GradientDescent) {
      params -= cfg_.step_size * grad;
      return;
    }
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    ++t_;
    m_ = kBeta1 * m_ + (1.0 - kBeta1) * grad;
    v_ = kBeta2 * v_ + (1.0 - kBeta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    params.array() -= cfg_.step_size * (m_.array() / c1) / ((v_.array() / c2).sqrt() + kEps);
  }

 private:
  TrainConfig cfg_;
  Vector m_;
  Vector v_;
  int t_ = 0;
};

}  // namespace

TrainResult solve_twolayer(const FunctionClass& cls, const SampleLog& log, const TrainConfig& cfg,
                           const std::optional<MultiheadFunction>& warm_start) {
  if (cls.kind() != ClassKind::TwoLayer) throw InputError("solve_twolayer: class is not two-layer");
  if (cls.tasks() != log.tasks()) throw InputError("solve_twolayer: task count mismatch");
  if (cfg.epochs < 0 || cfg.batch_size < 0 || !(cfg.step_size > 0.0)) {
    throw InputError("solve_twolayer: invalid training schedule");
  }
  MultiheadFunction start = warm_start ? *warm_start : cls.initialize(cfg.seed);
  if (start.tasks() != cls.tasks()) throw InputError("solve_twolayer: warm start has wrong M");
  if (log.empty()) return {start, 0.0, 0};

  const TwoLayerNet net(start);
  Vector params = net.flatten(start);
  const Batch full = make_batch(log);
  const int n = full.size();
  const bool full_batch = cfg.batch_size == 0 || cfg.batch_size >= n;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng = Rng(cfg.seed).derive("minibatch");

  Stepper stepper(cfg, net.param_count());
  TwoLayerNet::Cache cache;
  Vector grad(net.param_count());
  int steps = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (full_batch) {
      const double l = loss_and_gradient(net, params, full, cache, grad);
      if (!std::isfinite(l) || !grad.allFinite()) {
        std::ostringstream msg;
        msg << "solve_twolayer: non-finite loss at epoch " << epoch << " (loss " << l
            << ", samples " << n << ", step size " << cfg.step_size << ")";
        throw TrainingError(msg.str());
      }
      stepper.step(params, grad);
      net.project_heads(params, cls.head_norm_bound());
      ++steps;
      continue;
    }
    for (int j = n - 1; j > 0; --j) {
      std::swap(order[static_cast<std::size_t>(j)],
                order[shuffle_rng.index(static_cast<std::size_t>(j) + 1)]);
    }
    for (int b = 0; b < n; b += cfg.batch_size) {
      const int e = std::min(n, b + cfg.batch_size);
      const Batch mb = select_columns(full, order, static_cast<std::size_t>(b),
                                      static_cast<std::size_t>(e));
      const double l = loss_and_gradient(net, params, mb, cache, grad);
      if (!std::isfinite(l) || !grad.allFinite()) {
        std::ostringstream msg;
        msg << "solve_twolayer: non-finite loss at epoch " << epoch << " (batch loss " << l
            << ", step size " << cfg.step_size << ")";
        throw TrainingError(msg.str());
      }
      stepper.step(params, grad);
      net.project_heads(params, cls.head_norm_bound());
      ++steps;
    }
  }
  MultiheadFunction trained = net.unflatten(params);
  const double final_loss = loss(trained, log);
  if (!std::isfinite(final_loss)) throw TrainingError("solve_twolayer: non-finite final loss");
  return {std::move(trained), final_loss, steps};
}

MultiheadFunction solve_mdp_level(const FunctionClass& cls, const SampleLog& log,
                                  const TrainConfig& cfg) {
  switch (cls.kind()) {
    case ClassKind::Finite:
      return solve_finite(cls, log);
    case ClassKind::TwoLayer:
      return solve_twolayer(cls, log, cfg).f;
    case ClassKind::LinearParametric:
      break;
  }
  throw InputError("solve_mdp_level: linear-parametric classes carry no solver");
}

}  // namespace gfucb
