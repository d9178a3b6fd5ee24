#include "gfucb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gfucb/errors.hpp"

namespace gfucb {

namespace {

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

SampleLog prefix(const SampleLog& pool, int n) {
  SampleLog log(pool.tasks());
  std::vector<Input> xs(static_cast<std::size_t>(pool.tasks()));
  std::vector<double> ys(static_cast<std::size_t>(pool.tasks()));
  for (int r = 0; r < n; ++r) {
    for (int i = 0; i < pool.tasks(); ++i) {
      const auto& s = pool.task_samples(i)[static_cast<std::size_t>(r)];
      xs[static_cast<std::size_t>(i)] = s.x;
      ys[static_cast<std::size_t>(i)] = s.y;
    }
    log.append_round(xs, ys);
  }
  return log;
}

}  // namespace

std::vector<BonusPoint> bonus_diagnostic(const ConfidenceSet& cs, std::span<const TestPoint> test,
                                         const SearchConfig& cfg) {
  std::vector<BonusPoint> out;
  out.reserve(test.size());
  for (const TestPoint& p : test) {
    if (p.task < 0 || p.task >= cs.center().tasks()) {
      throw InputError("bonus_diagnostic: task " + std::to_string(p.task) + " out of range");
    }
    const double center = evaluate(cs.center(), p.x, p.task);
    double top = center;
    if (cs.exact()) {
      for (const MultiheadFunction& f : cs.candidates()) top = std::max(top, evaluate(f, p.x, p.task));
    } else {
      const Input targets[] = {p.x};
      const int tasks[] = {p.task};
      top = std::max(top, penalized_search(cs, targets, tasks, 1.0, cfg).objective);
    }
    out.push_back({std::abs(center - p.y), top - center});
  }
  return out;
}

double fraction_above_diagonal(std::span<const BonusPoint> points) {
  if (points.empty()) return 0.0;
  const auto above = std::count_if(points.begin(), points.end(),
                                   [](const BonusPoint& p) { return p.bonus >= p.error; });
  return static_cast<double>(above) / static_cast<double>(points.size());
}

SampleLog collect_uniform_log(BanditEnv& env, int rounds, std::uint64_t env_seed,
                              std::uint64_t seed) {
  if (rounds < 0) throw InputError("collect_uniform_log: rounds must be >= 0");
  env.reset(env_seed);
  Rng rng(derive_seed(seed, "uniform-actions"));
  SampleLog log(env.tasks());
  for (int r = 0; r < rounds; ++r) {
    const Round round = env.next_round();
    std::vector<int> actions;
    std::vector<Input> xs;
    for (int i = 0; i < env.tasks(); ++i) {
      const auto& set = round.actions[static_cast<std::size_t>(i)];
      actions.push_back(static_cast<int>(rng.index(set.size())));
      xs.push_back(set[static_cast<std::size_t>(actions.back())]);
    }
    const StepOutcome out = step_env(env, round, actions);
    log.append_round(xs, out.rewards);
  }
  return log;
}

std::vector<TestPoint> collect_test_points(BanditEnv& env, int count, std::uint64_t env_seed,
                                           std::uint64_t seed) {
  if (count < 0) throw InputError("collect_test_points: count must be >= 0");
  env.reset(env_seed);
  Rng rng(derive_seed(seed, "test-actions"));
  std::vector<TestPoint> points;
  while (static_cast<int>(points.size()) < count) {
    const Round round = env.next_round();
    for (int i = 0; i < env.tasks() && static_cast<int>(points.size()) < count; ++i) {
      const auto& set = round.actions[static_cast<std::size_t>(i)];
      const std::size_t a = rng.index(set.size());
      points.push_back({set[a], i, round.means[static_cast<std::size_t>(i)][a]});
    }
  }
  return points;
}

std::vector<DecayPoint> bonus_decay_curve(const FunctionClass& cls, const SampleLog& pool,
                                          std::span<const int> sizes,
                                          std::span<const TestPoint> test, const DecayConfig& cfg) {
  if (pool.tasks() != cls.tasks()) throw InputError("bonus_decay_curve: pool and class disagree on M");
  std::vector<DecayPoint> curve;
  for (int n : sizes) {
    if (n < 0 || n > pool.rounds()) {
      throw InputError("bonus_decay_curve: size " + std::to_string(n) + " outside the pool");
    }
    const SampleLog log = prefix(pool, n);
    std::optional<MultiheadFunction> center;
    if (cls.kind() == ClassKind::Finite) {
      center = solve_finite(cls, log);
    } else {
      TrainConfig tc = cfg.train;
      tc.seed = derive_seed(cfg.seed, "train", static_cast<std::uint64_t>(n));
      center = solve_twolayer(cls, log, tc, cls.initialize(derive_seed(cfg.seed, "init"))).f;
    }
    const ConfidenceSet cs(cls, *center, cfg.beta.radius(cls, n + 1, cfg.horizon), log,
                           cfg.include_center);
    const std::vector<BonusPoint> points = bonus_diagnostic(cs, test, cfg.search);
    std::vector<double> bonuses;
    for (const BonusPoint& p : points) bonuses.push_back(p.bonus);
    curve.push_back({n, mean_of(bonuses), sample_std(bonuses)});
  }
  return curve;
}

Matrix template_vectors(const Representation& rep, const std::vector<std::vector<Input>>& groups) {
  Matrix T(output_dim(rep), static_cast<Eigen::Index>(groups.size()));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw InputError("template_vectors: group " + std::to_string(g) + " is empty");
    Vector sum = Vector::Zero(output_dim(rep));
    for (const Input& x : groups[g]) sum += represent(rep, x);
    T.col(static_cast<Eigen::Index>(g)) = sum / static_cast<double>(groups[g].size());
  }
  return T;
}

Matrix kernel_matrix(const Representation& rep, const std::vector<std::vector<Input>>& groups) {
  const Matrix T = template_vectors(rep, groups);
  return T.transpose() * T;
}

double diagonal_dominance(const Matrix& C) {
  if (C.rows() != C.cols()) throw InputError("diagonal_dominance: matrix must be square");
  const Eigen::Index n = C.rows();
  if (n < 2) return 0.0;
  int hits = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && C(i, i) > C(i, j)) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(n * (n - 1));
}

Input tuple_input(std::span<const Input> per_task) {
  Eigen::Index len = 0;
  for (const Input& x : per_task) len += x.size();
  Input out(len);
  Eigen::Index at = 0;
  for (const Input& x : per_task) {
    out.segment(at, x.size()) = x;
    at += x.size();
  }
  return out;
}

ScalarClass scalarize(std::span<const MultiheadFunction> members,
                      const std::vector<std::vector<Input>>& universes) {
  if (members.empty()) throw InputError("scalarize: no members");
  const int M = members.front().tasks();
  std::vector<std::vector<Input>> per_task = universes;
  if (per_task.size() == 1 && M > 1) per_task.assign(static_cast<std::size_t>(M), universes.front());
  if (static_cast<int>(per_task.size()) != M) throw InputError("scalarize: one universe per task required");

  std::size_t tuples = 1;
  for (const auto& u : per_task) {
    if (u.empty()) throw InputError("scalarize: empty universe");
    tuples *= u.size();
  }
  ScalarClass out;
  out.values.resize(static_cast<Eigen::Index>(members.size()), static_cast<Eigen::Index>(tuples));

  // Per-task head values, then sums over every tuple (odometer order).
  std::vector<Matrix> head(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    const auto& u = per_task[static_cast<std::size_t>(i)];
    head[static_cast<std::size_t>(i)].resize(static_cast<Eigen::Index>(members.size()),
                                             static_cast<Eigen::Index>(u.size()));
    for (std::size_t m = 0; m < members.size(); ++m) {
      for (std::size_t j = 0; j < u.size(); ++j) {
        head[static_cast<std::size_t>(i)](static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) =
            evaluate(members[m], u[j], i);
      }
    }
  }
  std::vector<std::size_t> digit(static_cast<std::size_t>(M), 0);
  for (std::size_t c = 0; c < tuples; ++c) {
    std::vector<Input> xs;
    for (int i = 0; i < M; ++i) xs.push_back(per_task[static_cast<std::size_t>(i)][digit[static_cast<std::size_t>(i)]]);
    out.inputs.push_back(tuple_input(xs));
    for (std::size_t m = 0; m < members.size(); ++m) {
      double g = 0.0;
      for (int i = 0; i < M; ++i) {
        g += head[static_cast<std::size_t>(i)](static_cast<Eigen::Index>(m),
                                               static_cast<Eigen::Index>(digit[static_cast<std::size_t>(i)]));
      }
      out.values(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) = g;
    }
    for (int i = M - 1; i >= 0; --i) {
      if (++digit[static_cast<std::size_t>(i)] < per_task[static_cast<std::size_t>(i)].size()) break;
      digit[static_cast<std::size_t>(i)] = 0;
    }
  }
  return out;
}

ScalarClass scalarize(const FunctionClass& cls, const std::vector<std::vector<Input>>& universes) {
  if (cls.kind() != ClassKind::Finite) throw InputError("scalarize: finite classes only");
  return scalarize(std::span<const MultiheadFunction>(cls.members()), universes);
}

AuditReport width_count_audit(std::span<const double> widths, int M, double beta_T,
                              const ScalarClass& cls, std::span<const double> eps_grid,
                              EluderOptions options) {
  if (M < 1) throw InputError("width_count_audit: M must be positive");
  if (!(beta_T >= 0.0)) throw DomainError("width_count_audit: beta_T must be >= 0");
  for (double w : widths) {
    if (!std::isfinite(w)) throw InputError("width_count_audit: widths must be finite");
  }
  AuditReport report;
  for (double eps : eps_grid) {
    if (!(eps > 0.0)) throw DomainError("width_count_audit: eps must be positive");
    AuditRow row;
    row.eps = eps;
    row.count = static_cast<int>(
        std::count_if(widths.begin(), widths.end(), [eps](double w) { return w > eps; }));
    const EluderResult dim = eluder_dimension_search(cls, eps, options);
    row.eluder_dimension = dim.dimension;
    row.eluder_exact = dim.exact;
    row.bound = (4.0 * M * beta_T / (eps * eps) + 1.0) * dim.dimension;
    row.pass = row.count <= row.bound;
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

std::vector<RegretCheckpoint> aggregate_regret(const std::vector<std::vector<double>>& curves,
                                               std::span<const int> checkpoints) {
  std::vector<RegretCheckpoint> out;
  for (int t : checkpoints) {
    std::vector<double> values;
    for (const auto& c : curves) {
      if (t < 1 || t > static_cast<int>(c.size())) {
        throw InputError("aggregate_regret: checkpoint " + std::to_string(t) + " beyond a curve");
      }
      values.push_back(c[static_cast<std::size_t>(t - 1)]);
    }
    out.push_back({t, mean_of(values), sample_std(values), static_cast<int>(values.size())});
  }
  return out;
}

}  // namespace gfucb
