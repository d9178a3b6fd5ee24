#include "gfucb/bandit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "gfucb/errors.hpp"

namespace gfucb {

namespace {

// First `count` entries of a uniformly shuffled 0..n-1.
std::vector<int> draw_distinct(Rng& rng, int n, int count) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int j = 0; j < count; ++j) {
    const auto pick = static_cast<std::size_t>(j) + rng.index(static_cast<std::size_t>(n - j));
    std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

std::vector<int> default_ids(std::vector<int> ids, int tasks) {
  if (ids.empty()) {
    ids.resize(static_cast<std::size_t>(tasks));
    std::iota(ids.begin(), ids.end(), 0);
  }
  if (static_cast<int>(ids.size()) != tasks) throw InputError("one task id per task required");
  return ids;
}

void make_streams(std::uint64_t seed, const std::vector<int>& ids, std::vector<Rng>& context,
                  std::vector<Rng>& noise) {
  context.clear();
  noise.clear();
  const Rng root(seed);
  for (int id : ids) {
    context.push_back(root.derive("context", static_cast<std::uint64_t>(id)));
    noise.push_back(root.derive("noise", static_cast<std::uint64_t>(id)));
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

StepOutcome step_env(BanditEnv& env, const Round& round, std::span<const int> actions) {
  if (static_cast<int>(actions.size()) != round.tasks()) {
    throw InputError("step_env: one action per task required");
  }
  StepOutcome out;
  for (int i = 0; i < round.tasks(); ++i) {
    const auto& means = round.means[static_cast<std::size_t>(i)];
    const int a = actions[static_cast<std::size_t>(i)];
    if (a < 0 || a >= static_cast<int>(means.size())) {
      throw InputError("step_env: action " + std::to_string(a) + " invalid for task " +
                       std::to_string(i));
    }
    const double best = *std::max_element(means.begin(), means.end());
    const double mean = means[static_cast<std::size_t>(a)];
    out.rewards.push_back(mean + env.noise(i));
    out.regrets.push_back(best - mean);
  }
  return out;
}

FiniteBanditEnv::FiniteBanditEnv(MultiheadFunction truth, std::vector<std::vector<Input>> universes,
                                 int K, double noise_sigma, std::vector<int> task_ids)
    : truth_(std::move(truth)), universes_(std::move(universes)), K_(K), sigma_(noise_sigma) {
  if (universes_.size() == 1 && truth_.tasks() > 1) {
    universes_.assign(static_cast<std::size_t>(truth_.tasks()), universes_.front());
  }
  if (static_cast<int>(universes_.size()) != truth_.tasks()) {
    throw InputError("FiniteBanditEnv: one input universe per task required");
  }
  for (const auto& u : universes_) {
    if (K_ < 1 || K_ > static_cast<int>(u.size())) {
      throw InputError("FiniteBanditEnv: K must lie in [1, universe size]");
    }
  }
  if (noise_sigma < 0.0) throw InputError("FiniteBanditEnv: negative noise level");
  ids_ = default_ids(std::move(task_ids), truth_.tasks());
  reset(0);
}

void FiniteBanditEnv::reset(std::uint64_t seed) { make_streams(seed, ids_, context_, noise_); }

Round FiniteBanditEnv::next_round() {
  Round r;
  for (int i = 0; i < tasks(); ++i) {
    const auto& u = universes_[static_cast<std::size_t>(i)];
    const auto picks = draw_distinct(context_[static_cast<std::size_t>(i)],
                                     static_cast<int>(u.size()), K_);
    std::vector<Input> xs;
    std::vector<double> means;
    for (int p : picks) {
      xs.push_back(u[static_cast<std::size_t>(p)]);
      means.push_back(evaluate(truth_, xs.back(), i));
    }
    r.actions.push_back(std::move(xs));
    r.means.push_back(std::move(means));
    r.labels.push_back(picks);
  }
  return r;
}

double FiniteBanditEnv::noise(int task) {
  return sigma_ * noise_.at(static_cast<std::size_t>(task)).normal();
}

FiniteInstance make_finite_instance(const FiniteInstanceConfig& cfg) {
  if (cfg.tasks < 1 || cfg.k < 1 || cfg.input_dim < 1 || cfg.universe_size < 1 ||
      cfg.representations < 1 || cfg.heads_per_rep < 1) {
    throw InputError("make_finite_instance: sizes must be positive");
  }
  const Rng root(cfg.seed);
  Rng input_rng = root.derive("inputs");
  std::vector<std::vector<Input>> universes;
  std::vector<Input> keys;
  for (int i = 0; i < cfg.tasks; ++i) {
    std::vector<Input> u;
    for (int j = 0; j < cfg.universe_size; ++j) {
      Input x(cfg.input_dim);
      for (int d = 0; d < cfg.input_dim; ++d) x(d) = input_rng.normal();
      u.push_back(x);
      keys.push_back(x);
    }
    universes.push_back(std::move(u));
  }

  Rng rep_rng = root.derive("representations");
  Rng head_rng = root.derive("heads");
  std::vector<std::shared_ptr<const Representation>> reps;
  std::vector<MultiheadFunction> members;
  const double bound = std::sqrt(static_cast<double>(cfg.k));
  for (int r = 0; r < cfg.representations; ++r) {
    Matrix values(cfg.k, static_cast<Eigen::Index>(keys.size()));
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      Vector v(cfg.k);
      for (int m = 0; m < cfg.k; ++m) v(m) = rep_rng.normal();
      values.col(j) = v / v.norm() * rep_rng.uniform(0.5, 1.0);
    }
    reps.push_back(std::make_shared<const Representation>(TableRep(keys, values)));
    for (int h = 0; h < cfg.heads_per_rep; ++h) {
      Matrix W(cfg.k, cfg.tasks);
      for (Eigen::Index e = 0; e < W.size(); ++e) W.data()[e] = cfg.head_scale * head_rng.normal();
      project_heads(W, bound);
      members.emplace_back(reps.back(), W);
    }
  }
  Rng pick = root.derive("truth");
  const int truth_index = static_cast<int>(pick.index(members.size()));
  MultiheadFunction truth = members[static_cast<std::size_t>(truth_index)];
  return {FunctionClass::finite(std::move(reps), std::move(members), bound), std::move(truth),
          truth_index, std::move(universes)};
}

DigitWorld make_digit_world(const DigitWorldConfig& cfg) {
  if (cfg.dim < 1 || cfg.styles < 1) {
    throw InputError("make_digit_world: dimension and style count must be positive");
  }
  DigitWorld w;
  w.styles = cfg.styles;
  w.observation_noise = cfg.observation_noise;
  w.reward_noise = cfg.reward_noise;
  Rng proto(cfg.prototype_seed);
  w.prototypes.resize(cfg.dim, kDigits * cfg.styles);
  for (int j = 0; j < w.prototypes.cols(); ++j) {
    Vector v(cfg.dim);
    for (int d = 0; d < cfg.dim; ++d) v(d) = proto.normal();
    w.prototypes.col(j) = v / v.norm();
  }
  Rng maps(cfg.map_seed);
  w.maps.resize(kDigits, kDigits);
  if (cfg.map_rank > 0) {
    Matrix base(cfg.map_rank, kDigits);
    for (Eigen::Index l = 0; l < base.rows(); ++l) {
      for (int j = 0; j < kDigits; ++j) base(l, j) = maps.uniform();
    }
    for (int i = 0; i < kDigits; ++i) {
      Vector a(cfg.map_rank);
      for (Eigen::Index l = 0; l < a.size(); ++l) a(l) = -std::log(1.0 - maps.uniform());
      w.maps.row(i) = (a / a.sum()).transpose() * base;
    }
    return w;
  }
  const auto best = draw_distinct(maps, kDigits, kDigits);
  for (int i = 0; i < kDigits; ++i) {
    for (int j = 0; j < kDigits; ++j) w.maps(i, j) = maps.uniform();
    Eigen::Index top = 0;
    w.maps.row(i).maxCoeff(&top);
    std::swap(w.maps(i, top), w.maps(i, best[static_cast<std::size_t>(i)]));
  }
  return w;
}

DigitWorld with_linear_maps(DigitWorld world, int tasks) {
  world.maps.resize(tasks, kDigits);
  for (int i = 0; i < tasks; ++i) {
    for (int j = 0; j < kDigits; ++j) world.maps(i, j) = j / 10.0;
  }
  return world;
}

Input digit_image(const DigitWorld& world, int digit, Rng& rng) {
  const int style = world.styles > 1 ? static_cast<int>(rng.index(static_cast<std::size_t>(world.styles))) : 0;
  Input x = world.prototypes.col(digit * world.styles + style);
  for (Eigen::Index d = 0; d < x.size(); ++d) x(d) += world.observation_noise * rng.normal();
  return x;
}

DigitBanditEnv::DigitBanditEnv(std::shared_ptr<const DigitWorld> world, std::vector<int> task_ids,
                               int K)
    : world_(std::move(world)), ids_(std::move(task_ids)), K_(K) {
  if (!world_) throw InputError("DigitBanditEnv: null world");
  if (ids_.empty()) throw InputError("DigitBanditEnv: at least one task required");
  for (int id : ids_) {
    if (id < 0 || id >= world_->task_count()) throw InputError("DigitBanditEnv: bad task id");
  }
  if (K_ < 1 || K_ > kDigits) throw InputError("DigitBanditEnv: K must lie in [1, 10]");
  reset(0);
}

void DigitBanditEnv::reset(std::uint64_t seed) { make_streams(seed, ids_, context_, noise_); }

Round DigitBanditEnv::next_round() {
  Round r;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    auto& rng = context_[i];
    const auto digits = draw_distinct(rng, kDigits, K_);
    std::vector<Input> xs;
    std::vector<double> means;
    for (int d : digits) {
      xs.push_back(digit_image(*world_, d, rng));
      means.push_back(world_->maps(ids_[i], d));
    }
    r.actions.push_back(std::move(xs));
    r.means.push_back(std::move(means));
    r.labels.push_back(digits);
  }
  return r;
}

double DigitBanditEnv::noise(int task) {
  return world_->reward_noise * noise_.at(static_cast<std::size_t>(task)).normal();
}

namespace {

void check_compatible(const BanditEnv& env, const FunctionClass& cls) {
  if (cls.tasks() != env.tasks()) throw InputError("class and environment disagree on M");
  if (cls.input_dim() != env.input_dim()) {
    throw InputError("class and environment disagree on the input dimension");
  }
}

}  // namespace

RunResult run_gfucb(BanditEnv& env, const FunctionClass& cls, const GfucbConfig& cfg) {
  check_compatible(env, cls);
  if (cfg.T < 1) throw InputError("run_gfucb: T must be positive");
  env.reset(cfg.env_seed);
  const int M = env.tasks();
  const bool finite = cls.kind() == ClassKind::Finite;
  RunResult result;
  result.log = SampleLog(M);
  SampleLog& log = result.log;
  std::optional<MultiheadFunction> center;
  if (!finite) center = cls.initialize(derive_seed(cfg.seed, "init"));

  double cum = 0.0;
  for (int t = 1; t <= cfg.T; ++t) {
    const auto start = std::chrono::steady_clock::now();
    const Round round = env.next_round();
    if (finite) {
      center = solve_finite(cls, log);
    } else {
      TrainConfig tc = cfg.train;
      tc.seed = derive_seed(cfg.seed, "train", static_cast<std::uint64_t>(t));
      center = solve_twolayer(cls, log, tc, center).f;
    }
    const double radius = cfg.beta.radius(cls, t, cfg.T);
    const ConfidenceSet cs(cls, *center, radius, log, cfg.include_center);
    const Selection sel = optimistic_select(cs, round.actions, cfg.search);

    EpisodeRecord rec;
    rec.t = t;
    rec.actions = sel.actions;
    for (int i = 0; i < M; ++i) {
      rec.inputs.push_back(round.actions[static_cast<std::size_t>(i)]
                                        [static_cast<std::size_t>(sel.actions[static_cast<std::size_t>(i)])]);
    }
    rec.radius = radius;
    rec.optimistic_value = sel.value;
    if (cfg.record_width) rec.width = width(cs, rec.inputs, cfg.search);
    if (finite) {
      std::vector<MultiheadFunction> members;
      for (std::size_t c = 0; c < cs.candidate_members().size(); ++c) {
        if (cs.candidate_members()[c] >= 0) members.push_back(cs.candidates()[c]);
      }
      rec.class_width = width_over(members, rec.inputs);
    }
    double bonus = 0.0;
    for (int i = 0; i < M; ++i) {
      bonus += sel.values[static_cast<std::size_t>(i)] -
               evaluate(*center, rec.inputs[static_cast<std::size_t>(i)], i);
    }
    rec.bonus_mean = bonus / M;
    if (const MultiheadFunction* truth = env.truth(); truth && truth->tasks() == M) {
      rec.truth_contained = cs.contains(*truth) ? 1 : 0;
    }
    if (cfg.on_step) cfg.on_step(t, cs);

    const StepOutcome out = step_env(env, round, sel.actions);
    log.append_round(rec.inputs, out.rewards);
    rec.regrets = out.regrets;
    rec.inst_regret = std::accumulate(out.regrets.begin(), out.regrets.end(), 0.0);
    cum += rec.inst_regret;
    rec.cum_regret = cum;
    rec.wall_ms = elapsed_ms(start);
    result.records.push_back(std::move(rec));
  }
  result.center = center;
  return result;
}

RunResult run_eps_greedy(BanditEnv& env, const FunctionClass& cls, const EpsGreedyConfig& cfg) {
  check_compatible(env, cls);
  if (cfg.T < 1) throw InputError("run_eps_greedy: T must be positive");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) {
    throw InputError("run_eps_greedy: epsilon must lie in [0, 1]");
  }
  env.reset(cfg.env_seed);
  const int M = env.tasks();
  const bool finite = cls.kind() == ClassKind::Finite;
  std::vector<FunctionClass> classes;
  std::vector<SampleLog> logs;
  std::vector<std::optional<MultiheadFunction>> models;
  std::vector<Rng> explore;
  for (int i = 0; i < M; ++i) {
    classes.push_back(cls.single_task(i));
    logs.emplace_back(1);
    const auto idx = static_cast<std::uint64_t>(i);
    models.push_back(finite ? std::nullopt
                            : std::optional(classes.back().initialize(derive_seed(cfg.seed, "init", idx))));
    explore.emplace_back(derive_seed(cfg.seed, "explore", idx));
  }

  RunResult result;
  result.log = SampleLog(M);
  double cum = 0.0;
  for (int t = 1; t <= cfg.T; ++t) {
    const auto start = std::chrono::steady_clock::now();
    const Round round = env.next_round();
    EpisodeRecord rec;
    rec.t = t;
    for (int i = 0; i < M; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (finite) {
        models[ui] = solve_finite(classes[ui], logs[ui]);
      } else {
        TrainConfig tc = cfg.train;
        tc.seed = derive_seed(cfg.seed, "train", static_cast<std::uint64_t>(t) * 1000 + ui);
        models[ui] = solve_twolayer(classes[ui], logs[ui], tc, models[ui]).f;
      }
      const auto& acts = round.actions[ui];
      int choice = 0;
      if (explore[ui].bernoulli(cfg.epsilon)) {
        choice = static_cast<int>(explore[ui].index(acts.size()));
      } else {
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < acts.size(); ++a) {
          const double v = evaluate(*models[ui], acts[a], 0);
          if (v > top) {
            top = v;
            choice = static_cast<int>(a);
          }
        }
      }
      rec.actions.push_back(choice);
      rec.inputs.push_back(acts[static_cast<std::size_t>(choice)]);
    }
    const StepOutcome out = step_env(env, round, rec.actions);
    for (int i = 0; i < M; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      logs[ui].append_round(std::span(&rec.inputs[ui], 1), std::span(&out.rewards[ui], 1));
    }
    result.log.append_round(rec.inputs, out.rewards);
    rec.regrets = out.regrets;
    rec.inst_regret = std::accumulate(out.regrets.begin(), out.regrets.end(), 0.0);
    cum += rec.inst_regret;
    rec.cum_regret = cum;
    rec.wall_ms = elapsed_ms(start);
    result.records.push_back(std::move(rec));
  }
  return result;
}

}  // namespace gfucb
