#include "gfucb/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "gfucb/erm.hpp"
#include "gfucb/errors.hpp"

namespace gfucb {

namespace {

constexpr double kStochasticTol = 1e-12;
// Slack for comparing an optimistic value with V* computed along a different
// arithmetic path.
constexpr double kOptimismSlack = 1e-9;
constexpr long long kChebyshevBudget = 20'000'000;
constexpr long long kJointStateLimit = 1 << 16;

// Uniform draw from the simplex: normalized standard exponentials.
Vector simplex_draw(int n, Rng& rng) {
  Vector v(n);
  for (int j = 0; j < n; ++j) v(j) = -std::log(1.0 - rng.uniform());
  return v / v.sum();
}

long long binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  long long c = 1;
  for (int j = 1; j <= r; ++j) {
    c = c * (n - r + j) / j;
    if (c > kChebyshevBudget) return kChebyshevBudget + 1;
  }
  return c;
}

}  // namespace

LinearMdpEnv::LinearMdpEnv(int states, int actions, Matrix features,
                           std::vector<Matrix> reward_heads,
                           std::vector<std::vector<Matrix>> transitions, double noise)
    : S_(states),
      A_(actions),
      features_(std::move(features)),
      reward_heads_(std::move(reward_heads)),
      transitions_(std::move(transitions)),
      noise_(noise) {
  if (S_ < 1 || A_ < 1) throw InputError("mdp: need at least one state and one action");
  if (reward_heads_.empty()) throw InputError("mdp: horizon must be positive");
  if (features_.cols() != S_ * A_) throw InputError("mdp: one feature column per (s, a) required");
  if (!(noise_ >= 0.0 && noise_ <= 1.0)) throw DomainError("mdp: noise must lie in [0, 1]");
  const int M = static_cast<int>(reward_heads_.front().cols());
  if (M < 1) throw InputError("mdp: at least one task required");
  if (static_cast<int>(transitions_.size()) != horizon()) {
    throw InputError("mdp: one transition set per level required");
  }
  for (int h = 0; h < horizon(); ++h) {
    const Matrix& theta = reward_heads_[static_cast<std::size_t>(h)];
    if (theta.rows() != features_.rows() || theta.cols() != M) {
      throw InputError("mdp: reward heads must be k x M at every level");
    }
    const auto& level = transitions_[static_cast<std::size_t>(h)];
    if (static_cast<int>(level.size()) != M) throw InputError("mdp: one kernel per task required");
    for (const Matrix& P : level) {
      if (P.rows() != S_ * A_ || P.cols() != S_) {
        throw InputError("mdp: kernels must be (S*A) x S");
      }
      if (P.minCoeff() < 0.0) throw InputError("mdp: negative transition probability");
      for (int r = 0; r < P.rows(); ++r) {
        if (std::abs(P.row(r).sum() - 1.0) > kStochasticTol) {
          throw InputError("mdp: kernel row " + std::to_string(r) + " does not sum to 1");
        }
      }
    }
  }
  solve_optimal();
  reset(0);
}

LinearMdpEnv LinearMdpEnv::zero_ibe(const LinearMdpConfig& cfg) {
  if (cfg.states < 1 || cfg.actions < 1 || cfg.horizon < 1 || cfg.k < 1 || cfg.tasks < 1) {
    throw InputError("zero_ibe: sizes must be positive");
  }
  const Rng root(cfg.seed);
  Rng feature_rng = root.derive("features");
  const int n = cfg.states * cfg.actions;
  Matrix phi(cfg.k, n);
  for (int j = 0; j < n; ++j) phi.col(j) = simplex_draw(cfg.k, feature_rng);

  std::vector<Matrix> theta;
  std::vector<std::vector<Matrix>> kernels;
  std::vector<std::vector<Matrix>> mu;
  for (int h = 0; h < cfg.horizon; ++h) {
    Rng level_rng = root.derive("level", static_cast<std::uint64_t>(h));
    Matrix th(cfg.k, cfg.tasks);
    for (int i = 0; i < cfg.tasks; ++i) {
      for (int m = 0; m < cfg.k; ++m) th(m, i) = level_rng.uniform(0.0, 1.0 / cfg.horizon);
    }
    theta.push_back(th);
    std::vector<Matrix> level_kernels;
    std::vector<Matrix> level_mu;
    for (int i = 0; i < cfg.tasks; ++i) {
      Matrix m(cfg.k, cfg.states);
      for (int r = 0; r < cfg.k; ++r) m.row(r) = simplex_draw(cfg.states, level_rng).transpose();
      Matrix P = phi.transpose() * m;
      // Remove rounding drift so every row sums to 1 within tolerance.
      for (int r = 0; r < P.rows(); ++r) P.row(r) /= P.row(r).sum();
      level_kernels.push_back(std::move(P));
      level_mu.push_back(std::move(m));
    }
    kernels.push_back(std::move(level_kernels));
    mu.push_back(std::move(level_mu));
  }
  LinearMdpEnv env(cfg.states, cfg.actions, std::move(phi), std::move(theta), std::move(kernels),
                   cfg.noise);
  env.mu_ = std::move(mu);
  return env;
}

Input LinearMdpEnv::input(int s, int a) const {
  if (s < 0 || s >= S_ || a < 0 || a >= A_) throw InputError("mdp: state or action out of range");
  Input x = Input::Zero(S_ + A_);
  x(s) = 1.0;
  x(S_ + a) = 1.0;
  return x;
}

std::vector<Input> LinearMdpEnv::all_inputs() const {
  std::vector<Input> xs;
  for (int s = 0; s < S_; ++s) {
    for (int a = 0; a < A_; ++a) xs.push_back(input(s, a));
  }
  return xs;
}

std::shared_ptr<const Representation> LinearMdpEnv::true_representation() const {
  return std::make_shared<const Representation>(TableRep(all_inputs(), features_));
}

double LinearMdpEnv::mean_reward(int h, int task, int s, int a) const {
  return features_.col(pair_index(s, a))
      .dot(reward_heads_.at(static_cast<std::size_t>(h)).col(task));
}

const Matrix& LinearMdpEnv::transition(int h, int task) const {
  return transitions_.at(static_cast<std::size_t>(h)).at(static_cast<std::size_t>(task));
}

void LinearMdpEnv::solve_optimal() {
  const int H = horizon();
  const int M = tasks();
  v_star_.assign(static_cast<std::size_t>(H + 1),
                 std::vector<Vector>(static_cast<std::size_t>(M), Vector::Zero(S_)));
  for (int h = H - 1; h >= 0; --h) {
    for (int i = 0; i < M; ++i) {
      const Matrix q = optimal_q(h, i);
      v_star_[static_cast<std::size_t>(h)][static_cast<std::size_t>(i)] = q.rowwise().maxCoeff();
    }
  }
}

Matrix LinearMdpEnv::optimal_q(int h, int task) const {
  const Vector& next = v_star_.at(static_cast<std::size_t>(h + 1)).at(static_cast<std::size_t>(task));
  const Vector expect = transition(h, task) * next;
  Matrix q(S_, A_);
  for (int s = 0; s < S_; ++s) {
    for (int a = 0; a < A_; ++a) q(s, a) = mean_reward(h, task, s, a) + expect(pair_index(s, a));
  }
  return q;
}

Matrix LinearMdpEnv::optimal_heads(int h) const {
  if (mu_.empty()) throw InputError("optimal_heads: the kernel factorization is unknown");
  Matrix w = reward_heads_.at(static_cast<std::size_t>(h));
  for (int i = 0; i < tasks(); ++i) {
    w.col(i) += mu_[static_cast<std::size_t>(h)][static_cast<std::size_t>(i)] *
                v_star_[static_cast<std::size_t>(h + 1)][static_cast<std::size_t>(i)];
  }
  return w;
}

void LinearMdpEnv::reset(std::uint64_t seed) {
  context_.clear();
  noise_rng_.clear();
  transition_rng_.clear();
  const Rng root(seed);
  for (int i = 0; i < tasks(); ++i) {
    context_.push_back(root.derive("context", static_cast<std::uint64_t>(i)));
    noise_rng_.push_back(root.derive("noise", static_cast<std::uint64_t>(i)));
    transition_rng_.push_back(root.derive("transition", static_cast<std::uint64_t>(i)));
  }
}

int LinearMdpEnv::draw_initial_state(int task) {
  return static_cast<int>(context_.at(static_cast<std::size_t>(task)).index(static_cast<std::size_t>(S_)));
}

double LinearMdpEnv::draw_noise(int task) {
  return noise_rng_.at(static_cast<std::size_t>(task)).uniform(-noise_, noise_);
}

int LinearMdpEnv::draw_next_state(int h, int task, int s, int a) {
  const auto row = transition(h, task).row(pair_index(s, a));
  const double u = transition_rng_.at(static_cast<std::size_t>(task)).uniform();
  double acc = 0.0;
  for (int j = 0; j < S_; ++j) {
    acc += row(j);
    if (u < acc) return j;
  }
  // u landed in the rounding gap above the last cumulative sum.
  for (int j = S_ - 1; j >= 0; --j) {
    if (row(j) > 0.0) return j;
  }
  return S_ - 1;
}

std::vector<FunctionClass> make_level_classes(const LinearMdpEnv& env, const LevelClassConfig& cfg) {
  if (cfg.distractors < 0 || cfg.heads_per_rep < 0 || !(cfg.head_noise >= 0.0)) {
    throw InputError("make_level_classes: counts and noise must be non-negative");
  }
  const int k = env.k();
  const int M = env.tasks();
  const double bound = std::sqrt(static_cast<double>(k));
  const ValueRange range{0.0, 1.0};
  const Rng root(cfg.seed);
  Rng table_rng = root.derive("tables");
  std::vector<std::shared_ptr<const Representation>> reps{env.true_representation()};
  for (int d = 0; d < cfg.distractors; ++d) {
    Matrix values(k, env.states() * env.actions());
    for (Eigen::Index j = 0; j < values.cols(); ++j) values.col(j) = simplex_draw(k, table_rng);
    reps.push_back(std::make_shared<const Representation>(TableRep(env.all_inputs(), values)));
  }

  std::vector<FunctionClass> classes;
  for (int h = 0; h < env.horizon(); ++h) {
    Rng head_rng = root.derive("heads", static_cast<std::uint64_t>(h));
    const Matrix exact = env.optimal_heads(h);
    std::vector<MultiheadFunction> members{MultiheadFunction(reps.front(), exact, range)};
    for (int c = 0; c < cfg.heads_per_rep; ++c) {
      Matrix W = exact;
      for (Eigen::Index e = 0; e < W.size(); ++e) W.data()[e] += cfg.head_noise * head_rng.normal();
      project_heads(W, bound);
      members.emplace_back(reps.front(), W, range);
    }
    for (std::size_t d = 1; d < reps.size(); ++d) {
      for (int c = 0; c < cfg.heads_per_rep; ++c) {
        Matrix W(k, M);
        for (Eigen::Index e = 0; e < W.size(); ++e) W.data()[e] = head_rng.uniform();
        project_heads(W, bound);
        members.emplace_back(reps[d], W, range);
      }
    }
    classes.push_back(FunctionClass::finite(reps, std::move(members), bound));
  }
  return classes;
}

double chebyshev_fit(const Matrix& A, const Vector& b) {
  if (A.rows() != b.size()) throw InputError("chebyshev_fit: A and b disagree on rows");
  const int n = static_cast<int>(b.size());
  if (n == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU);
  svd.setThreshold(1e-12);
  const int r = static_cast<int>(svd.rank());
  if (r == 0) return b.cwiseAbs().maxCoeff();
  const Matrix U = svd.matrixU().leftCols(r);

  // Variables (c, z): minimize z subject to +-(U_j c - b_j) <= z. Constraint
  // row 2j is (U_j, -1) <= b_j and row 2j+1 is (-U_j, -1) <= -b_j.
  const int m = 2 * n;
  Matrix G(m, r + 1);
  Vector rhs(m);
  for (int j = 0; j < n; ++j) {
    G.row(2 * j) << U.row(j), -1.0;
    G.row(2 * j + 1) << -U.row(j), -1.0;
    rhs(2 * j) = b(j);
    rhs(2 * j + 1) = -b(j);
  }
  const long long combos = binomial(m, r + 1);
  if (combos > kChebyshevBudget) {
    throw SearchTruncated("chebyshev_fit: vertex enumeration exceeds the budget", combos, -1);
  }
  const double tol = 1e-9 * (1.0 + b.cwiseAbs().maxCoeff());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(r + 1));
  std::iota(pick.begin(), pick.end(), 0);
  Matrix sub(r + 1, r + 1);
  Vector sub_rhs(r + 1);
  while (true) {
    for (int q = 0; q <= r; ++q) {
      sub.row(q) = G.row(pick[static_cast<std::size_t>(q)]);
      sub_rhs(q) = rhs(pick[static_cast<std::size_t>(q)]);
    }
    Eigen::FullPivLU<Matrix> lu(sub);
    if (lu.isInvertible()) {
      const Vector v = lu.solve(sub_rhs);
      const double z = v(r);
      if (z < best && ((G * v - rhs).array() <= tol).all()) best = z;
    }
    int q = r;
    while (q >= 0 && pick[static_cast<std::size_t>(q)] == m - (r + 1) + q) --q;
    if (q < 0) break;
    ++pick[static_cast<std::size_t>(q)];
    for (int p = q + 1; p <= r; ++p) {
      pick[static_cast<std::size_t>(p)] = pick[static_cast<std::size_t>(p - 1)] + 1;
    }
  }
  return std::max(best, 0.0);
}

double inherent_bellman_error(const LinearMdpEnv& env, const FunctionClass& next,
                              const FunctionClass& approx) {
  for (const FunctionClass* c : {&next, &approx}) {
    if (c->kind() != ClassKind::Finite) throw InputError("inherent_bellman_error: finite classes only");
    if (c->tasks() != env.tasks() || c->input_dim() != env.input_dim()) {
      throw InputError("inherent_bellman_error: class and environment disagree on shape");
    }
  }
  const int S = env.states();
  const int A = env.actions();
  const int M = env.tasks();
  const std::vector<Input> xs = env.all_inputs();

  std::vector<Matrix> designs;
  for (const auto& rep : approx.representations()) {
    Matrix D(static_cast<Eigen::Index>(xs.size()), output_dim(*rep));
    for (std::size_t j = 0; j < xs.size(); ++j) D.row(static_cast<Eigen::Index>(j)) = represent(*rep, xs[j]).transpose();
    designs.push_back(std::move(D));
  }

  double worst = 0.0;
  for (int h = 0; h < env.horizon(); ++h) {
    const bool last = h + 1 == env.horizon();
    const std::size_t n_next = last ? 1 : next.members().size();
    for (std::size_t q = 0; q < n_next; ++q) {
      std::vector<Vector> targets;
      for (int i = 0; i < M; ++i) {
        Vector v = Vector::Zero(S);
        if (!last) {
          const MultiheadFunction& f = next.members()[q];
          for (int s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < A; ++a) best = std::max(best, evaluate(f, env.input(s, a), i));
            v(s) = best;
          }
        }
        const Vector expect = env.transition(h, i) * v;
        Vector b(S * A);
        for (int s = 0; s < S; ++s) {
          for (int a = 0; a < A; ++a) {
            b(env.pair_index(s, a)) = env.mean_reward(h, i, s, a) + expect(env.pair_index(s, a));
          }
        }
        targets.push_back(std::move(b));
      }
      double inf_fit = std::numeric_limits<double>::infinity();
      for (const Matrix& D : designs) {
        double fit = 0.0;
        for (const Vector& b : targets) fit = std::max(fit, chebyshev_fit(D, b));
        inf_fit = std::min(inf_fit, fit);
      }
      worst = std::max(worst, inf_fit);
    }
  }
  return worst;
}

double inherent_bellman_error(const LinearMdpEnv& env, const FunctionClass& cls) {
  return inherent_bellman_error(env, cls, cls);
}

double beta_level(int M, int k, int T, int t, double log_covering, double delta, double ibe) {
  if (M < 1 || k < 1 || T < 1) throw DomainError("beta_level: M, k and T must be positive");
  if (t < 1 || t > T) throw DomainError("beta_level: t must lie in [1, T]");
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("beta_level: delta must lie in (0, 1]");
  if (!(log_covering >= 0.0)) throw DomainError("beta_level: log covering number must be >= 0");
  if (!(ibe >= 0.0)) throw DomainError("beta_level: inherent Bellman error must be >= 0");
  const double mt = static_cast<double>(M) * T;
  const double b1 = std::sqrt(2.0 * M * k + log_covering - std::log(delta)) + 1.0;
  const double b2 = 2.0 * std::sqrt(mt + std::log(2.0 * mt * T / delta));
  const double root = b1 + std::sqrt(mt) * ibe + std::sqrt(b2);
  return root * root;
}

namespace {

// Joint states are encoded in base S with task 0 as the least significant
// digit.
std::vector<int> decode_joint(long long code, int S, int M) {
  std::vector<int> states(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    states[static_cast<std::size_t>(i)] = static_cast<int>(code % S);
    code /= S;
  }
  return states;
}

long long encode_joint(const std::vector<int>& states, int S) {
  long long code = 0;
  for (auto it = states.rbegin(); it != states.rend(); ++it) code = code * S + *it;
  return code;
}

std::vector<std::vector<Input>> action_sets(const LinearMdpEnv& env, const std::vector<int>& states) {
  std::vector<std::vector<Input>> sets;
  for (int s : states) {
    std::vector<Input> xs;
    for (int a = 0; a < env.actions(); ++a) xs.push_back(env.input(s, a));
    sets.push_back(std::move(xs));
  }
  return sets;
}

}  // namespace

std::vector<MdpEpisodeRecord> run_algorithm2(LinearMdpEnv& env,
                                             const std::vector<FunctionClass>& level_classes,
                                             const MdpRunConfig& cfg) {
  const int H = env.horizon();
  const int M = env.tasks();
  const int S = env.states();
  if (cfg.T < 1) throw InputError("run_algorithm2: T must be positive");
  if (level_classes.size() != 1 && static_cast<int>(level_classes.size()) != H) {
    throw InputError("run_algorithm2: pass one class or one class per level");
  }
  for (const FunctionClass& c : level_classes) {
    if (c.tasks() != M || c.input_dim() != env.input_dim()) {
      throw InputError("run_algorithm2: class and environment disagree on shape");
    }
  }
  long long joint_count = 1;
  for (int i = 0; i < M; ++i) {
    joint_count *= S;
    if (joint_count > kJointStateLimit) throw InputError("run_algorithm2: too many joint states");
  }
  auto level_class = [&](int h) -> const FunctionClass& {
    return level_classes.size() == 1 ? level_classes.front()
                                     : level_classes[static_cast<std::size_t>(h)];
  };

  env.reset(cfg.env_seed);
  // Per-level history: inputs, observed rewards and next states, per task.
  struct Step {
    std::vector<Input> inputs;
    std::vector<double> rewards;
    std::vector<int> next_states;
  };
  std::vector<std::vector<Step>> history(static_cast<std::size_t>(H));
  const auto& v_star = env.optimal_values();

  std::vector<MdpEpisodeRecord> records;
  double cum = 0.0;
  for (int t = 1; t <= cfg.T; ++t) {
    // Backward pass: fit each level on targets R + max_a center_{h+1}.
    std::vector<std::optional<MultiheadFunction>> centers(static_cast<std::size_t>(H));
    std::vector<SampleLog> logs(static_cast<std::size_t>(H), SampleLog(M));
    for (int h = H - 1; h >= 0; --h) {
      SampleLog& log = logs[static_cast<std::size_t>(h)];
      for (const Step& st : history[static_cast<std::size_t>(h)]) {
        std::vector<double> y = st.rewards;
        if (h + 1 < H) {
          const MultiheadFunction& nf = *centers[static_cast<std::size_t>(h + 1)];
          for (int i = 0; i < M; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < env.actions(); ++a) {
              best = std::max(best, evaluate(nf, env.input(st.next_states[static_cast<std::size_t>(i)], a), i));
            }
            y[static_cast<std::size_t>(i)] += best;
          }
        }
        log.append_round(st.inputs, y);
      }
      centers[static_cast<std::size_t>(h)] = solve_mdp_level(level_class(h), log);
    }

    MdpEpisodeRecord rec;
    rec.episode = t;
    std::vector<ConfidenceSet> sets;
    for (int h = 0; h < H; ++h) {
      const FunctionClass& cls = level_class(h);
      const double radius =
          cfg.radius ? cfg.radius(t, h)
                     : beta_level(M, cls.k(), cfg.T, t, cls.log_covering(1.0 / (cls.k() * M * cfg.T)),
                                  cfg.delta, cfg.ibe);
      rec.radius.push_back(radius);
      sets.emplace_back(cls, *centers[static_cast<std::size_t>(h)], radius,
                        logs[static_cast<std::size_t>(h)], cfg.include_center);
    }

    // The optimistic policy, evaluated lazily per (level, joint state).
    std::vector<std::map<long long, Selection>> policy(static_cast<std::size_t>(H));
    auto select = [&](int h, const std::vector<int>& states) -> const Selection& {
      auto& cache = policy[static_cast<std::size_t>(h)];
      const long long code = encode_joint(states, S);
      auto it = cache.find(code);
      if (it == cache.end()) {
        it = cache.emplace(code, optimistic_select(sets[static_cast<std::size_t>(h)],
                                                   action_sets(env, states)))
                 .first;
      }
      return it->second;
    };

    // Forward pass on the environment.
    std::vector<int> states(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) states[static_cast<std::size_t>(i)] = env.draw_initial_state(i);
    const std::vector<int> initial = states;
    for (int h = 0; h < H; ++h) {
      const Selection& sel = select(h, states);
      if (h == 0) {
        rec.optimistic_value = sel.value;
        double bonus = 0.0;
        for (int i = 0; i < M; ++i) {
          const Input x = env.input(states[static_cast<std::size_t>(i)], sel.actions[static_cast<std::size_t>(i)]);
          bonus += sel.values[static_cast<std::size_t>(i)] - evaluate(*centers[0], x, i);
        }
        rec.bonus_mean = bonus / M;
      }
      Step st;
      for (int i = 0; i < M; ++i) {
        const int s = states[static_cast<std::size_t>(i)];
        const int a = sel.actions[static_cast<std::size_t>(i)];
        st.inputs.push_back(env.input(s, a));
        st.rewards.push_back(env.mean_reward(h, i, s, a) + env.draw_noise(i));
      }
      rec.states.push_back(states);
      rec.actions.push_back(sel.actions);
      if (h + 1 < H) {
        for (int i = 0; i < M; ++i) {
          const int s = states[static_cast<std::size_t>(i)];
          const int a = sel.actions[static_cast<std::size_t>(i)];
          states[static_cast<std::size_t>(i)] = env.draw_next_state(h, i, s, a);
        }
      }
      st.next_states = states;
      history[static_cast<std::size_t>(h)].push_back(std::move(st));
    }

    // Exact value of the joint policy from the realized initial states.
    std::vector<double> value(static_cast<std::size_t>(joint_count), 0.0);
    for (int h = H - 1; h >= 0; --h) {
      std::vector<double> cur(static_cast<std::size_t>(joint_count), 0.0);
      for (long long code = 0; code < joint_count; ++code) {
        const std::vector<int> js = decode_joint(code, S, M);
        const Selection& sel = select(h, js);
        double v = 0.0;
        for (int i = 0; i < M; ++i) {
          v += env.mean_reward(h, i, js[static_cast<std::size_t>(i)], sel.actions[static_cast<std::size_t>(i)]);
        }
        if (h + 1 < H) {
          // Next-state distribution is a product over tasks.
          for (long long next = 0; next < joint_count; ++next) {
            const std::vector<int> ns = decode_joint(next, S, M);
            double p = 1.0;
            for (int i = 0; i < M && p > 0.0; ++i) {
              const int s = js[static_cast<std::size_t>(i)];
              const int a = sel.actions[static_cast<std::size_t>(i)];
              p *= env.transition(h, i)(env.pair_index(s, a), ns[static_cast<std::size_t>(i)]);
            }
            if (p > 0.0) v += p * value[static_cast<std::size_t>(next)];
          }
        }
        cur[static_cast<std::size_t>(code)] = v;
      }
      value = std::move(cur);
    }
    rec.policy_value = value[static_cast<std::size_t>(encode_joint(initial, S))];
    for (int i = 0; i < M; ++i) {
      rec.optimal_value += v_star[0][static_cast<std::size_t>(i)](initial[static_cast<std::size_t>(i)]);
    }
    rec.regret = rec.optimal_value - rec.policy_value;
    if (!(rec.regret <= static_cast<double>(M) * H + kOptimismSlack)) {
      throw std::logic_error("run_algorithm2: episode regret exceeds M H");
    }
    rec.optimistic = rec.optimistic_value >= rec.optimal_value - M * H * cfg.ibe - kOptimismSlack;
    cum += rec.regret;
    rec.cum_regret = cum;
    records.push_back(std::move(rec));
  }
  return records;
}

InducedBanditEnv::InducedBanditEnv(LinearMdpEnv env) : env_(std::move(env)) {
  if (env_.horizon() != 1) throw InputError("InducedBanditEnv: horizon must be 1");
}

Round InducedBanditEnv::next_round() {
  Round round;
  for (int i = 0; i < env_.tasks(); ++i) {
    const int s = env_.draw_initial_state(i);
    std::vector<Input> xs;
    std::vector<double> means;
    std::vector<int> labels;
    for (int a = 0; a < env_.actions(); ++a) {
      xs.push_back(env_.input(s, a));
      means.push_back(env_.mean_reward(0, i, s, a));
      labels.push_back(a);
    }
    round.actions.push_back(std::move(xs));
    round.means.push_back(std::move(means));
    round.labels.push_back(std::move(labels));
  }
  return round;
}

}  // namespace gfucb
