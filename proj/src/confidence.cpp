#include "gfucb/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gfucb/errors.hpp"
#include "gfucb/two_layer.hpp"

namespace gfucb {

double beta_theoretical(int M, int k, int t, double log_covering, double alpha, double delta) {
  if (M < 1 || k < 1 || t < 1) throw DomainError("beta_theoretical: M, k and t must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("beta_theoretical: delta must lie in (0, 1]");
  if (!(alpha >= 0.0)) throw DomainError("beta_theoretical: alpha must be nonnegative");
  if (!(log_covering >= 0.0)) throw DomainError("beta_theoretical: negative log covering number");
  const double mt = static_cast<double>(M) * t;
  const double tail =
      8.0 * alpha * std::sqrt(mt * k * (mt + std::log(2.0 * M * static_cast<double>(t) * t / delta)));
  return 12.0 * M * k + 12.0 * (log_covering - std::log(delta)) + tail;
}

double beta_practical(double t, double a, double b, double c) {
  const double arg = b * t + c;
  if (!(arg > 1.0)) throw DomainError("beta_practical: b * t + c must exceed 1");
  return a * std::log(arg);
}

double BetaConfig::radius(const FunctionClass& cls, int t, int horizon) const {
  if (t < 1 || horizon < 1) throw DomainError("BetaConfig::radius: steps are 1-based");
  if (mode == Mode::Practical) return beta_practical(t - 1, a, b, c);
  const double a_eff =
      alpha > 0.0 ? alpha : 1.0 / (static_cast<double>(cls.k()) * cls.tasks() * horizon);
  return beta_theoretical(cls.tasks(), cls.k(), t, cls.log_covering(a_eff), a_eff, delta);
}

std::string to_string(BetaConfig::Mode mode) {
  return mode == BetaConfig::Mode::Theoretical ? "theoretical" : "practical";
}

BetaConfig::Mode beta_mode_from_string(const std::string& name) {
  if (name == "theoretical") return BetaConfig::Mode::Theoretical;
  if (name == "practical") return BetaConfig::Mode::Practical;
  throw InputError("unknown beta mode '" + name + "' (expected theoretical or practical)");
}

ConfidenceSet::ConfidenceSet(const FunctionClass& cls, MultiheadFunction center, double radius,
                             const SampleLog& log, bool include_center)
    : cls_(&cls), center_(std::move(center)), radius_(radius), log_(&log) {
  if (!(radius >= 0.0)) throw DomainError("ConfidenceSet: radius must be nonnegative");
  if (center_.tasks() != log.tasks()) throw InputError("ConfidenceSet: center and log disagree on M");
  if (cls.kind() != ClassKind::Finite) return;
  if (include_center) {
    candidates_.push_back(center_);
    candidate_members_.push_back(-1);
  }
  const auto& members = cls.members();
  for (std::size_t m = 0; m < members.size(); ++m) {
    if (contains(members[m])) {
      candidates_.push_back(members[m]);
      candidate_members_.push_back(static_cast<int>(m));
    }
  }
}

bool ConfidenceSet::contains(const MultiheadFunction& f) const {
  return empirical_norm_sq(f, center_, *log_) <= radius_;
}

const std::vector<MultiheadFunction>& ConfidenceSet::candidates() const {
  if (cls_->kind() != ClassKind::Finite) {
    throw InputError("ConfidenceSet::candidates: only finite classes are enumerable");
  }
  if (candidates_.empty()) {
    throw EmptyConfidenceSet("confidence set of radius " + std::to_string(radius_) +
                             " contains no candidate");
  }
  return candidates_;
}

namespace {

void check_per_task(const ConfidenceSet& cs, std::size_t n) {
  if (n != static_cast<std::size_t>(cs.center().tasks())) {
    throw InputError("expected one input per task");
  }
}

double head_sum(const MultiheadFunction& f, std::span<const Input> xs) {
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) s += evaluate(f, xs[i], static_cast<int>(i));
  return s;
}

}  // namespace

SearchResult penalized_search(const ConfidenceSet& cs, std::span<const Input> targets,
                              std::span<const int> target_tasks, double sign,
                              const SearchConfig& cfg) {
  if (cs.cls().kind() != ClassKind::TwoLayer) {
    throw InputError("penalized_search: requires a two-layer class");
  }
  if (targets.size() != target_tasks.size() || targets.empty()) {
    throw InputError("penalized_search: need one task per target");
  }
  if (cfg.iterations < 0 || !(cfg.step_size > 0.0) || !(cfg.lambda > 0.0)) {
    throw InputError("penalized_search: invalid search settings");
  }
  const MultiheadFunction& center = cs.center();
  const TwoLayerNet net(center);
  const ValueRange range = center.range();
  const double radius = cs.radius();
  const double feasible_limit = radius * (1.0 + cfg.tolerance);
  const double divergence_limit = cfg.divergence_factor * radius;

  Batch target_batch;
  target_batch.X.resize(center.input_dim(), static_cast<Eigen::Index>(targets.size()));
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const int task = target_tasks[j];
    if (task < 0 || task >= center.tasks()) throw InputError("penalized_search: bad target task");
    if (targets[j].size() != center.input_dim()) throw InputError("penalized_search: bad target dim");
    target_batch.X.col(static_cast<Eigen::Index>(j)) = targets[j];
    target_batch.task.push_back(task);
  }
  const bool has_log = !cs.log().empty();
  const Batch log_batch = has_log ? make_batch(cs.log()) : Batch{};

  Vector params = net.flatten(center);
  TwoLayerNet::Cache log_cache;
  TwoLayerNet::Cache target_cache;
  Vector center_values;
  if (has_log) {
    net.forward(params, log_batch, log_cache);
    center_values = log_cache.raw.unaryExpr([&](double v) { return range.clip(v); });
  }

  SearchResult best{center, 0.0, 0.0, 0, true};
  Vector best_params = params;
  double best_score = -std::numeric_limits<double>::infinity();
  Vector grad(net.param_count());
  Vector coeff;
  int it = 0;
  for (;; ++it) {
    double dist = 0.0;
    if (has_log) {
      net.forward(params, log_batch, log_cache);
      for (Eigen::Index j = 0; j < log_cache.raw.size(); ++j) {
        const double d = range.clip(log_cache.raw(j)) - center_values(j);
        dist += d * d;
      }
    }
    net.forward(params, target_batch, target_cache);
    double objective = 0.0;
    for (Eigen::Index j = 0; j < target_cache.raw.size(); ++j) {
      objective += range.clip(target_cache.raw(j));
    }
    if (!std::isfinite(dist) || !std::isfinite(objective)) break;
    if (dist <= feasible_limit && sign * objective > best_score) {
      best_score = sign * objective;
      best_params = params;
      best.objective = objective;
      best.distance_sq = dist;
      best.fell_back = it == 0;
    }
    if (it == cfg.iterations || dist > divergence_limit) break;

    grad.setZero();
    coeff.resize(target_cache.raw.size());
    for (Eigen::Index j = 0; j < coeff.size(); ++j) {
      coeff(j) = range.saturated(target_cache.raw(j)) ? 0.0 : -sign;
    }
    net.backward(params, target_batch, target_cache, coeff, grad);
    if (has_log && dist > radius) {
      coeff.resize(log_cache.raw.size());
      for (Eigen::Index j = 0; j < coeff.size(); ++j) {
        const double raw = log_cache.raw(j);
        coeff(j) = range.saturated(raw) ? 0.0 : cfg.lambda * 2.0 * (raw - center_values(j));
      }
      net.backward(params, log_batch, log_cache, coeff, grad);
    }
    params -= cfg.step_size * grad;
    net.project_heads(params, cs.cls().head_norm_bound());
  }
  best.iterations = it;
  best.f = net.unflatten(best_params);
  return best;
}

double width_over(std::span<const MultiheadFunction> fs, std::span<const Input> per_task_inputs) {
  if (fs.size() < 2) return 0.0;
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& f : fs) {
    const double s = head_sum(f, per_task_inputs);
    hi = std::max(hi, s);
    lo = std::min(lo, s);
  }
  return hi - lo;
}

double width(const ConfidenceSet& cs, std::span<const Input> per_task_inputs,
             const SearchConfig& cfg) {
  check_per_task(cs, per_task_inputs.size());
  if (cs.exact()) return width_over(cs.candidates(), per_task_inputs);
  std::vector<int> tasks(per_task_inputs.size());
  std::iota(tasks.begin(), tasks.end(), 0);
  const auto up = penalized_search(cs, per_task_inputs, tasks, 1.0, cfg);
  const auto down = penalized_search(cs, per_task_inputs, tasks, -1.0, cfg);
  return std::max(0.0, up.objective - down.objective);
}

namespace {

Selection select_finite(const ConfidenceSet& cs, const std::vector<std::vector<Input>>& sets) {
  const auto& cands = cs.candidates();
  Selection best;
  best.value = -std::numeric_limits<double>::infinity();
  for (const auto& f : cands) {
    Selection s;
    s.value = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      int arg = 0;
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < sets[i].size(); ++a) {
        const double v = evaluate(f, sets[i][a], static_cast<int>(i));
        if (v > top) {
          top = v;
          arg = static_cast<int>(a);
        }
      }
      s.actions.push_back(arg);
      s.values.push_back(top);
      s.value += top;
    }
    if (s.value > best.value) {
      s.f = f;
      best = std::move(s);
    }
  }
  return best;
}

Selection select_two_layer(const ConfidenceSet& cs, const std::vector<std::vector<Input>>& sets,
                           const SearchConfig& cfg) {
  const int M = static_cast<int>(sets.size());
  std::vector<std::vector<int>> ranked(sets.size());
  std::size_t ranks = 0;
  for (int i = 0; i < M; ++i) {
    const auto& acts = sets[static_cast<std::size_t>(i)];
    std::vector<double> v;
    for (const auto& x : acts) v.push_back(evaluate(cs.center(), x, i));
    auto& order = ranked[static_cast<std::size_t>(i)];
    order.resize(acts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return v[static_cast<std::size_t>(a)] > v[static_cast<std::size_t>(b)];
    });
    ranks = std::max(ranks, acts.size());
  }

  Selection sel;
  sel.actions.assign(sets.size(), 0);
  sel.values.assign(sets.size(), -std::numeric_limits<double>::infinity());
  std::vector<int> tasks(sets.size());
  std::iota(tasks.begin(), tasks.end(), 0);
  std::vector<Input> targets(sets.size());
  for (std::size_t r = 0; r < ranks; ++r) {
    std::vector<int> picks(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
      picks[i] = ranked[i][std::min(r, ranked[i].size() - 1)];
      targets[i] = sets[i][static_cast<std::size_t>(picks[i])];
    }
    const auto found = penalized_search(cs, targets, tasks, 1.0, cfg);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const double v = evaluate(found.f, targets[i], static_cast<int>(i));
      if (v > sel.values[i]) {
        sel.values[i] = v;
        sel.actions[i] = picks[i];
      }
    }
  }
  sel.value = std::accumulate(sel.values.begin(), sel.values.end(), 0.0);
  return sel;
}

}  // namespace

Selection optimistic_select(const ConfidenceSet& cs,
                            const std::vector<std::vector<Input>>& action_sets,
                            const SearchConfig& cfg) {
  check_per_task(cs, action_sets.size());
  for (const auto& acts : action_sets) {
    if (acts.empty()) throw InputError("optimistic_select: empty action set");
  }
  if (cs.exact()) return select_finite(cs, action_sets);
  if (cs.cls().kind() == ClassKind::TwoLayer) return select_two_layer(cs, action_sets, cfg);
  throw InputError("optimistic_select: class kind has no selection rule");
}

}  // namespace gfucb
