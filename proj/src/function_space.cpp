#include "gfucb/function_space.hpp"

#include <cmath>
#include <string>

#include "gfucb/errors.hpp"
#include "gfucb/rng.hpp"
#include "gfucb/two_layer.hpp"

namespace gfucb {

namespace {

constexpr double kUnitBallSlack = 1e-12;

std::vector<double> key_of(const Input& x) { return {x.data(), x.data() + x.size()}; }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Vector into_unit_ball(Vector z) {
  const double n = z.norm();
  if (n > 1.0) z /= n;
  return z;
}

Vector two_layer_represent(const TwoLayerRep& rep, const Input& x) {
  const Vector hidden = (rep.W1 * x + rep.b1).cwiseMax(0.0);
  return into_unit_ball(rep.W2 * hidden + rep.b2);
}

void check_task(const MultiheadFunction& f, int task) {
  if (task < 0 || task >= f.tasks()) {
    throw InputError("task index " + std::to_string(task) + " outside [0, " +
                     std::to_string(f.tasks()) + ")");
  }
}

void check_input(const MultiheadFunction& f, const Input& x) {
  if (x.size() != f.input_dim()) {
    throw InputError("input has dimension " + std::to_string(x.size()) + ", expected " +
                     std::to_string(f.input_dim()));
  }
}

}  // namespace

TableRep::TableRep(std::vector<Input> keys, Matrix values)
    : keys_(std::move(keys)), values_(std::move(values)) {
  if (static_cast<Eigen::Index>(keys_.size()) != values_.cols()) {
    throw InputError("TableRep: key count does not match value columns");
  }
  for (int j = 0; j < size(); ++j) {
    if (j > 0 && keys_[j].size() != keys_[0].size()) {
      throw InputError("TableRep: keys of different dimension");
    }
    if (values_.col(j).norm() > 1.0 + kUnitBallSlack) {
      throw DomainError("TableRep: representation vector outside the unit ball");
    }
    if (!index_.emplace(key_of(keys_[j]), j).second) {
      throw InputError("TableRep: duplicate key");
    }
  }
}

int TableRep::input_dim() const {
  return keys_.empty() ? 0 : static_cast<int>(keys_.front().size());
}

std::optional<int> TableRep::find(const Input& x) const {
  const auto it = index_.find(key_of(x));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Eigen::Ref<const Vector> TableRep::at(const Input& x) const {
  const auto j = find(x);
  if (!j) throw InputError("TableRep: input not in table");
  return values_.col(*j);
}

int output_dim(const Representation& rep) {
  return std::visit(Overloaded{[](const LinearRep& r) { return static_cast<int>(r.B.rows()); },
                               [](const TableRep& r) { return r.output_dim(); },
                               [](const TwoLayerRep& r) { return r.output_dim(); }},
                    rep);
}

int input_dim(const Representation& rep) {
  return std::visit(Overloaded{[](const LinearRep& r) { return static_cast<int>(r.B.cols()); },
                               [](const TableRep& r) { return r.input_dim(); },
                               [](const TwoLayerRep& r) { return r.input_dim(); }},
                    rep);
}

Vector represent(const Representation& rep, const Input& x) {
  return std::visit(
      Overloaded{[&](const LinearRep& r) -> Vector { return into_unit_ball(r.B * x); },
                 [&](const TableRep& r) -> Vector { return r.at(x); },
                 [&](const TwoLayerRep& r) -> Vector { return two_layer_represent(r, x); }},
      rep);
}

MultiheadFunction::MultiheadFunction(std::shared_ptr<const Representation> rep, Matrix heads,
                                     ValueRange range)
    : rep_(std::move(rep)), heads_(std::move(heads)), range_(range) {
  if (!rep_) throw InputError("MultiheadFunction: null representation");
  if (heads_.rows() != output_dim(*rep_)) {
    throw InputError("MultiheadFunction: head rows must equal representation dimension");
  }
  if (heads_.cols() < 1) throw InputError("MultiheadFunction: at least one head required");
}

double MultiheadFunction::raw(const Input& x, int task) const {
  check_task(*this, task);
  check_input(*this, x);
  return represent(*rep_, x).dot(heads_.col(task));
}

double evaluate(const MultiheadFunction& f, const Input& x, int task) {
  return f.range().clip(f.raw(x, task));
}

Vector gradient(const MultiheadFunction& f, const Input& x, int task) {
  check_task(f, task);
  check_input(f, x);
  if (!std::holds_alternative<TwoLayerRep>(f.rep())) {
    throw InputError("gradient: only two-layer representations are trainable");
  }
  const TwoLayerNet net(f);
  const Vector params = net.flatten(f);
  Batch batch;
  batch.X = x;
  batch.task = {task};
  TwoLayerNet::Cache cache;
  net.forward(params, batch, cache);
  Vector grad = Vector::Zero(net.param_count());
  if (f.range().saturated(cache.raw(0))) return grad;
  net.backward(params, batch, cache, Vector::Ones(1), grad);
  return grad;
}

SampleLog::SampleLog(int tasks) : samples_(static_cast<std::size_t>(tasks)) {
  if (tasks < 1) throw InputError("SampleLog: at least one task required");
}

void SampleLog::append_round(std::span<const Input> inputs, std::span<const double> targets) {
  if (inputs.size() != samples_.size() || targets.size() != samples_.size()) {
    throw InputError("SampleLog: a round needs exactly one sample per task");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    samples_[i].push_back({inputs[i], targets[i]});
  }
  ++rounds_;
}

void SampleLog::set_target(int task, int round, double y) {
  if (task < 0 || task >= tasks() || round < 0 || round >= rounds_) {
    throw InputError("SampleLog::set_target: index out of range");
  }
  samples_[static_cast<std::size_t>(task)][static_cast<std::size_t>(round)].y = y;
}

const std::vector<SampleLog::Sample>& SampleLog::task_samples(int task) const {
  if (task < 0 || task >= tasks()) throw InputError("SampleLog: task index out of range");
  return samples_[static_cast<std::size_t>(task)];
}

double empirical_norm_sq(const MultiheadFunction& f, const MultiheadFunction& g,
                         const SampleLog& log) {
  if (f.tasks() != log.tasks() || g.tasks() != log.tasks()) {
    throw InputError("empirical_norm_sq: task count mismatch");
  }
  double total = 0.0;
  for (int i = 0; i < log.tasks(); ++i) {
    for (const auto& s : log.task_samples(i)) {
      const double d = evaluate(f, s.x, i) - evaluate(g, s.x, i);
      total += d * d;
    }
  }
  return total;
}

double log_covering_linear(int d_in, int k, double alpha, double entry_bound) {
  if (!(alpha > 0.0)) throw DomainError("log_covering_linear: alpha must be positive");
  if (d_in < 1 || k < 1) throw DomainError("log_covering_linear: dimensions must be positive");
  if (entry_bound < 0.0) throw DomainError("log_covering_linear: negative entry bound");
  return static_cast<double>(k) * d_in * std::log1p(2.0 * entry_bound / alpha);
}

void project_heads(Matrix& heads, double bound) {
  for (Eigen::Index i = 0; i < heads.cols(); ++i) {
    const double n = heads.col(i).norm();
    if (n > bound) heads.col(i) *= bound / n;
  }
}

FunctionClass FunctionClass::finite(std::vector<std::shared_ptr<const Representation>> reps,
                                    std::vector<MultiheadFunction> members,
                                    double head_norm_bound) {
  if (reps.empty()) throw InputError("finite class: no representations");
  FunctionClass c;
  c.kind_ = ClassKind::Finite;
  c.k_ = output_dim(*reps.front());
  c.input_dim_ = gfucb::input_dim(*reps.front());
  c.head_norm_bound_ = head_norm_bound;
  c.tasks_ = members.empty() ? 0 : members.front().tasks();
  c.range_ = members.empty() ? ValueRange{} : members.front().range();
  for (const auto& rep : reps) {
    if (output_dim(*rep) != c.k_ || gfucb::input_dim(*rep) != c.input_dim_) {
      throw InputError("finite class: representations disagree on dimensions");
    }
  }
  for (const auto& m : members) {
    if (m.tasks() != c.tasks_) throw InputError("finite class: members disagree on M");
    if (m.range().lo != c.range_.lo || m.range().hi != c.range_.hi) {
      throw InputError("finite class: members disagree on value range");
    }
    int idx = -1;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      if (reps[r] == m.rep_ptr()) idx = static_cast<int>(r);
    }
    if (idx < 0) throw InputError("finite class: member representation not in the class");
    c.member_rep_.push_back(idx);
  }
  if (members.empty()) throw InputError("finite class: no members");
  c.reps_ = std::move(reps);
  c.members_ = std::move(members);
  return c;
}

FunctionClass FunctionClass::two_layer(const TwoLayerShape& shape, int tasks,
                                       double head_norm_bound, ValueRange range) {
  if (shape.input_dim < 1 || shape.hidden < 1 || shape.k < 1 || tasks < 1) {
    throw InputError("two-layer class: dimensions must be positive");
  }
  FunctionClass c;
  c.kind_ = ClassKind::TwoLayer;
  c.k_ = shape.k;
  c.tasks_ = tasks;
  c.input_dim_ = shape.input_dim;
  c.head_norm_bound_ = head_norm_bound;
  c.range_ = range;
  c.shape_ = shape;
  return c;
}

FunctionClass FunctionClass::linear(int input_dim, int k, int tasks, double entry_bound,
                                    double head_norm_bound, ValueRange range) {
  if (input_dim < 1 || k < 1 || tasks < 1) {
    throw InputError("linear class: dimensions must be positive");
  }
  FunctionClass c;
  c.kind_ = ClassKind::LinearParametric;
  c.k_ = k;
  c.tasks_ = tasks;
  c.input_dim_ = input_dim;
  c.entry_bound_ = entry_bound;
  c.head_norm_bound_ = head_norm_bound;
  c.range_ = range;
  return c;
}

double FunctionClass::log_covering(double alpha) const {
  if (!(alpha > 0.0)) throw DomainError("log_covering: alpha must be positive");
  switch (kind_) {
    case ClassKind::Finite:
      return std::log(static_cast<double>(reps_.size()));
    case ClassKind::LinearParametric:
      return log_covering_linear(input_dim_, k_, alpha, entry_bound_);
    case ClassKind::TwoLayer:
      break;
  }
  throw DomainError("log_covering: no computable covering bound for two-layer classes");
}

FunctionClass FunctionClass::single_task(int task) const {
  if (task < 0 || task >= tasks_) throw InputError("single_task: task index out of range");
  FunctionClass c = *this;
  c.tasks_ = 1;
  c.members_.clear();
  for (const auto& m : members_) {
    c.members_.emplace_back(m.rep_ptr(), Matrix(m.heads().col(task)), m.range());
  }
  return c;
}

MultiheadFunction FunctionClass::initialize(std::uint64_t seed) const {
  if (kind_ != ClassKind::TwoLayer) {
    throw InputError("initialize: only two-layer classes have a random initialization");
  }
  Rng rng(seed);
  TwoLayerRep rep;
  const int d = shape_.input_dim;
  const int h = shape_.hidden;
  rep.W1.resize(h, d);
  rep.b1 = Vector::Zero(h);
  rep.W2.resize(shape_.k, h);
  rep.b2 = Vector::Zero(shape_.k);
  const double s1 = std::sqrt(2.0 / d);
  for (Eigen::Index j = 0; j < rep.W1.cols(); ++j) {
    for (Eigen::Index i = 0; i < rep.W1.rows(); ++i) rep.W1(i, j) = s1 * rng.normal();
  }
  const double s2 = shape_.rep_init_scale / std::sqrt(static_cast<double>(h));
  for (Eigen::Index j = 0; j < rep.W2.cols(); ++j) {
    for (Eigen::Index i = 0; i < rep.W2.rows(); ++i) rep.W2(i, j) = s2 * rng.normal();
  }
  Matrix heads(shape_.k, tasks_);
  for (Eigen::Index j = 0; j < heads.cols(); ++j) {
    for (Eigen::Index i = 0; i < heads.rows(); ++i) heads(i, j) = shape_.head_init_scale * rng.normal();
  }
  project_heads(heads, head_norm_bound_);
  return MultiheadFunction(std::make_shared<const Representation>(std::move(rep)),
                           std::move(heads), range_);
}

}  // namespace gfucb
