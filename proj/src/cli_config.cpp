// YAML config loading with position-tagged errors, and JSON echo of the
// resolved configs.

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "gfucb/cli.hpp"
#include "gfucb/errors.hpp"

namespace gfucb::cli {

namespace {

using nlohmann::json;

std::string where(const std::string& file, const YAML::Mark& mark) {
  if (mark.is_null()) return file + ": ";
  return file + ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1) + ": ";
}

// A mapping whose keys are consumed by typed reads; finish() rejects the
// keys nobody read, so typos fail loudly.
class Section {
 public:
  Section(std::string file, YAML::Node node, std::string path)
      : file_(std::move(file)), node_(std::move(node)), path_(std::move(path)) {
    if (node_.IsDefined() && !node_.IsNull() && !node_.IsMap()) {
      fail(node_, "'" + path_ + "' must be a mapping");
    }
  }

  bool present() const { return node_.IsDefined() && node_.IsMap(); }
  bool has(const std::string& key) const { return present() && node_[key].IsDefined(); }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!present()) return;
    const YAML::Node v = node_[key];
    seen_.insert(key);
    if (!v.IsDefined()) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      fail(v, "'" + qualified(key) + "' has the wrong type");
    }
  }

  Section sub(const std::string& key) {
    seen_.insert(key);
    return Section(file_, present() ? node_[key] : YAML::Node(), qualified(key));
  }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    return present() ? node_[key] : YAML::Node();
  }

  void finish() const {
    if (!present()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(kv.first, "unknown key '" + qualified(key) + "'");
    }
  }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    throw ConfigError(where(file_, at.Mark()) + msg);
  }
  [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
    const YAML::Node at = present() && node_[key].IsDefined() ? node_[key] : node_;
    fail(at, "'" + qualified(key) + "' " + msg);
  }

  const std::string& file() const { return file_; }

 private:
  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  std::string file_;
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

YAML::Node load_yaml(const std::filesystem::path& path) {
  try {
    YAML::Node root = YAML::LoadFile(path.string());
    if (root.IsNull()) return YAML::Node(YAML::NodeType::Map);
    return root;
  } catch (const YAML::BadFile&) {
    throw ConfigError(path.string() + ": cannot open file");
  } catch (const YAML::ParserException& e) {
    throw ConfigError(where(path.string(), e.mark) + e.msg);
  }
}

void require_positive(Section& s, const std::string& key, double v) {
  if (!(v > 0.0)) s.fail_key(key, "must be positive");
}

void read_checkpoints(Section& s, std::vector<int>& checkpoints, int T) {
  s.read("checkpoints", checkpoints);
  for (int t : checkpoints) {
    if (t < 1 || t > T) s.fail_key("checkpoints", "entries must lie in [1, T]");
  }
}

void read_beta(Section s, BetaConfig& beta) {
  std::string mode = to_string(beta.mode);
  s.read("mode", mode);
  try {
    beta.mode = beta_mode_from_string(mode);
  } catch (const InputError&) {
    s.fail_key("mode", "must be 'practical' or 'theoretical'");
  }
  s.read("a", beta.a);
  s.read("b", beta.b);
  s.read("c", beta.c);
  s.read("alpha", beta.alpha);
  s.read("delta", beta.delta);
  if (!(beta.delta > 0.0 && beta.delta <= 1.0)) s.fail_key("delta", "must lie in (0, 1]");
  if (!(beta.alpha >= 0.0)) s.fail_key("alpha", "must be >= 0");
  s.finish();
}

void read_search(Section s, SearchConfig& search) {
  s.read("lambda", search.lambda);
  s.read("step_size", search.step_size);
  s.read("iterations", search.iterations);
  s.read("tolerance", search.tolerance);
  s.read("divergence_factor", search.divergence_factor);
  if (search.iterations < 0) s.fail_key("iterations", "must be >= 0");
  if (!(search.lambda >= 0.0)) s.fail_key("lambda", "must be >= 0");
  s.finish();
}

void read_train(Section s, TrainConfig& train) {
  std::string opt = to_string(train.optimizer);
  s.read("optimizer", opt);
  try {
    train.optimizer = optimizer_from_string(opt);
  } catch (const InputError&) {
    s.fail_key("optimizer", "must be 'gd' or 'adam'");
  }
  s.read("step_size", train.step_size);
  s.read("epochs", train.epochs);
  s.read("batch_size", train.batch_size);
  require_positive(s, "step_size", train.step_size);
  if (train.epochs < 0) s.fail_key("epochs", "must be >= 0");
  if (train.batch_size < 0) s.fail_key("batch_size", "must be >= 0");
  s.finish();
}

void read_finite_instance(Section& s, FiniteInstanceConfig& f) {
  s.read("tasks", f.tasks);
  s.read("k", f.k);
  s.read("input_dim", f.input_dim);
  s.read("universe_size", f.universe_size);
  s.read("representations", f.representations);
  s.read("heads_per_rep", f.heads_per_rep);
  s.read("head_scale", f.head_scale);
  s.read("instance_seed", f.seed);
  const std::pair<const char*, int> sizes[] = {{"tasks", f.tasks},
                                               {"k", f.k},
                                               {"input_dim", f.input_dim},
                                               {"universe_size", f.universe_size},
                                               {"representations", f.representations},
                                               {"heads_per_rep", f.heads_per_rep}};
  for (const auto& [key, v] : sizes) {
    if (v < 1) s.fail_key(key, "must be a positive integer");
  }
}

// Shared by the bandit and diagnose commands.
void read_bandit_body(Section& root, BanditExperiment& e) {
  root.read("run_id", e.run_id);
  root.read("seed", e.seed);
  root.read("T", e.T);
  if (e.T < 1) root.fail_key("T", "must be a positive integer");
  read_checkpoints(root, e.checkpoints, e.T);
  root.read("record_width", e.record_width);
  root.read("include_center", e.include_center);

  Section env = root.sub("env");
  env.read("kind", e.env);
  if (e.env != "digit" && e.env != "finite") env.fail_key("kind", "must be 'digit' or 'finite'");
  env.read("actions_per_round", e.actions_per_round);
  if (e.actions_per_round < 1) env.fail_key("actions_per_round", "must be a positive integer");
  if (e.env == "digit") {
    env.read("tasks", e.digit_tasks);
    env.read("dim", e.digit.dim);
    env.read("styles", e.digit.styles);
    env.read("map_rank", e.digit.map_rank);
    env.read("observation_noise", e.digit.observation_noise);
    env.read("reward_noise", e.digit.reward_noise);
    env.read("prototype_seed", e.digit.prototype_seed);
    env.read("map_seed", e.digit.map_seed);
    env.read("linear_maps", e.linear_maps);
    if (e.digit_tasks < 1 || e.digit_tasks > kDigits) env.fail_key("tasks", "must lie in [1, 10]");
    if (e.digit.dim < 1) env.fail_key("dim", "must be a positive integer");
    if (e.digit.styles < 1) env.fail_key("styles", "must be a positive integer");
    if (e.digit.map_rank < 0) env.fail_key("map_rank", "must be >= 0");
    if (e.actions_per_round > kDigits) env.fail_key("actions_per_round", "must be at most 10");
  } else {
    read_finite_instance(env, e.finite);
    if (!env.has("actions_per_round")) {
      e.actions_per_round = std::min(e.actions_per_round, e.finite.universe_size);
    }
    env.read("noise", e.finite_noise);
    if (!(e.finite_noise >= 0.0)) env.fail_key("noise", "must be >= 0");
    if (e.actions_per_round > e.finite.universe_size) {
      env.fail_key("actions_per_round", "must not exceed universe_size");
    }
  }
  env.finish();

  Section cls = root.sub("class");
  cls.read("hidden", e.shape.hidden);
  cls.read("k", e.shape.k);
  cls.read("rep_init_scale", e.shape.rep_init_scale);
  cls.read("head_init_scale", e.shape.head_init_scale);
  cls.read("head_norm_bound", e.head_norm_bound);
  if (e.shape.hidden < 1) cls.fail_key("hidden", "must be a positive integer");
  if (e.shape.k < 1) cls.fail_key("k", "must be a positive integer");
  if (!(e.head_norm_bound >= 0.0)) cls.fail_key("head_norm_bound", "must be >= 0");
  cls.finish();
  e.shape.input_dim = e.digit.dim;

  read_beta(root.sub("beta"), e.beta);
  read_search(root.sub("search"), e.search);
  read_train(root.sub("train"), e.train);
  Section eg = root.sub("eps_greedy");
  eg.read("epsilon", e.epsilon);
  if (!(e.epsilon >= 0.0 && e.epsilon <= 1.0)) eg.fail_key("epsilon", "must lie in [0, 1]");
  eg.finish();
}

json finite_json(const FiniteInstanceConfig& f) {
  return {{"tasks", f.tasks},
          {"k", f.k},
          {"input_dim", f.input_dim},
          {"universe_size", f.universe_size},
          {"representations", f.representations},
          {"heads_per_rep", f.heads_per_rep},
          {"head_scale", f.head_scale},
          {"instance_seed", f.seed}};
}

json bandit_json(const BanditExperiment& e) {
  json env;
  env["kind"] = e.env;
  env["actions_per_round"] = e.actions_per_round;
  if (e.env == "digit") {
    env.update({{"tasks", e.digit_tasks},
                {"dim", e.digit.dim},
                {"styles", e.digit.styles},
                {"map_rank", e.digit.map_rank},
                {"observation_noise", e.digit.observation_noise},
                {"reward_noise", e.digit.reward_noise},
                {"prototype_seed", e.digit.prototype_seed},
                {"map_seed", e.digit.map_seed},
                {"linear_maps", e.linear_maps}});
  } else {
    env.update(finite_json(e.finite));
    env["noise"] = e.finite_noise;
  }
  json runs = json::array();
  for (const BanditRun& r : e.runs) runs.push_back({{"algo", r.algo}, {"group_size", r.group_size}});
  return {{"run_id", e.run_id},
          {"seed", e.seed},
          {"replications", e.replications},
          {"T", e.T},
          {"checkpoints", e.checkpoints},
          {"record_width", e.record_width},
          {"include_center", e.include_center},
          {"env", env},
          {"class",
           {{"hidden", e.shape.hidden},
            {"k", e.shape.k},
            {"rep_init_scale", e.shape.rep_init_scale},
            {"head_init_scale", e.shape.head_init_scale},
            {"head_norm_bound", e.head_norm_bound}}},
          {"beta",
           {{"mode", to_string(e.beta.mode)},
            {"a", e.beta.a},
            {"b", e.beta.b},
            {"c", e.beta.c},
            {"alpha", e.beta.alpha},
            {"delta", e.beta.delta}}},
          {"search",
           {{"lambda", e.search.lambda},
            {"step_size", e.search.step_size},
            {"iterations", e.search.iterations},
            {"tolerance", e.search.tolerance},
            {"divergence_factor", e.search.divergence_factor}}},
          {"train",
           {{"optimizer", to_string(e.train.optimizer)},
            {"step_size", e.train.step_size},
            {"epochs", e.train.epochs},
            {"batch_size", e.train.batch_size}}},
          {"eps_greedy", {{"epsilon", e.epsilon}}},
          {"runs", runs}};
}

}  // namespace

std::string BanditRun::label() const {
  return algo == "gfucb" ? "gfucb_M" + std::to_string(group_size) : algo;
}

BanditExperiment load_bandit(const std::filesystem::path& path) {
  Section root(path.string(), load_yaml(path), "");
  BanditExperiment e;
  read_bandit_body(root, e);
  root.read("replications", e.replications);
  if (e.replications < 1) root.fail_key("replications", "must be a positive integer");

  if (root.has("runs")) {
    const YAML::Node runs = root.raw("runs");
    if (!runs.IsSequence() || runs.size() == 0) root.fail(runs, "'runs' must be a non-empty list");
    e.runs.clear();
    for (std::size_t j = 0; j < runs.size(); ++j) {
      Section r(path.string(), runs[j], "runs[" + std::to_string(j) + "]");
      BanditRun run;
      r.read("algo", run.algo);
      r.read("group_size", run.group_size);
      if (run.algo != "gfucb" && run.algo != "eps_greedy") {
        r.fail_key("algo", "must be 'gfucb' or 'eps_greedy'");
      }
      if (run.group_size < 1 || e.total_tasks() % run.group_size != 0) {
        r.fail_key("group_size", "must divide the number of tasks");
      }
      if (e.env == "finite" && run.group_size != e.finite.tasks) {
        r.fail_key("group_size", "must equal env.tasks for the finite environment");
      }
      r.finish();
      for (const BanditRun& prev : e.runs) {
        if (prev.label() == run.label()) r.fail_key("algo", "repeats run '" + run.label() + "'");
      }
      e.runs.push_back(run);
    }
  } else {
    e.runs = {BanditRun{"gfucb", e.total_tasks()}};
  }
  root.finish();
  return e;
}

MdpExperiment load_mdp(const std::filesystem::path& path) {
  Section root(path.string(), load_yaml(path), "");
  MdpExperiment e;
  root.read("run_id", e.run_id);
  root.read("seed", e.seed);
  root.read("replications", e.replications);
  root.read("T", e.T);
  if (e.replications < 1) root.fail_key("replications", "must be a positive integer");
  if (e.T < 1) root.fail_key("T", "must be a positive integer");
  read_checkpoints(root, e.checkpoints, e.T);
  root.read("include_center", e.include_center);

  Section env = root.sub("env");
  env.read("states", e.env.states);
  env.read("actions", e.env.actions);
  env.read("horizon", e.env.horizon);
  env.read("k", e.env.k);
  env.read("tasks", e.env.tasks);
  env.read("noise", e.env.noise);
  env.read("instance_seed", e.env.seed);
  const std::pair<const char*, int> sizes[] = {{"states", e.env.states},
                                               {"actions", e.env.actions},
                                               {"horizon", e.env.horizon},
                                               {"k", e.env.k},
                                               {"tasks", e.env.tasks}};
  for (const auto& [key, v] : sizes) {
    if (v < 1) env.fail_key(key, "must be a positive integer");
  }
  if (!(e.env.noise >= 0.0 && e.env.noise <= 1.0)) env.fail_key("noise", "must lie in [0, 1]");
  env.finish();

  Section cls = root.sub("classes");
  cls.read("distractors", e.classes.distractors);
  cls.read("heads_per_rep", e.classes.heads_per_rep);
  cls.read("head_noise", e.classes.head_noise);
  cls.read("seed", e.classes.seed);
  if (e.classes.distractors < 0) cls.fail_key("distractors", "must be >= 0");
  if (e.classes.heads_per_rep < 0) cls.fail_key("heads_per_rep", "must be >= 0");
  cls.finish();

  Section radius = root.sub("radius");
  radius.read("mode", e.radius);
  if (e.radius != "level" && e.radius != "practical") {
    radius.fail_key("mode", "must be 'level' or 'practical'");
  }
  radius.read("delta", e.delta);
  radius.read("ibe", e.ibe);
  radius.read("a", e.practical.a);
  radius.read("b", e.practical.b);
  radius.read("c", e.practical.c);
  if (!(e.delta > 0.0 && e.delta <= 1.0)) radius.fail_key("delta", "must lie in (0, 1]");
  if (!(e.ibe >= 0.0)) radius.fail_key("ibe", "must be >= 0");
  radius.finish();
  root.finish();
  return e;
}

EluderExperiment load_eluder(const std::filesystem::path& path) {
  Section root(path.string(), load_yaml(path), "");
  EluderExperiment e;
  root.read("run_id", e.run_id);
  root.read("eps", e.eps);
  root.read("node_budget", e.node_budget);
  for (double eps : e.eps) {
    if (!(eps > 0.0)) root.fail_key("eps", "entries must be positive");
  }
  if (e.node_budget < 1) root.fail_key("node_budget", "must be positive");
  if (root.has("class") == root.has("instance")) {
    throw ConfigError(path.string() + ": give exactly one of 'class' or 'instance'");
  }
  if (root.has("class")) {
    Section cls = root.sub("class");
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> members;
    cls.read("inputs", inputs);
    cls.read("members", members);
    if (inputs.empty()) cls.fail_key("inputs", "must be a non-empty list");
    if (members.empty()) cls.fail_key("members", "must be a non-empty list");
    ScalarClass table;
    for (const auto& x : inputs) {
      if (x.size() != inputs.front().size()) cls.fail_key("inputs", "rows must share one length");
      table.inputs.push_back(Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size())));
    }
    table.values.resize(static_cast<Eigen::Index>(members.size()),
                        static_cast<Eigen::Index>(inputs.size()));
    for (std::size_t m = 0; m < members.size(); ++m) {
      if (members[m].size() != inputs.size()) cls.fail_key("members", "need one value per input");
      for (std::size_t j = 0; j < inputs.size(); ++j) {
        table.values(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) = members[m][j];
      }
    }
    cls.finish();
    e.table = std::move(table);
  } else {
    Section inst = root.sub("instance");
    read_finite_instance(inst, e.instance);
    inst.finish();
  }
  root.finish();
  return e;
}

DiagnoseExperiment load_diagnose(const std::filesystem::path& path) {
  Section root(path.string(), load_yaml(path), "");
  DiagnoseExperiment e;
  read_bandit_body(root, e.bandit);
  e.run_id = e.bandit.run_id;
  e.seed = e.bandit.seed;
  root.read("replications", e.replications);
  if (e.replications < 0) root.fail_key("replications", "must be >= 0");
  e.bandit.replications = e.replications;

  Section d = root.sub("diagnose");
  d.read("checkpoint", e.checkpoint);
  d.read("test_points", e.test_points);
  d.read("sizes", e.sizes);
  d.read("decay_horizon", e.decay_horizon);
  d.read("group_size", e.group_size);
  d.read("images_per_digit", e.images_per_digit);
  d.read("eps", e.eps);
  if (e.checkpoint < 1) d.fail_key("checkpoint", "must be a positive integer");
  if (e.test_points < 0) d.fail_key("test_points", "must be >= 0");
  if (e.decay_horizon < 1) d.fail_key("decay_horizon", "must be a positive integer");
  if (e.images_per_digit < 1) d.fail_key("images_per_digit", "must be a positive integer");
  for (int n : e.sizes) {
    if (n < 0) d.fail_key("sizes", "entries must be >= 0");
  }
  for (double eps : e.eps) {
    if (!(eps > 0.0)) d.fail_key("eps", "entries must be positive");
  }
  if (e.group_size < 1 || e.group_size > e.bandit.total_tasks()) {
    d.fail_key("group_size", "must lie in [1, number of tasks]");
  }
  if (e.bandit.env == "finite" && e.group_size != e.bandit.finite.tasks) {
    d.fail_key("group_size", "must equal env.tasks for the finite environment");
  }
  d.finish();
  root.finish();
  return e;
}

std::string to_json(const BanditExperiment& e) { return bandit_json(e).dump(); }

std::string to_json(const MdpExperiment& e) {
  const json j = {{"run_id", e.run_id},
                  {"seed", e.seed},
                  {"replications", e.replications},
                  {"T", e.T},
                  {"checkpoints", e.checkpoints},
                  {"include_center", e.include_center},
                  {"env",
                   {{"states", e.env.states},
                    {"actions", e.env.actions},
                    {"horizon", e.env.horizon},
                    {"k", e.env.k},
                    {"tasks", e.env.tasks},
                    {"noise", e.env.noise},
                    {"instance_seed", e.env.seed}}},
                  {"classes",
                   {{"distractors", e.classes.distractors},
                    {"heads_per_rep", e.classes.heads_per_rep},
                    {"head_noise", e.classes.head_noise},
                    {"seed", e.classes.seed}}},
                  {"radius",
                   {{"mode", e.radius},
                    {"delta", e.delta},
                    {"ibe", e.ibe},
                    {"a", e.practical.a},
                    {"b", e.practical.b},
                    {"c", e.practical.c}}}};
  return j.dump();
}

std::string to_json(const EluderExperiment& e) {
  json j = {{"run_id", e.run_id}, {"eps", e.eps}, {"node_budget", e.node_budget}};
  if (e.table) {
    json inputs = json::array();
    for (const Input& x : e.table->inputs) inputs.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    json members = json::array();
    for (Eigen::Index m = 0; m < e.table->values.rows(); ++m) {
      const Vector row = e.table->values.row(m).transpose();
      members.push_back(std::vector<double>(row.data(), row.data() + row.size()));
    }
    j["class"] = {{"inputs", inputs}, {"members", members}};
  } else {
    j["instance"] = finite_json(e.instance);
  }
  return j.dump();
}

std::string to_json(const DiagnoseExperiment& e) {
  json j = bandit_json(e.bandit);
  j.erase("runs");
  j["replications"] = e.replications;
  j["diagnose"] = {{"checkpoint", e.checkpoint},   {"test_points", e.test_points},
                   {"sizes", e.sizes},             {"decay_horizon", e.decay_horizon},
                   {"group_size", e.group_size},   {"images_per_digit", e.images_per_digit},
                   {"eps", e.eps}};
  return j.dump();
}

}  // namespace gfucb::cli
