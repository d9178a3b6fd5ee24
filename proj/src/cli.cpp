#include "gfucb/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "gfucb/errors.hpp"

namespace gfucb::cli {

namespace {

using nlohmann::json;

// Columns of the bandit regret CSV, in order.
constexpr const char* kBanditHeader =
    "seed,t,task_group,algo,inst_regret,cum_regret,width,bonus_mean";
constexpr const char* kMdpHeader =
    "seed,t,episode,H,task_group,algo,inst_regret,cum_regret,width,bonus_mean";

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& config, const char* header)
      : file_(path) {
    if (!file_) throw std::runtime_error("cannot write " + path.string());
    file_ << "# config: " << config << "\n" << header << "\n";
  }

  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((file_ << (first ? "" : ",") << cell(cells), first = false), ...);
    file_ << "\n";
  }

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::uint64_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  static std::string cell(bool v) { return v ? "1" : "0"; }

  std::ofstream file_;
};

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  file << j.dump(2) << "\n";
}

double head_bound(const BanditExperiment& e) {
  return e.head_norm_bound > 0.0 ? e.head_norm_bound : std::sqrt(static_cast<double>(e.shape.k));
}

// The environment family of a bandit experiment, shared by all jobs.
struct BanditSetup {
  std::shared_ptr<const DigitWorld> world;
  std::optional<FiniteInstance> instance;

  explicit BanditSetup(const BanditExperiment& e) {
    if (e.env == "finite") {
      instance = make_finite_instance(e.finite);
    } else {
      DigitWorld w = make_digit_world(e.digit);
      if (e.linear_maps) w = with_linear_maps(std::move(w), e.digit_tasks);
      world = std::make_shared<const DigitWorld>(std::move(w));
    }
  }

  // Tasks [first, first + size).
  std::unique_ptr<BanditEnv> env(const BanditExperiment& e, int first, int size) const {
    if (instance) {
      return std::make_unique<FiniteBanditEnv>(instance->truth, instance->universes,
                                               e.actions_per_round, e.finite_noise);
    }
    std::vector<int> ids(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) ids[static_cast<std::size_t>(i)] = first + i;
    return std::make_unique<DigitBanditEnv>(world, ids, e.actions_per_round);
  }

  FunctionClass cls(const BanditExperiment& e, int size) const {
    if (instance) return instance->cls;
    TwoLayerShape shape = e.shape;
    shape.input_dim = world->dim();
    return FunctionClass::two_layer(shape, size, head_bound(e));
  }
};

GfucbConfig gfucb_config(const BanditExperiment& e, std::uint64_t rep_seed, std::uint64_t algo_seed) {
  GfucbConfig cfg;
  cfg.T = e.T;
  cfg.beta = e.beta;
  cfg.search = e.search;
  cfg.train = e.train;
  cfg.include_center = e.include_center;
  cfg.record_width = e.record_width;
  cfg.env_seed = derive_seed(rep_seed, "env");
  cfg.seed = algo_seed;
  return cfg;
}

struct CurvePoint {
  int t;
  double inst;
  double cum;
  double width;
  double bonus;
};

std::vector<int> resolved_checkpoints(const std::vector<int>& cps, int T) {
  return cps.empty() ? std::vector<int>{T} : cps;
}

json checkpoints_json(const std::vector<RegretCheckpoint>& cps) {
  json arr = json::array();
  for (const auto& c : cps) {
    arr.push_back({{"t", c.t}, {"mean", c.mean}, {"std", c.std}, {"replications", c.replications}});
  }
  return arr;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::uint64_t replication_seed(std::uint64_t seed, int r) {
  return derive_seed(seed, "replication", static_cast<std::uint64_t>(r));
}

void cmd_run_bandit(BanditExperiment e, const RunOptions& opts, std::ostream& out) {
  if (opts.seed) e.seed = *opts.seed;
  e.checkpoints = resolved_checkpoints(e.checkpoints, e.T);
  const std::string config = to_json(e);
  if (opts.dry_run) {
    out << json::parse(config).dump(2) << "\n";
    return;
  }
  const BanditSetup setup(e);

  struct Job {
    int rep;
    int run;
    int group;
  };
  std::vector<Job> jobs;
  for (int r = 0; r < e.replications; ++r) {
    for (int j = 0; j < static_cast<int>(e.runs.size()); ++j) {
      const int groups = e.total_tasks() / e.runs[static_cast<std::size_t>(j)].group_size;
      for (int g = 0; g < groups; ++g) jobs.push_back({r, j, g});
    }
  }
  const auto curves = parallel_map<std::vector<CurvePoint>>(
      static_cast<int>(jobs.size()), opts.jobs, [&](int idx) {
        const Job& job = jobs[static_cast<std::size_t>(idx)];
        const BanditRun& run = e.runs[static_cast<std::size_t>(job.run)];
        const std::uint64_t rep_seed = replication_seed(e.seed, job.rep);
        const std::uint64_t algo_seed =
            derive_seed(rep_seed, run.label(), static_cast<std::uint64_t>(job.group));
        auto env = setup.env(e, job.group * run.group_size, run.group_size);
        const FunctionClass cls = setup.cls(e, run.group_size);
        RunResult res;
        if (run.algo == "gfucb") {
          res = run_gfucb(*env, cls, gfucb_config(e, rep_seed, algo_seed));
        } else {
          EpsGreedyConfig cfg;
          cfg.T = e.T;
          cfg.epsilon = e.epsilon;
          cfg.train = e.train;
          cfg.env_seed = derive_seed(rep_seed, "env");
          cfg.seed = algo_seed;
          res = run_eps_greedy(*env, cls, cfg);
        }
        std::vector<CurvePoint> curve;
        for (const EpisodeRecord& rec : res.records) {
          curve.push_back({rec.t, rec.inst_regret, rec.cum_regret, rec.width, rec.bonus_mean});
        }
        return curve;
      });

  const auto csv_path = opts.out_dir / ("regret_" + e.run_id + ".csv");
  CsvWriter csv(csv_path, config, kBanditHeader);
  // Per-task cumulative regret per (run, replication), summed over groups.
  std::vector<std::vector<std::vector<double>>> per_task(
      e.runs.size(), std::vector<std::vector<double>>(static_cast<std::size_t>(e.replications),
                                                      std::vector<double>(static_cast<std::size_t>(e.T), 0.0)));
  for (std::size_t idx = 0; idx < jobs.size(); ++idx) {
    const Job& job = jobs[idx];
    const std::string label = e.runs[static_cast<std::size_t>(job.run)].label();
    const std::uint64_t rep_seed = replication_seed(e.seed, job.rep);
    for (const CurvePoint& p : curves[idx]) {
      csv.row(rep_seed, p.t, job.group, label, p.inst, p.cum, p.width, p.bonus);
      per_task[static_cast<std::size_t>(job.run)][static_cast<std::size_t>(job.rep)]
              [static_cast<std::size_t>(p.t - 1)] += p.cum / e.total_tasks();
    }
  }

  json summary = {{"run_id", e.run_id},
                  {"config", json::parse(config)},
                  {"metric", "per_task_cum_regret"},
                  {"algorithms", json::object()}};
  for (std::size_t j = 0; j < e.runs.size(); ++j) {
    const auto cps = aggregate_regret(per_task[j], e.checkpoints);
    summary["algorithms"][e.runs[j].label()] = checkpoints_json(cps);
    out << e.runs[j].label() << ":";
    for (const auto& c : cps) out << "  t=" << c.t << " " << format_number(c.mean) << " +- " << format_number(c.std);
    out << "\n";
  }
  write_json(opts.out_dir / ("summary_" + e.run_id + ".json"), summary);
  out << "wrote " << csv_path.string() << "\n";
}

void cmd_run_mdp(MdpExperiment e, const RunOptions& opts, std::ostream& out) {
  if (opts.seed) e.seed = *opts.seed;
  e.checkpoints = resolved_checkpoints(e.checkpoints, e.T);
  const std::string config = to_json(e);
  if (opts.dry_run) {
    out << json::parse(config).dump(2) << "\n";
    return;
  }
  const LinearMdpEnv base = LinearMdpEnv::zero_ibe(e.env);
  const std::vector<FunctionClass> classes = make_level_classes(base, e.classes);

  const auto runs = parallel_map<std::vector<MdpEpisodeRecord>>(e.replications, opts.jobs, [&](int r) {
    LinearMdpEnv env = base;
    MdpRunConfig cfg;
    cfg.T = e.T;
    cfg.delta = e.delta;
    cfg.ibe = e.ibe;
    cfg.include_center = e.include_center;
    cfg.env_seed = derive_seed(replication_seed(e.seed, r), "env");
    if (e.radius == "practical") {
      const BetaConfig p = e.practical;
      cfg.radius = [p](int t, int) { return beta_practical(t - 1, p.a, p.b, p.c); };
    }
    return run_algorithm2(env, classes, cfg);
  });

  const int H = e.env.horizon;
  const auto csv_path = opts.out_dir / ("regret_" + e.run_id + ".csv");
  CsvWriter csv(csv_path, config, kMdpHeader);
  std::vector<std::vector<double>> per_task;
  int optimistic = 0;
  for (int r = 0; r < e.replications; ++r) {
    const std::uint64_t rep_seed = replication_seed(e.seed, r);
    std::vector<double> curve;
    for (const MdpEpisodeRecord& rec : runs[static_cast<std::size_t>(r)]) {
      csv.row(rep_seed, rec.episode * H, rec.episode, H, 0, std::string("algorithm2"), rec.regret,
              rec.cum_regret, std::nan(""), rec.bonus_mean);
      curve.push_back(rec.cum_regret / e.env.tasks);
      optimistic += rec.optimistic ? 1 : 0;
    }
    per_task.push_back(std::move(curve));
  }
  const auto cps = aggregate_regret(per_task, e.checkpoints);
  const double optimism = static_cast<double>(optimistic) / (static_cast<double>(e.replications) * e.T);
  json summary = {{"run_id", e.run_id},
                  {"config", json::parse(config)},
                  {"metric", "per_task_cum_regret"},
                  {"optimism_frequency", optimism},
                  {"algorithms", {{"algorithm2", checkpoints_json(cps)}}}};
  write_json(opts.out_dir / ("summary_" + e.run_id + ".json"), summary);
  out << "algorithm2:";
  for (const auto& c : cps) out << "  episode=" << c.t << " " << format_number(c.mean) << " +- " << format_number(c.std);
  out << "\noptimism frequency " << format_number(optimism) << "\nwrote " << csv_path.string() << "\n";
}

void cmd_eluder(const EluderExperiment& e, const RunOptions& opts, std::ostream& out) {
  const std::string config = to_json(e);
  if (opts.dry_run) {
    out << json::parse(config).dump(2) << "\n";
    return;
  }
  ScalarClass cls;
  if (e.table) {
    cls = *e.table;
  } else {
    const FiniteInstance inst = make_finite_instance(e.instance);
    cls = scalarize(inst.cls, inst.universes);
  }
  const auto csv_path = opts.out_dir / ("eluder_" + e.run_id + ".csv");
  CsvWriter csv(csv_path, config, "eps,dimension,exact,nodes");
  out << "eps        dimension  exact  nodes\n";
  for (double eps : e.eps) {
    const EluderResult res = eluder_dimension_search(cls, eps, {e.node_budget});
    csv.row(eps, res.dimension, res.exact, std::to_string(res.nodes));
    char line[96];
    std::snprintf(line, sizeof line, "%-10s %-10d %-6s %lld\n", format_number(eps).c_str(),
                  res.dimension, res.exact ? "yes" : "no", res.nodes);
    out << line;
  }
  out << "wrote " << csv_path.string() << "\n";
}

void cmd_diagnose(DiagnoseExperiment e, const std::string& which, const RunOptions& opts,
                  std::ostream& out) {
  if (which != "bonus" && which != "decay" && which != "kernel" && which != "width-audit") {
    throw ConfigError("diagnose: unknown diagnostic '" + which +
                      "' (expected bonus, decay, kernel or width-audit)");
  }
  if (opts.seed) e.seed = e.bandit.seed = *opts.seed;
  if (which == "kernel" && e.bandit.env != "digit") {
    throw ConfigError("diagnose kernel: needs the digit environment");
  }
  if (which == "width-audit" && e.bandit.env != "finite") {
    throw ConfigError("diagnose width-audit: needs the finite environment");
  }
  const std::string config = to_json(e);
  if (opts.dry_run) {
    out << json::parse(config).dump(2) << "\n";
    return;
  }
  const BanditExperiment& b = e.bandit;
  const BanditSetup setup(b);
  const int M = e.group_size;
  const std::string prefix = which == "width-audit" ? "audit" : which;
  const auto csv_path = opts.out_dir / (prefix + "_" + e.run_id + ".csv");

  if (which == "bonus") {
    struct Out {
      std::vector<TestPoint> test;
      std::vector<BonusPoint> points;
    };
    const auto res = parallel_map<Out>(e.replications, opts.jobs, [&](int r) {
      const std::uint64_t rep_seed = replication_seed(e.seed, r);
      auto env = setup.env(b, 0, M);
      Out o;
      o.test = collect_test_points(*env, e.test_points, derive_seed(rep_seed, "test-env"), rep_seed);
      BanditExperiment run = b;
      run.T = e.checkpoint;
      GfucbConfig cfg = gfucb_config(run, rep_seed, derive_seed(rep_seed, "algo"));
      cfg.record_width = false;
      cfg.on_step = [&](int t, const ConfidenceSet& cs) {
        if (t == e.checkpoint) o.points = bonus_diagnostic(cs, o.test, b.search);
      };
      run_gfucb(*env, setup.cls(b, M), cfg);
      return o;
    });
    CsvWriter csv(csv_path, config, "seed,index,task,error,bonus");
    std::vector<BonusPoint> all;
    for (int r = 0; r < e.replications; ++r) {
      const auto& o = res[static_cast<std::size_t>(r)];
      for (std::size_t j = 0; j < o.points.size(); ++j) {
        csv.row(replication_seed(e.seed, r), static_cast<int>(j), o.test[j].task, o.points[j].error,
                o.points[j].bonus);
        all.push_back(o.points[j]);
      }
    }
    out << "fraction with bonus >= error: " << format_number(fraction_above_diagonal(all)) << "\n";
  } else if (which == "decay") {
    const auto res = parallel_map<std::vector<DecayPoint>>(e.replications, opts.jobs, [&](int r) {
      const std::uint64_t rep_seed = replication_seed(e.seed, r);
      auto env = setup.env(b, 0, M);
      int largest = 0;
      for (int n : e.sizes) largest = std::max(largest, n);
      const auto test = collect_test_points(*env, e.test_points, derive_seed(rep_seed, "test-env"), rep_seed);
      const SampleLog pool = collect_uniform_log(*env, largest, derive_seed(rep_seed, "env"), rep_seed);
      DecayConfig cfg;
      cfg.beta = b.beta;
      cfg.horizon = e.decay_horizon;
      cfg.search = b.search;
      cfg.train = b.train;
      cfg.include_center = b.include_center;
      cfg.seed = derive_seed(rep_seed, "algo");
      return bonus_decay_curve(setup.cls(b, M), pool, e.sizes, test, cfg);
    });
    CsvWriter csv(csv_path, config, "seed,n,mean_bonus,std_bonus");
    for (int r = 0; r < e.replications; ++r) {
      for (const DecayPoint& p : res[static_cast<std::size_t>(r)]) {
        csv.row(replication_seed(e.seed, r), p.n, p.mean_bonus, p.std_bonus);
        out << "seed " << r << " n=" << p.n << " mean bonus " << format_number(p.mean_bonus) << "\n";
      }
    }
  } else if (which == "kernel") {
    const auto res = parallel_map<Matrix>(e.replications, opts.jobs, [&](int r) {
      const std::uint64_t rep_seed = replication_seed(e.seed, r);
      auto env = setup.env(b, 0, M);
      BanditExperiment run = b;
      run.T = e.checkpoint;
      GfucbConfig cfg = gfucb_config(run, rep_seed, derive_seed(rep_seed, "algo"));
      cfg.record_width = false;
      const RunResult rr = run_gfucb(*env, setup.cls(b, M), cfg);
      Rng rng(derive_seed(rep_seed, "kernel-images"));
      std::vector<std::vector<Input>> groups(kDigits);
      for (int d = 0; d < kDigits; ++d) {
        for (int n = 0; n < e.images_per_digit; ++n) {
          groups[static_cast<std::size_t>(d)].push_back(digit_image(*setup.world, d, rng));
        }
      }
      return kernel_matrix(rr.center->rep(), groups);
    });
    CsvWriter csv(csv_path, config, "seed,i,j,value");
    for (int r = 0; r < e.replications; ++r) {
      const Matrix& C = res[static_cast<std::size_t>(r)];
      for (int i = 0; i < C.rows(); ++i) {
        for (int j = 0; j < C.cols(); ++j) csv.row(replication_seed(e.seed, r), i, j, C(i, j));
      }
      out << "seed " << r << " diagonal dominance " << format_number(diagonal_dominance(C)) << "\n";
    }
  } else {
    struct Out {
      AuditReport report;
      bool contained = true;
    };
    const FiniteInstance& inst = *setup.instance;
    const ScalarClass scalar = scalarize(inst.cls, inst.universes);
    const auto res = parallel_map<Out>(e.replications, opts.jobs, [&](int r) {
      const std::uint64_t rep_seed = replication_seed(e.seed, r);
      auto env = setup.env(b, 0, M);
      const RunResult rr = run_gfucb(*env, inst.cls, gfucb_config(b, rep_seed, derive_seed(rep_seed, "algo")));
      Out o;
      std::vector<double> widths;
      for (const EpisodeRecord& rec : rr.records) {
        widths.push_back(rec.class_width);
        o.contained = o.contained && rec.truth_contained == 1;
      }
      o.report = width_count_audit(widths, M, rr.records.back().radius, scalar, e.eps);
      return o;
    });
    CsvWriter csv(csv_path, config, "seed,eps,count,bound,eluder_dimension,eluder_exact,contained,pass");
    for (int r = 0; r < e.replications; ++r) {
      const Out& o = res[static_cast<std::size_t>(r)];
      for (const AuditRow& row : o.report.rows) {
        csv.row(replication_seed(e.seed, r), row.eps, row.count, row.bound, row.eluder_dimension,
                row.eluder_exact, o.contained, row.pass);
      }
      out << "seed " << r << (o.contained ? " contained" : " not contained")
          << (o.report.pass ? " audit pass\n" : " audit FAIL\n");
    }
  }
  out << "wrote " << csv_path.string() << "\n";
}

}  // namespace gfucb::cli
