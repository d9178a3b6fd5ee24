#pragma once

// Experiment runner behind the gfucb command: YAML configs, replications
// on a thread pool, and CSV / JSON artifacts.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfucb/analysis.hpp"
#include "gfucb/bandit.hpp"
#include "gfucb/confidence.hpp"
#include "gfucb/erm.hpp"
#include "gfucb/mdp.hpp"

namespace gfucb::cli {

/// Malformed or invalid configuration; the message starts with
/// "file:line:column:" when the position is known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitRuntime = 3 };

/// One algorithm over the tasks split into consecutive groups of
/// `group_size`.
struct BanditRun {
  std::string algo = "gfucb";  // gfucb | eps_greedy
  int group_size = 1;

  std::string label() const;
};

struct BanditExperiment {
  std::string run_id = "bandit";
  std::uint64_t seed = 0;
  int replications = 1;
  int T = 100;
  /// Summary checkpoints; empty selects T.
  std::vector<int> checkpoints;
  bool record_width = true;
  bool include_center = true;

  std::string env = "digit";  // digit | finite
  DigitWorldConfig digit;
  int digit_tasks = kDigits;
  bool linear_maps = false;
  int actions_per_round = 4;
  FiniteInstanceConfig finite;
  double finite_noise = 0.1;

  TwoLayerShape shape;
  /// 0 selects sqrt(k).
  double head_norm_bound = 0.0;
  BetaConfig beta;
  SearchConfig search;
  TrainConfig train;
  double epsilon = 0.1;
  std::vector<BanditRun> runs{BanditRun{}};

  int total_tasks() const { return env == "finite" ? finite.tasks : digit_tasks; }
};

struct MdpExperiment {
  std::string run_id = "mdp";
  std::uint64_t seed = 0;
  int replications = 1;
  int T = 50;
  std::vector<int> checkpoints;
  bool include_center = true;
  LinearMdpConfig env;
  LevelClassConfig classes;
  /// level: the Lemma-level radius from delta and ibe. practical: a log(b t + c)
  /// on the t - 1 logged episodes.
  std::string radius = "level";
  double delta = 0.1;
  double ibe = 0.0;
  BetaConfig practical;
};

struct EluderExperiment {
  std::string run_id = "eluder";
  /// Explicit table, or the scalarized class of a random finite instance.
  std::optional<ScalarClass> table;
  FiniteInstanceConfig instance;
  std::vector<double> eps{1.0, 0.5, 0.1};
  long long node_budget = 1'000'000;
};

struct DiagnoseExperiment {
  std::string run_id = "diagnose";
  std::uint64_t seed = 0;
  int replications = 1;
  /// Base bandit setup; `runs` is ignored.
  BanditExperiment bandit;
  /// bonus: checkpoint step, test-set size.
  int checkpoint = 50;
  int test_points = 100;
  /// decay: sample sizes in rounds.
  std::vector<int> sizes{5, 20, 80};
  int decay_horizon = 300;
  /// kernel: tasks per trained representation and images per digit.
  int group_size = 10;
  int images_per_digit = 20;
  /// width-audit grid.
  std::vector<double> eps{0.1, 0.2, 0.5, 1.0};
};

BanditExperiment load_bandit(const std::filesystem::path& path);
MdpExperiment load_mdp(const std::filesystem::path& path);
EluderExperiment load_eluder(const std::filesystem::path& path);
DiagnoseExperiment load_diagnose(const std::filesystem::path& path);

/// Fully resolved configs as single-line JSON text.
std::string to_json(const BanditExperiment& e);
std::string to_json(const MdpExperiment& e);
std::string to_json(const EluderExperiment& e);
std::string to_json(const DiagnoseExperiment& e);

/// "%.9g"; NaN prints as "nan".
std::string format_number(double v);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::filesystem::path out_dir = ".";
  bool dry_run = false;
};

/// Each command writes its artifacts under opts.out_dir and a short report
/// to `out`; errors propagate as exceptions.
void cmd_run_bandit(BanditExperiment e, const RunOptions& opts, std::ostream& out);
void cmd_run_mdp(MdpExperiment e, const RunOptions& opts, std::ostream& out);
void cmd_eluder(const EluderExperiment& e, const RunOptions& opts, std::ostream& out);
/// which: bonus | decay | kernel | width-audit
void cmd_diagnose(DiagnoseExperiment e, const std::string& which, const RunOptions& opts,
                  std::ostream& out);

/// Replication seed r of a run seed.
std::uint64_t replication_seed(std::uint64_t seed, int r);

/// Runs fn(0..count-1) on up to `jobs` threads; results come back in index
/// order. The first exception is rethrown after all workers stop.
template <class Result, class Fn>
std::vector<Result> parallel_map(int count, int jobs, Fn fn);

}  // namespace gfucb::cli

#include "gfucb/detail/parallel_map.hpp"
