// gfucb: run bandit and MDP experiments, eluder dimensions and diagnostics
// from YAML configs.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gfucb/cli.hpp"
#include "gfucb/errors.hpp"

namespace {

using namespace gfucb::cli;

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir = ".";
  bool dry_run = false;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "YAML experiment config")->required();
  cmd->add_option("--seed", f.seed, "Override the run seed");
  cmd->add_option("--jobs", f.jobs, "Replications run in parallel")->check(CLI::PositiveNumber);
  cmd->add_option("--out-dir", f.out_dir, "Directory for the artifacts");
  cmd->add_flag("--dry-run", f.dry_run, "Print the resolved config and exit");
}

RunOptions options(const CLI::App* cmd, const Flags& f) {
  RunOptions o;
  if (cmd->count("--seed") > 0) o.seed = f.seed;
  o.jobs = f.jobs;
  o.out_dir = f.out_dir;
  o.dry_run = f.dry_run;
  if (!o.dry_run) std::filesystem::create_directories(o.out_dir);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized functional UCB experiments"};
  app.require_subcommand(1);
  Flags flags;
  std::string which;

  auto* bandit = app.add_subcommand("run-bandit", "Multitask contextual bandit regret curves");
  add_flags(bandit, flags);
  auto* mdp = app.add_subcommand("run-mdp", "Multitask linear MDP regret curves");
  add_flags(mdp, flags);
  auto* eluder = app.add_subcommand("eluder", "Eluder dimension of a finite scalar class");
  add_flags(eluder, flags);
  auto* diagnose = app.add_subcommand("diagnose", "Bonus, decay, kernel and width-count diagnostics");
  add_flags(diagnose, flags);
  diagnose->add_option("which", which, "bonus | decay | kernel | width-audit")
      ->required()
      ->check(CLI::IsMember({"bonus", "decay", "kernel", "width-audit"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (bandit->parsed()) {
      BanditExperiment e = load_bandit(flags.config);
      cmd_run_bandit(std::move(e), options(bandit, flags), std::cout);
    } else if (mdp->parsed()) {
      MdpExperiment e = load_mdp(flags.config);
      cmd_run_mdp(std::move(e), options(mdp, flags), std::cout);
    } else if (eluder->parsed()) {
      cmd_eluder(load_eluder(flags.config), options(eluder, flags), std::cout);
    } else {
      DiagnoseExperiment e = load_diagnose(flags.config);
      cmd_diagnose(std::move(e), which, options(diagnose, flags), std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
