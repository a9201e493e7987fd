// symq: reproduce the transfer-protocol figures and run custom experiments.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "symq/cli/config.hpp"
#include "symq/cli/experiment.hpp"

namespace {

using symq::cli::ExperimentConfig;

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"--distribution", "distribution", "binomial | uniform | list"},
    {"--nmax", "nmax", "maximum photon number; fig4 takes a list, e.g. 10,20,40"},
    {"--nmin", "nmin", "minimum photon number for the uniform distribution"},
    {"--weights", "weights", "explicit weights p_0,p_1,... (sets distribution = list)"},
    {"--gamma", "gamma", "coupling constant (defines the time unit)"},
    {"--tau-policy", "tau_policy", "fixed | optimal | jitter"},
    {"--tau", "tau", "interaction time; default is the optimum for the initial weights"},
    {"--tau-sigma", "tau_sigma", "jitter width for tau-policy jitter"},
    {"--sigma-rel", "sigma_rel", "relative jitter list or start:stop:step"},
    {"--m", "m", "Rabi cycle counts, e.g. 1,2,3"},
    {"--photons", "photons", "photon number for the trapping Monte Carlo"},
    {"--cutoff", "cutoff", "consecutive ground outcomes that stop a run"},
    {"--cutoffs", "cutoffs", "cutoff list or range, e.g. 1..30"},
    {"--atom-budget", "atom_budget", "maximum atoms per run"},
    {"--trials", "trials", "Monte Carlo trials per trapping point (0 skips)"},
    {"--runs", "runs", "runs per cutoff"},
    {"--seed", "seed", "master seed"},
    {"--output", "output", "output CSV path (default $SYMQ_OUTPUT_DIR/<experiment>.csv)"},
    {"--threads", "threads", "worker threads (0 = hardware concurrency)"},
};

struct Options {
  std::string config_file;
  std::map<std::string, std::string> values;
};

void add_experiment_options(CLI::App* app, Options& opts) {
  app->add_option("--config", opts.config_file, "key = value settings file")->check(CLI::ExistingFile);
  for (const auto& f : kFlags) app->add_option(f.flag, opts.values[f.key], f.help);
}

ExperimentConfig build_config(const std::string& experiment, const Options& opts, const CLI::App* app) {
  ExperimentConfig c = symq::cli::defaults_for(symq::cli::parse_experiment(experiment));
  if (!opts.config_file.empty()) {
    for (const auto& [k, v] : symq::cli::read_settings_file(opts.config_file)) {
      symq::cli::apply_setting(c, k, v);
    }
  }
  for (const auto& f : kFlags) {
    if (app->count(f.flag) > 0) symq::cli::apply_setting(c, f.key, opts.values.at(f.key));
  }
  return c;
}

int do_run(const ExperimentConfig& c) {
  const auto result = symq::cli::run_experiment(c);
  for (const auto& w : result.warnings) std::cerr << symq::cli::format(w) << '\n';
  std::cout << "wrote " << result.rows << " rows to " << result.path.string() << '\n';
  return 0;
}

int do_validate(const ExperimentConfig& c) {
  const auto diagnostics = symq::cli::validate(c);
  for (const auto& d : diagnostics) std::cout << symq::cli::format(d) << '\n';
  if (symq::cli::has_errors(diagnostics)) return 1;
  if (diagnostics.empty()) std::cout << "ok\n";
  return 0;
}

int do_check(const std::string& path) {
  const auto problems = symq::cli::check(symq::cli::read_csv_file(path));
  for (const auto& p : problems) std::cout << p << '\n';
  if (!problems.empty()) return 1;
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric-qubit transfer experiments"};
  app.set_version_flag("--version", std::string("symq ") + symq::cli::kToolVersion);
  app.require_subcommand(1);

  struct Named {
    CLI::App* app;
    std::string experiment;
    Options opts;
  };
  std::vector<std::unique_ptr<Named>> direct;
  for (const char* name : {"fig2", "fig3", "fig4", "custom"}) {
    auto n = std::make_unique<Named>();
    n->experiment = name;
    n->app = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    add_experiment_options(n->app, n->opts);
    direct.push_back(std::move(n));
  }

  Options run_opts;
  std::string run_experiment;
  auto* run_cmd = app.add_subcommand("run", "run a named experiment");
  run_cmd->add_option("experiment", run_experiment, "fig2 | fig3 | fig4 | custom")->required();
  add_experiment_options(run_cmd, run_opts);

  Options validate_opts;
  std::string validate_experiment;
  auto* validate_cmd = app.add_subcommand("validate", "check a configuration without running it");
  validate_cmd->add_option("experiment", validate_experiment, "fig2 | fig3 | fig4 | custom")->required();
  add_experiment_options(validate_cmd, validate_opts);

  std::string check_path;
  auto* check_cmd = app.add_subcommand("check", "recompute the closed-form columns of a CSV");
  check_cmd->add_option("csv", check_path, "CSV written by symq")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& n : direct) {
      if (n->app->parsed()) return do_run(build_config(n->experiment, n->opts, n->app));
    }
    if (run_cmd->parsed()) return do_run(build_config(run_experiment, run_opts, run_cmd));
    if (validate_cmd->parsed()) {
      return do_validate(build_config(validate_experiment, validate_opts, validate_cmd));
    }
    if (check_cmd->parsed()) return do_check(check_path);
  } catch (const std::exception& e) {
    std::cerr << "symq: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
