#include "symq/cli/experiment.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "symq/cloning.hpp"
#include "symq/parallel.hpp"
#include "symq/protocol.hpp"
#include "symq/rng.hpp"
#include "symq/trapping.hpp"

namespace symq::cli {
namespace {

int single_nmax(const ExperimentConfig& c) {
  if (c.distribution == "list") return static_cast<int>(c.weights.size()) - 1;
  return c.nmax.front();
}

double resolved_tau(const ExperimentConfig& c, const PhotonDistribution& initial) {
  if (c.tau) return *c.tau;
  return optimal_tau(WeightedEnsemble::make(initial), c.gamma, default_tau_bounds(c.gamma));
}

TauPolicy make_policy(const ExperimentConfig& c, const PhotonDistribution& initial) {
  switch (c.tau_mode) {
    case TauMode::fixed: return FixedTau{resolved_tau(c, initial)};
    case TauMode::optimal: return OptimalEachStep{};
    case TauMode::jitter: return JitteredTau{resolved_tau(c, initial), c.tau_sigma};
  }
  throw std::logic_error("unhandled tau mode");
}

const char* tau_mode_name(TauMode m) {
  switch (m) {
    case TauMode::fixed: return "fixed";
    case TauMode::optimal: return "optimal";
    case TauMode::jitter: return "jitter";
  }
  return "unknown";
}

std::string str(int v) { return std::to_string(v); }
std::string str(double v) { return format_real(v); }

CsvTable header(const ExperimentConfig& c) {
  CsvTable t;
  t.metadata.emplace_back("tool", std::string("symq ") + kToolVersion);
  t.metadata.emplace_back("experiment", to_string(c.experiment));
  t.metadata.emplace_back("seed", c.seed ? std::to_string(*c.seed) : "none");
  t.metadata.emplace_back("rng", std::string(kRngIdentity));
  for (const auto& [k, v] : c.echo) t.metadata.emplace_back("config", k + " = " + v);
  return t;
}

void append_weights(CsvTable& t, int step, const std::vector<double>& weights, int transferred,
                    const std::string& tau, const std::string& outcome, bool with_event) {
  const std::string f = str(atom_fidelity(weights));
  for (std::size_t n = 0; n < weights.size(); ++n) {
    std::vector<std::string> row{str(step), str(static_cast<int>(n)), str(weights[n]), f, str(transferred)};
    if (with_event) {
      row.push_back(tau);
      row.push_back(outcome);
    }
    t.rows.push_back(std::move(row));
  }
}

CsvTable weights_evolution(const ExperimentConfig& c) {
  const bool with_event = c.experiment == Experiment::custom;
  const PhotonDistribution initial = initial_distribution(c, single_nmax(c));
  RunConfig rc;
  rc.initial = initial;
  rc.gamma = c.gamma;
  rc.policy = make_policy(c, initial);
  rc.cutoff = c.cutoff;
  rc.atom_budget = c.atom_budget;
  Rng rng = make_stream(*c.seed, 0);
  const ProtocolTrace trace = run(rc, rng);

  CsvTable t = header(c);
  t.metadata.emplace_back("streams", "one stream: make_stream(seed, 0)");
  t.metadata.emplace_back("tau_policy", tau_mode_name(c.tau_mode));
  if (c.tau_mode != TauMode::optimal) t.metadata.emplace_back("tau", str(resolved_tau(c, initial)));
  t.metadata.emplace_back("terminal", to_string(trace.terminal));
  t.metadata.emplace_back("atoms", std::to_string(trace.events.size()));
  t.columns = {"step", "n", "p_n", "F_atom", "transferred"};
  if (with_event) {
    t.columns.push_back("tau");
    t.columns.push_back("outcome");
  }
  append_weights(t, 0, trace.initial_weights, 0, "", "initial", with_event);
  for (const auto& ev : trace.events) {
    append_weights(t, ev.atom_index + 1, ev.weights_after, ev.transferred_after, str(ev.tau),
                   to_string(ev.outcome), with_event);
  }
  return t;
}

CsvTable trapping_curves(const ExperimentConfig& c) {
  CsvTable t = header(c);
  t.metadata.emplace_back("photons", str(c.photons));
  t.metadata.emplace_back("trials", std::to_string(c.trials));
  t.metadata.emplace_back("streams",
                          "point k (row order) uses master split_seed(seed, k), then "
                          "monte_carlo_escape streams of " +
                              std::to_string(kEscapeTrialsPerStream) + " trials");
  t.columns = {"m_rabi", "sigma_rel", "a_mean_closed", "a_mean_mc", "mc_stderr"};
  std::uint64_t point = 0;
  for (int m : c.m_rabi) {
    for (double s : c.sigma_rel) {
      std::vector<std::string> row{str(m), str(s), str(mean_atoms_rel(m, s))};
      if (c.trials > 0) {
        const auto est = monte_carlo_escape(TrapSpec::make(c.photons, m, c.gamma, s),
                                            static_cast<std::size_t>(c.trials),
                                            split_seed(*c.seed, point), c.threads);
        row.push_back(str(est.mean));
        row.push_back(str(est.standard_error));
      } else {
        row.push_back("nan");
        row.push_back("nan");
      }
      t.rows.push_back(std::move(row));
      ++point;
    }
  }
  return t;
}

CsvTable quality_cutoff(const ExperimentConfig& c) {
  CsvTable t = header(c);
  t.metadata.emplace_back("runs", std::to_string(c.runs));
  t.metadata.emplace_back("tau_policy", tau_mode_name(c.tau_mode));
  t.metadata.emplace_back("streams",
                          "run r at cutoff k for nmax N uses make_stream(split_seed(seed, N), "
                          "(k << 32) | r)");
  t.metadata.emplace_back("quality_convention", "runs ending with nothing transferred count as 0");
  t.columns = {"cutoff", "mean_quality", "stderr", "n_max"};

  std::vector<int> nmax_values = c.nmax;
  if (c.distribution == "list") nmax_values = {single_nmax(c)};
  for (int nmax : nmax_values) {
    const PhotonDistribution initial = initial_distribution(c, nmax);
    RunConfig rc;
    rc.initial = initial;
    rc.gamma = c.gamma;
    rc.policy = make_policy(c, initial);
    rc.atom_budget = c.atom_budget;
    if (c.tau_mode != TauMode::optimal) {
      t.metadata.emplace_back("tau", "nmax=" + str(nmax) + " tau=" + str(resolved_tau(c, initial)));
    }
    const std::uint64_t master = split_seed(*c.seed, static_cast<std::uint64_t>(nmax));
    for (int cutoff : c.cutoffs) {
      rc.cutoff = cutoff;
      const auto qualities = parallel_map<double>(
          static_cast<std::size_t>(c.runs),
          [&](std::size_t r) {
            Rng rng = make_stream(master, (static_cast<std::uint64_t>(cutoff) << 32) | r);
            return run(rc, rng).quality.value_or(0.0);
          },
          c.threads);
      double sum = 0.0;
      for (double q : qualities) sum += q;
      const double mean = sum / c.runs;
      double ss = 0.0;
      for (double q : qualities) ss += (q - mean) * (q - mean);
      const double se = c.runs > 1 ? std::sqrt(ss / (c.runs - 1) / c.runs) : 0.0;
      t.rows.push_back({str(cutoff), str(mean), str(se), str(nmax)});
    }
  }
  return t;
}

double cell_real(const CsvTable& t, const std::vector<std::string>& row, const std::string& col) {
  const std::string& s = row.at(t.column(col));
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("bad number '" + s + "' in column " + col);
  return v;
}

}  // namespace

CsvTable compute(const ExperimentConfig& config) {
  const auto diagnostics = validate(config);
  if (has_errors(diagnostics)) {
    std::string msg = "invalid config:";
    for (const auto& d : diagnostics) {
      if (d.severity == Severity::error) msg += "\n  " + format(d);
    }
    throw std::invalid_argument(msg);
  }
  switch (config.experiment) {
    case Experiment::fig2:
    case Experiment::custom: return weights_evolution(config);
    case Experiment::fig3: return trapping_curves(config);
    case Experiment::fig4: return quality_cutoff(config);
  }
  throw std::logic_error("unhandled experiment");
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult r;
  for (auto& d : validate(config)) {
    if (d.severity == Severity::warning) r.warnings.push_back(d);
  }
  const CsvTable table = compute(config);
  r.path = output_path(config);
  write_csv_file(r.path, table);
  r.rows = table.rows.size();
  return r;
}

ExperimentConfig config_from_metadata(const CsvTable& table) {
  const auto name = table.meta("experiment");
  if (!name) throw std::invalid_argument("CSV metadata has no experiment entry");
  ExperimentConfig c = defaults_for(parse_experiment(*name));
  for (const auto& line : table.meta_all("config")) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw std::invalid_argument("bad config metadata '" + line + "'");
    apply_setting(c, line.substr(0, eq), line.substr(eq + 3));
  }
  return c;
}

std::vector<std::string> check(const CsvTable& t) {
  std::vector<std::string> problems;
  auto fail = [&](std::size_t row, const std::string& what) {
    problems.push_back("row " + std::to_string(row + 1) + ": " + what);
  };
  ExperimentConfig c;
  try {
    c = config_from_metadata(t);
  } catch (const std::exception& e) {
    return {e.what()};
  }

  try {
    if (c.experiment == Experiment::fig3) {
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        const int m = static_cast<int>(cell_real(t, row, "m_rabi"));
        const double s = cell_real(t, row, "sigma_rel");
        const double closed = cell_real(t, row, "a_mean_closed");
        if (closed != mean_atoms_rel(m, s)) {
          fail(i, "a_mean_closed " + row[t.column("a_mean_closed")] + " != " +
                      format_real(mean_atoms_rel(m, s)));
        }
      }
      if (t.rows.size() != c.m_rabi.size() * c.sigma_rel.size()) {
        problems.push_back("expected " + std::to_string(c.m_rabi.size() * c.sigma_rel.size()) +
                           " rows, found " + std::to_string(t.rows.size()));
      }
    } else if (c.experiment == Experiment::fig4) {
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double q = cell_real(t, t.rows[i], "mean_quality");
        const double se = cell_real(t, t.rows[i], "stderr");
        if (!std::isfinite(q) || q < 0.0) fail(i, "mean_quality out of range");
        if (!(se >= 0.0)) fail(i, "negative stderr");
      }
    } else {
      const PhotonDistribution initial = initial_distribution(c, single_nmax(c));
      std::vector<double> weights;
      int current_step = -1;
      std::size_t first_row = 0;
      auto close_step = [&] {
        if (current_step < 0) return;
        double total = 0.0;
        for (double p : weights) total += p;
        if (std::abs(total - 1.0) > 1e-12) fail(first_row, "weights of step sum to " + format_real(total));
        const double f = cell_real(t, t.rows[first_row], "F_atom");
        if (std::abs(f - atom_fidelity(weights)) > 1e-15) fail(first_row, "F_atom disagrees with weights");
        if (current_step == 0 && weights != initial) fail(first_row, "step 0 is not the initial distribution");
      };
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const int step = static_cast<int>(cell_real(t, t.rows[i], "step"));
        if (step != current_step) {
          close_step();
          current_step = step;
          first_row = i;
          weights.clear();
        }
        const int n = static_cast<int>(cell_real(t, t.rows[i], "n"));
        const double p = cell_real(t, t.rows[i], "p_n");
        const int transferred = static_cast<int>(cell_real(t, t.rows[i], "transferred"));
        if (n < transferred && p != 0.0) fail(i, "weight below the transferred count");
        if (n != static_cast<int>(weights.size())) fail(i, "n out of order");
        weights.push_back(p);
      }
      close_step();
    }
  } catch (const std::exception& e) {
    problems.push_back(e.what());
  }
  return problems;
}

}  // namespace symq::cli
