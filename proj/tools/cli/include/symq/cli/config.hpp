#pragma once

// Experiment configuration for the symq harness. Settings come from a
// `key = value` file and/or command-line flags; both go through
// apply_setting so a flag and a file line with the same key behave alike.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symq/cloning.hpp"

namespace symq::cli {

enum class Experiment { fig2, fig3, fig4, custom };

const char* to_string(Experiment e);
Experiment parse_experiment(const std::string& name);

enum class TauMode { fixed, optimal, jitter };

struct ExperimentConfig {
  Experiment experiment = Experiment::custom;

  // Initial photon-number distribution: binomial(nmax), uniform(nmin..nmax)
  // or an explicit weight list indexed from n = 0.
  std::string distribution = "binomial";
  std::vector<int> nmax;            // several values only for fig4
  int nmin = 1;
  std::vector<double> weights;      // distribution = list

  double gamma = 1.0;
  TauMode tau_mode = TauMode::fixed;
  std::optional<double> tau;        // fixed/jitter; default is the initial optimum
  double tau_sigma = 0.0;           // jitter width

  std::vector<double> sigma_rel;    // fig3
  std::vector<int> m_rabi;          // fig3
  int photons = 4;                  // fig3 Monte Carlo photon number

  int cutoff = 20;                  // fig2, custom
  std::vector<int> cutoffs;         // fig4
  int atom_budget = 10000;
  long trials = 10000;              // fig3 Monte Carlo trials per point; 0 skips it
  int runs = 1000;                  // fig4 runs per cutoff

  std::optional<std::uint64_t> seed;
  std::string output;               // file path; empty means default
  unsigned threads = 0;

  /// Settings in file order, echoed into output metadata.
  std::vector<std::pair<std::string, std::string>> echo;
};

/// Experiment-specific defaults filled in before any setting is applied.
ExperimentConfig defaults_for(Experiment e);

/// Applies one `key = value` setting. Throws std::invalid_argument whose
/// message names the key.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Parses `key = value` lines; `#` starts a comment. Returns settings in
/// order. Throws std::invalid_argument with the line number on malformed
/// input.
std::vector<std::pair<std::string, std::string>> parse_settings(std::istream& in);
std::vector<std::pair<std::string, std::string>> read_settings_file(const std::filesystem::path& path);

/// Keys accepted by apply_setting.
const std::vector<std::string>& known_keys();

/// Value lists: "a,b,c", integer ranges "1..30" and stepped ranges
/// "start:stop:step" (inclusive).
std::vector<double> parse_real_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

/// The initial distribution for a given n_max.
PhotonDistribution initial_distribution(const ExperimentConfig& config, int nmax);

enum class Severity { warning, error };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string field;
  std::string message;
};

/// Pure check; never throws for a bad config.
std::vector<Diagnostic> validate(const ExperimentConfig& config);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

std::string format(const Diagnostic& d);

/// Output path: config.output when set, otherwise <dir>/<experiment>.csv
/// with dir taken from $SYMQ_OUTPUT_DIR or ".".
std::filesystem::path output_path(const ExperimentConfig& config);

inline constexpr const char* kOutputDirEnv = "SYMQ_OUTPUT_DIR";

}  // namespace symq::cli
