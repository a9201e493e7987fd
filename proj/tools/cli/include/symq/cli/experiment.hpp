#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "symq/cli/config.hpp"
#include "symq/cli/csv.hpp"

namespace symq::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Runs the experiment in memory. Throws std::invalid_argument listing the
/// error diagnostics when the config is invalid.
CsvTable compute(const ExperimentConfig& config);

struct ExperimentResult {
  std::filesystem::path path;
  std::size_t rows = 0;
  std::vector<Diagnostic> warnings;
};

/// compute() then write the CSV to output_path(config).
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Rebuilds the config recorded in a CSV's metadata block.
ExperimentConfig config_from_metadata(const CsvTable& table);

/// Recomputes the closed-form and bookkeeping columns of a CSV produced by
/// compute(). An empty result means every check passed.
std::vector<std::string> check(const CsvTable& table);

}  // namespace symq::cli
