#include "symq/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "symq/protocol.hpp"

namespace symq::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_real(const std::string& text) {
  const std::string t = trim(text);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return v;
}

template <typename Int>
Int to_integer(const std::string& text) {
  const std::string t = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("not an integer: '" + text + "'");
  }
  return v;
}

// Snap a stepped-range value to 12 decimals so 0.01:0.2:0.01 yields 0.06,
// not 0.060000000000000005.
double snap(double v) { return std::round(v * 1e12) / 1e12; }

void add(std::vector<Diagnostic>& out, Severity s, std::string field, std::string message) {
  out.push_back(Diagnostic{s, std::move(field), std::move(message)});
}

}  // namespace

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::fig2: return "fig2";
    case Experiment::fig3: return "fig3";
    case Experiment::fig4: return "fig4";
    case Experiment::custom: return "custom";
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  if (name == "fig2" || name == "weights-evolution") return Experiment::fig2;
  if (name == "fig3" || name == "trapping-curves") return Experiment::fig3;
  if (name == "fig4" || name == "quality-cutoff") return Experiment::fig4;
  if (name == "custom") return Experiment::custom;
  throw std::invalid_argument("experiment: unknown name '" + name + "'");
}

ExperimentConfig defaults_for(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::fig2:
      c.nmax = {6};
      break;
    case Experiment::fig3:
      c.sigma_rel = parse_real_list("0.01:0.20:0.01");
      c.m_rabi = {1, 2, 3};
      break;
    case Experiment::fig4:
      c.nmax = {10, 20, 40};
      c.cutoffs = parse_int_list("1..30");
      break;
    case Experiment::custom:
      c.nmax = {6};
      c.tau_mode = TauMode::optimal;
      break;
  }
  return c;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "distribution", "nmax",      "nmin",   "weights", "gamma",
      "tau_policy", "tau",          "tau_sigma", "sigma_rel", "m",    "photons",
      "cutoff",     "cutoffs",      "atom_budget", "trials", "runs",  "seed",
      "output",     "threads"};
  return keys;
}

std::vector<double> parse_real_list(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("empty list");
  const auto parts = split(t, ':');
  if (parts.size() == 3) {
    const double start = to_real(parts[0]);
    const double stop = to_real(parts[1]);
    const double step = to_real(parts[2]);
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("bad range '" + t + "'");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out;
    for (long i = 0; i < count; ++i) out.push_back(snap(start + static_cast<double>(i) * step));
    return out;
  }
  if (parts.size() != 1) throw std::invalid_argument("bad range '" + t + "'");
  std::vector<double> out;
  for (const auto& item : split(t, ',')) out.push_back(to_real(item));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("empty list");
  std::vector<int> out;
  for (const auto& item : split(t, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_integer<int>(item));
      continue;
    }
    const int lo = to_integer<int>(item.substr(0, dots));
    const int hi = to_integer<int>(item.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("bad range '" + item + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

void apply_setting(ExperimentConfig& c, const std::string& raw_key, const std::string& value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string v = trim(value);
  try {
    if (key == "experiment") {
      if (parse_experiment(v) != c.experiment) {
        throw std::invalid_argument("config is for '" + v + "', running '" + to_string(c.experiment) + "'");
      }
    } else if (key == "distribution") {
      if (v != "binomial" && v != "uniform" && v != "list") {
        throw std::invalid_argument("expected binomial, uniform or list");
      }
      c.distribution = v;
    } else if (key == "nmax") {
      c.nmax = parse_int_list(v);
    } else if (key == "nmin") {
      c.nmin = to_integer<int>(v);
    } else if (key == "weights") {
      c.weights = parse_real_list(v);
      c.distribution = "list";
    } else if (key == "gamma") {
      c.gamma = to_real(v);
    } else if (key == "tau_policy") {
      if (v == "fixed") c.tau_mode = TauMode::fixed;
      else if (v == "optimal") c.tau_mode = TauMode::optimal;
      else if (v == "jitter") c.tau_mode = TauMode::jitter;
      else throw std::invalid_argument("expected fixed, optimal or jitter");
    } else if (key == "tau") {
      c.tau = to_real(v);
    } else if (key == "tau_sigma") {
      c.tau_sigma = to_real(v);
    } else if (key == "sigma_rel") {
      c.sigma_rel = parse_real_list(v);
    } else if (key == "m") {
      c.m_rabi = parse_int_list(v);
    } else if (key == "photons") {
      c.photons = to_integer<int>(v);
    } else if (key == "cutoff") {
      c.cutoff = to_integer<int>(v);
    } else if (key == "cutoffs") {
      c.cutoffs = parse_int_list(v);
    } else if (key == "atom_budget") {
      c.atom_budget = to_integer<int>(v);
    } else if (key == "trials") {
      c.trials = to_integer<long>(v);
    } else if (key == "runs") {
      c.runs = to_integer<int>(v);
    } else if (key == "seed") {
      c.seed = to_integer<std::uint64_t>(v);
    } else if (key == "output") {
      c.output = v;
    } else if (key == "threads") {
      c.threads = to_integer<unsigned>(v);
    } else {
      throw std::invalid_argument("unknown key");
    }
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(key + ": " + e.what());
  }
  for (auto& kv : c.echo) {
    if (kv.first == key) {
      kv.second = v;
      return;
    }
  }
  c.echo.emplace_back(key, v);
}

std::vector<std::pair<std::string, std::string>> parse_settings(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(number) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("line " + std::to_string(number) + ": empty key");
    out.emplace_back(std::move(key), trim(line.substr(eq + 1)));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_settings_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path.string());
  try {
    return parse_settings(in);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

PhotonDistribution initial_distribution(const ExperimentConfig& c, int nmax) {
  if (c.distribution == "binomial") return binomial_distribution(nmax);
  if (c.distribution == "uniform") return uniform_distribution(c.nmin, nmax);
  return c.weights;
}

std::vector<Diagnostic> validate(const ExperimentConfig& c) {
  std::vector<Diagnostic> out;
  const Experiment e = c.experiment;
  const bool runs_protocol = e != Experiment::fig3;

  if (!(c.gamma > 0.0) || !std::isfinite(c.gamma)) add(out, Severity::error, "gamma", "must be positive");

  std::vector<int> nmax_values = c.nmax;
  if (runs_protocol) {
    if (c.distribution == "list") {
      if (c.weights.empty()) add(out, Severity::error, "weights", "empty weight list");
      nmax_values = {static_cast<int>(c.weights.size()) - 1};
      if (e == Experiment::fig4 && c.nmax.size() > 1) {
        add(out, Severity::error, "nmax", "several nmax values need a binomial or uniform distribution");
      }
    } else {
      if (c.nmax.empty()) add(out, Severity::error, "nmax", "at least one value required");
      if (e != Experiment::fig4 && c.nmax.size() > 1) {
        add(out, Severity::error, "nmax", "only fig4 accepts several values");
      }
    }
    for (int n : nmax_values) {
      if (n < 1) add(out, Severity::error, "nmax", "must be >= 1");
      if (n > 63) add(out, Severity::error, "nmax", "must be <= 63");
    }
    if (c.distribution == "uniform") {
      for (int n : nmax_values) {
        if (c.nmin < 1 || c.nmin > n) add(out, Severity::error, "nmin", "need 1 <= nmin <= nmax");
      }
    }
  }
  if (has_errors(out)) return out;

  // Distribution and tau checks need a valid distribution.
  if (runs_protocol) {
    for (int n : nmax_values) {
      PhotonDistribution w;
      try {
        w = initial_distribution(c, n);
        (void)WeightedEnsemble::make(w);
      } catch (const std::exception& ex) {
        add(out, Severity::error, "weights", ex.what());
        continue;
      }
      if (!w.empty() && w[0] > 0.0) {
        add(out, Severity::error, "weights", "weight on n=0; every run needs at least one photon");
        continue;
      }
      if (c.tau_mode == TauMode::optimal) continue;
      double tau = 0.0;
      if (c.tau) {
        tau = *c.tau;
      } else if (c.gamma > 0.0) {
        tau = optimal_tau(WeightedEnsemble::make(w), c.gamma, default_tau_bounds(c.gamma));
      }
      const double bound = trapping_safe_tau(n, c.gamma);
      if (tau >= bound) {
        std::ostringstream msg;
        msg << "tau = " << tau << " is at or above the trapping bound pi/(gamma sqrt(nmax)) = "
            << bound << " for nmax = " << n << "; some photon numbers can be trapped";
        add(out, Severity::warning, "tau", msg.str());
      }
    }
    if (c.tau && !(*c.tau > 0.0)) add(out, Severity::error, "tau", "must be positive");
    if (c.tau_mode == TauMode::jitter && !(c.tau_sigma >= 0.0)) {
      add(out, Severity::error, "tau_sigma", "must be >= 0");
    }
    if (c.atom_budget < 1) add(out, Severity::error, "atom_budget", "must be >= 1");
  }

  for (double s : c.sigma_rel) {
    if (!(s >= 0.0)) add(out, Severity::error, "sigma_rel", "must be >= 0");
  }
  if (e == Experiment::fig3) {
    if (c.sigma_rel.empty()) add(out, Severity::error, "sigma_rel", "at least one value required");
    if (c.m_rabi.empty()) add(out, Severity::error, "m", "at least one value required");
    for (int m : c.m_rabi) {
      if (m < 1) add(out, Severity::error, "m", "must be >= 1");
    }
    if (c.photons < 1) add(out, Severity::error, "photons", "must be >= 1");
    if (c.trials < 0) add(out, Severity::error, "trials", "must be >= 0");
    if (c.trials > 0) {
      for (double s : c.sigma_rel) {
        if (s == 0.0) add(out, Severity::error, "sigma_rel", "0 never escapes; Monte Carlo needs > 0");
      }
    }
  }
  if ((e == Experiment::fig2 || e == Experiment::custom) && c.cutoff < 1) {
    add(out, Severity::error, "cutoff", "must be >= 1");
  }
  if (e == Experiment::fig4) {
    if (c.cutoffs.empty()) add(out, Severity::error, "cutoffs", "at least one value required");
    for (int k : c.cutoffs) {
      if (k < 1) add(out, Severity::error, "cutoffs", "must be >= 1");
    }
    if (c.runs < 1) add(out, Severity::error, "runs", "must be >= 1");
  }

  const bool stochastic = e != Experiment::fig3 || c.trials > 0;
  if (stochastic && !c.seed) add(out, Severity::error, "seed", "required for a stochastic experiment");
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::string format(const Diagnostic& d) {
  return std::string(d.severity == Severity::error ? "error" : "warning") + ": " + d.field + ": " +
         d.message;
}

std::filesystem::path output_path(const ExperimentConfig& c) {
  if (!c.output.empty()) return c.output;
  const char* dir = std::getenv(kOutputDirEnv);
  const std::filesystem::path base = dir && *dir ? std::filesystem::path(dir) : std::filesystem::path(".");
  return base / (std::string(to_string(c.experiment)) + ".csv");
}

}  // namespace symq::cli
