#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaussian.hpp"
#include "geometry.hpp"
#include "sampler.hpp"
#include "stats.hpp"

namespace linopt {

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside one trial.
class TrialError : public std::runtime_error {
 public:
  TrialError(std::size_t trial, const std::string& what);
  std::size_t trial() const { return trial_; }

 private:
  std::size_t trial_;
};

enum class ExperimentKind {
  entropy_sweep,
  uut_heatmap,
  walk_check,
  mixing,
  meeting,
  decouple,
  compress_sweep,
  bounds_audit,
};

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(const std::string& name);
const std::vector<std::string>& experiment_kind_names();

struct GeometryConfig {
  std::string kind = "brickwall";  // brickwall | brickwork | custom | octahedral
  std::size_t m = 0;
  std::size_t dim = 1;
  std::vector<std::size_t> order;  // 1-based slots, L1 = 1, R1 = 2, L2 = 3, ...
  std::vector<std::vector<std::vector<std::size_t>>> layers;  // custom only
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::entropy_sweep;
  std::size_t n = 0;
  std::vector<std::size_t> depths;
  double s = 1.0;
  std::vector<std::size_t> gamma;  // 1-based; empty means the first k modes
  std::size_t k = 0;               // 0 means n / 2
  std::vector<std::size_t> box;    // brickwork corner box k_1..k_D, overrides gamma
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  GeometryConfig geometry;
  double kappa = 2.0;
  std::vector<double> c_bands{2.0};
  double hs_tolerance = 0.1;
  std::optional<double> epsilon;       // mixing / meeting / decouple
  std::optional<double> epsilon_meet;  // decouple only
  std::size_t t_max = 100000;
  bool per_trial = false;
  std::size_t haar_trials = 0;  // entropy-sweep saturation reference
  std::size_t start = 1;        // walk-check reflection start mode

  static ExperimentConfig from_json(const nlohmann::json& j);
  /// Canonical echo; its dump is what the run directory hash covers.
  nlohmann::json to_json() const;
  std::string hash() const;
};

GeometrySpec build_geometry(const ExperimentConfig& config);
Subsystem build_subsystem(const ExperimentConfig& config, const GeometrySpec& geometry);

struct OutputFile {
  std::string name;
  std::string content;
};

struct ExperimentOutput {
  std::vector<OutputFile> files;
  nlohmann::json summary;
};

/// Runs the experiment in memory. Output bytes depend only on the config.
ExperimentOutput compute_experiment(const ExperimentConfig& config, unsigned threads);

struct RunOptions {
  std::filesystem::path out_dir = "runs";
  unsigned threads = 0;  // 0: LINOPT_THREADS, then hardware concurrency
};

struct RunRecord {
  std::string config_hash;
  std::string build_id;
  std::filesystem::path directory;
  std::filesystem::path manifest;
  double wall_seconds = 0.0;
  nlohmann::json summary;
};

/// Computes and writes <out_dir>/<config hash>/{*.csv, manifest.json}.
RunRecord run_experiment(const ExperimentConfig& config, const RunOptions& options);

std::string build_id();

// Building blocks shared with the acceptance suite.

struct EntropySweep {
  std::vector<std::size_t> depths;
  std::vector<RunningStats> stats;           // per depth, in trial order
  std::vector<std::vector<double>> values;   // [trial][depth index]
};

/// Grows one realization per trial and records S_2 at each depth.
EntropySweep entropy_sweep(const GeometrySpec& geometry, const Subsystem& gamma, double s,
                           const std::vector<std::size_t>& depths, std::size_t trials,
                           RngStream stream, unsigned threads);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Mean over x of value(x, x + offset) for offset = 0..n-1.
std::vector<double> diagonal_profile(const RealMatrix& values);

struct DecouplingDepth {
  std::size_t t_mix = 0;
  std::size_t t_meet = 0;  // steps, rounded up from layers
  std::size_t depth = 0;
};

/// t_mix(eps_mix) + ceil(t_meet(eps_meet) layers / M), worst of the forward
/// and time-reversed walks. Throws when either horizon is exceeded.
DecouplingDepth decoupling_depth(const GeometrySpec& geometry, double eps_mix, double eps_meet,
                                 std::size_t t_max);

}  // namespace linopt
