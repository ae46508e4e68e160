#pragma once

// Configuration-driven experiment runner.
//
// Config schema, version 1 (YAML):
//
//   version: 1                       # optional, must be 1 when present
//   kind: step-response | frequency-sweep | spectrum | classify | ledger | planar-turn
//   name: rho045                     # artifact file prefix, default = kind
//   output: out/run                  # relative to the config file
//   seed: 1                          # random models and planar masses
//   model:                           # not used by planar-turn
//     type: standard                 # standard | custom | random
//     n: 100                         # followers (standard); agents (random)
//     rho: 0.5
//     r: 0.5                         # default: rho
//     f: -1
//     g: -2
//     spacing: 1                     # offsets h_k = -spacing * k
//     density: 0.3                   # random only
//     file: model.yaml               # custom: model description file, or
//     leaders: [0]                   # custom inline: leaders,
//     rho_weights: [[], [[0, 1]], [[1, 1]]]   # per agent [index, weight] lists
//     r_weights: ...                 # default: rho_weights
//   numerics:
//     dt: 0.01                       # kind default when absent, see Config
//     horizon: 100
//     velocity: 0.1                  # leader velocity for step experiments
//     stop: horizon                  # horizon | energy
//     max_samples: 2000              # recorded rows (ledger records every step)
//     omega: {min: 1e-4, max: 1e2, points: 2000, seeded: false}
//                                    # seeded: pole-seeded grid, min/max ignored
//     N_list: [25, 50, 100]          # classify
//     threshold: 0.01                # classify
//     refine_iters: 60               # classify
//   planar:                          # planar-turn only
//     speed: 1
//     turn_deg: 90
//     ramp: 200
//     settle: 200
//     f: -1
//     g: -2
//     mass_spread: 0                 # masses uniform on [1-s, 1+s], seeded
//     alpha: 0
//     cruise_speed: 0
//     snapshots: 8                   # equally spaced snapshot files
//
// A model description file holds the contents of a `model:` section at top
// level.

#include "flocklab/errors.hpp"
#include "flocklab/flock_model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace flocklab::experiment {

/// Malformed or invalid configuration. line() is 1-based, 0 when unknown.
class ConfigError : public Error
{
public:
  ConfigError(std::string source, int line, const std::string& what);
  int line() const noexcept { return line_; }
  const std::string& source() const noexcept { return source_; }

private:
  std::string source_;
  int line_;
};

enum class Kind
{
  StepResponse,
  FrequencySweep,
  Spectrum,
  Classify,
  Ledger,
  PlanarTurn,
};

std::string to_string(Kind k);

struct ModelSpec
{
  enum class Type
  {
    Standard,
    Custom,
    Random,
  };
  Type type = Type::Standard;
  int n = 100;
  double rho = 0.5;
  double r = 0.5;
  double f = -1.0;
  double g = -2.0;
  double spacing = 1.0;
  double density = 0.3;
  std::vector<int> leaders{0};
  NeighborWeights rho_weights;
  NeighborWeights r_weights;
  std::string file; ///< description file the custom weights came from
};

struct OmegaSpec
{
  double min = 1e-4;
  double max = 1e2;
  std::size_t points = 2000;
  bool seeded = false; ///< use the pole-seeded grid
};

struct PlanarSpec
{
  double speed = 1.0;
  double turn_deg = 90.0;
  double ramp = 200.0;
  double settle = 200.0;
  double f = -1.0;
  double g = -2.0;
  double mass_spread = 0.0;
  double alpha = 0.0;
  double cruise_speed = 0.0;
  int snapshots = 8;
};

struct Config
{
  Kind kind = Kind::StepResponse;
  std::string name;
  std::filesystem::path output = "out";
  std::uint64_t seed = 1;
  ModelSpec model;
  /// Unset means the kind's default: dt 0.01 (0.05 for classify), horizon
  /// 100 (the 1e6 cap for classify, ramp + settle for planar-turn).
  std::optional<double> dt;
  std::optional<double> horizon;
  double velocity = 0.1;
  bool energy_stop = false;
  std::size_t max_samples = 2000;
  OmegaSpec omega;
  std::vector<int> N_list{25, 50, 100};
  double threshold = 0.01;
  int refine_iters = 60;
  PlanarSpec planar;
};

/// `source` names the text in error messages; relative paths inside the
/// config (output, model file) resolve against `base_dir`.
Config parse_config(const std::string& text, const std::string& source,
                    const std::filesystem::path& base_dir);
Config load_config(const std::filesystem::path& path);

ModelSpec parse_model_description(const std::string& text,
                                  const std::string& source);

/// Model for the spec; `followers` overrides n for standard models when >= 0.
LinearFlockModel build_model(const ModelSpec& spec, std::uint64_t seed,
                             int followers = -1);

struct RunResult
{
  std::vector<std::filesystem::path> artifacts; ///< CSVs, plots, manifest
  std::string manifest;                         ///< JSON text as written
};

/// Runs one experiment and writes `<output>/<name>*.csv`, matching SVG plots
/// where one applies, and `<output>/<name>.manifest.json`. Library errors
/// propagate unchanged.
RunResult run(const Config& cfg);

/// fig2 | fig3 | fig4 | turn. `scale` overrides N (followers) for the linear
/// presets and is ignored by turn; 0 keeps the default.
std::vector<Config> preset(const std::string& name,
                           const std::filesystem::path& output, int scale = 0);

} // namespace flocklab::experiment
