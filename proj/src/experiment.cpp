#include "flocklab/experiment.hpp"

#include "flocklab/energy_ledger.hpp"
#include "flocklab/frequency_response.hpp"
#include "flocklab/io.hpp"
#include "flocklab/linear_dynamics.hpp"
#include "flocklab/planar.hpp"
#include "flocklab/plot.hpp"
#include "flocklab/spectrum.hpp"
#include "flocklab/stability.hpp"

#include <Eigen/Core>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <omp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace flocklab::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

ConfigError::ConfigError(std::string source, int line, const std::string& what)
    : Error(line > 0 ? fmt::format("{}:{}: {}", source, line, what)
                     : fmt::format("{}: {}", source, what)),
      source_(std::move(source)), line_(line)
{
}

std::string to_string(Kind k)
{
  switch (k) {
  case Kind::StepResponse: return "step-response";
  case Kind::FrequencySweep: return "frequency-sweep";
  case Kind::Spectrum: return "spectrum";
  case Kind::Classify: return "classify";
  case Kind::Ledger: return "ledger";
  case Kind::PlanarTurn: return "planar-turn";
  }
  return "?";
}

namespace {

class Reader
{
public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& n, const std::string& what) const
  {
    const int line = n.IsDefined() && n.Mark().line >= 0 ? n.Mark().line + 1 : 0;
    throw ConfigError(source_, line, what);
  }

  void require_map(const YAML::Node& n, const std::string& what,
                   std::initializer_list<const char*> allowed) const
  {
    if (!n.IsMap())
      fail(n, what + " must be a mapping");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key))
        fail(kv.first, fmt::format("unknown key '{}' in {}", key, what));
    }
  }

  double number(const YAML::Node& n, const std::string& key) const
  {
    double v = 0.0;
    if (!n.IsScalar() || !YAML::convert<double>::decode(n, v))
      fail(n, fmt::format("'{}' must be a number", key));
    if (!std::isfinite(v))
      fail(n, fmt::format("'{}' must be finite", key));
    return v;
  }

  double positive(const YAML::Node& n, const std::string& key) const
  {
    const double v = number(n, key);
    if (!(v > 0.0))
      fail(n, fmt::format("'{}' must be positive", key));
    return v;
  }

  long long integer(const YAML::Node& n, const std::string& key) const
  {
    long long v = 0;
    if (!n.IsScalar() || !YAML::convert<long long>::decode(n, v))
      fail(n, fmt::format("'{}' must be an integer", key));
    return v;
  }

  bool boolean(const YAML::Node& n, const std::string& key) const
  {
    bool v = false;
    if (!n.IsScalar() || !YAML::convert<bool>::decode(n, v))
      fail(n, fmt::format("'{}' must be true or false", key));
    return v;
  }

  std::string string(const YAML::Node& n, const std::string& key) const
  {
    if (!n.IsScalar())
      fail(n, fmt::format("'{}' must be a string", key));
    return n.Scalar();
  }

  NeighborWeights weights(const YAML::Node& n, const std::string& key) const
  {
    if (!n.IsSequence())
      fail(n, fmt::format("'{}' must be a list of per-agent lists", key));
    NeighborWeights out;
    for (const auto& row : n) {
      if (!row.IsSequence())
        fail(row, fmt::format("'{}': each agent entry must be a list", key));
      std::vector<Neighbor> nbs;
      for (const auto& pair : row) {
        if (!pair.IsSequence() || pair.size() != 2)
          fail(pair, fmt::format("'{}': neighbor must be [index, weight]", key));
        nbs.push_back({static_cast<int>(integer(pair[0], key)), number(pair[1], key)});
      }
      out.push_back(std::move(nbs));
    }
    return out;
  }

  const std::string& source() const { return source_; }

private:
  std::string source_;
};

YAML::Node parse_yaml(const std::string& text, const std::string& source)
{
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line >= 0 ? e.mark.line + 1 : 0, e.msg);
  }
}

ModelSpec read_model(const YAML::Node& n, const Reader& rd,
                     const fs::path& base_dir, bool allow_file)
{
  if (allow_file)
    rd.require_map(n, "model", {"type", "n", "rho", "r", "f", "g", "spacing",
                                "density", "file", "leaders", "rho_weights",
                                "r_weights"});
  else
    rd.require_map(n, "model description", {"type", "n", "rho", "r", "f", "g",
                                            "spacing", "density", "leaders",
                                            "rho_weights", "r_weights"});
  ModelSpec m;
  if (n["type"]) {
    const std::string t = rd.string(n["type"], "type");
    if (t == "standard")
      m.type = ModelSpec::Type::Standard;
    else if (t == "custom")
      m.type = ModelSpec::Type::Custom;
    else if (t == "random")
      m.type = ModelSpec::Type::Random;
    else
      rd.fail(n["type"], "model type must be standard, custom or random");
  }
  if (n["n"]) {
    const long long v = rd.integer(n["n"], "n");
    if (v < 1 || v > 100000)
      rd.fail(n["n"], "'n' must be a positive integer");
    m.n = static_cast<int>(v);
  }
  if (n["rho"])
    m.rho = rd.number(n["rho"], "rho");
  m.r = n["r"] ? rd.number(n["r"], "r") : m.rho;
  if (n["f"])
    m.f = rd.number(n["f"], "f");
  if (n["g"])
    m.g = rd.number(n["g"], "g");
  if (n["spacing"])
    m.spacing = rd.number(n["spacing"], "spacing");
  if (n["density"])
    m.density = rd.number(n["density"], "density");

  if (m.type != ModelSpec::Type::Custom)
    return m;

  if (allow_file && n["file"]) {
    const fs::path p = base_dir / rd.string(n["file"], "file");
    std::ifstream in(p);
    if (!in)
      rd.fail(n["file"], "cannot read model file " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    ModelSpec inner = parse_model_description(ss.str(), p.string());
    inner.type = ModelSpec::Type::Custom;
    inner.file = p.string();
    return inner;
  }
  if (!n["rho_weights"])
    rd.fail(n, "custom model needs 'rho_weights' (or 'file')");
  m.rho_weights = rd.weights(n["rho_weights"], "rho_weights");
  m.r_weights = n["r_weights"] ? rd.weights(n["r_weights"], "r_weights") : m.rho_weights;
  if (n["leaders"]) {
    if (!n["leaders"].IsSequence())
      rd.fail(n["leaders"], "'leaders' must be a list");
    m.leaders.clear();
    for (const auto& l : n["leaders"])
      m.leaders.push_back(static_cast<int>(rd.integer(l, "leaders")));
  }
  m.n = static_cast<int>(m.rho_weights.size()) - 1;
  return m;
}

} // namespace

ModelSpec parse_model_description(const std::string& text, const std::string& source)
{
  const Reader rd(source);
  const YAML::Node root = parse_yaml(text, source);
  ModelSpec m = read_model(root, rd, {}, false);
  if (m.type == ModelSpec::Type::Custom)
    m.file = source;
  return m;
}

Config parse_config(const std::string& text, const std::string& source,
                    const fs::path& base_dir)
{
  const Reader rd(source);
  const YAML::Node root = parse_yaml(text, source);
  if (!root.IsMap())
    throw ConfigError(source, 1, "config must be a mapping");
  rd.require_map(root, "config",
                 {"version", "kind", "name", "output", "seed", "model", "numerics", "planar"});

  Config c;
  if (root["version"] && rd.integer(root["version"], "version") != 1)
    rd.fail(root["version"], "unsupported config version (expected 1)");
  if (!root["kind"])
    throw ConfigError(source, 0, "missing required key 'kind'");
  {
    const std::string k = rd.string(root["kind"], "kind");
    const std::pair<const char*, Kind> kinds[] = {
        {"step-response", Kind::StepResponse}, {"frequency-sweep", Kind::FrequencySweep},
        {"spectrum", Kind::Spectrum},          {"classify", Kind::Classify},
        {"ledger", Kind::Ledger},              {"planar-turn", Kind::PlanarTurn}};
    bool found = false;
    for (const auto& [name, kind] : kinds)
      if (k == name) {
        c.kind = kind;
        found = true;
      }
    if (!found)
      rd.fail(root["kind"], fmt::format("unknown experiment kind '{}'", k));
  }
  c.name = root["name"] ? rd.string(root["name"], "name") : to_string(c.kind);
  if (c.name.empty() || c.name.find('/') != std::string::npos)
    rd.fail(root["name"], "'name' must be a non-empty file prefix");
  c.output = base_dir / (root["output"] ? rd.string(root["output"], "output") : "out");
  if (root["seed"]) {
    const long long s = rd.integer(root["seed"], "seed");
    if (s < 0)
      rd.fail(root["seed"], "'seed' must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }

  if (c.kind != Kind::PlanarTurn) {
    if (!root["model"])
      throw ConfigError(source, 0, "missing required section 'model'");
    c.model = read_model(root["model"], rd, base_dir, true);
    if (c.kind == Kind::Classify && c.model.type != ModelSpec::Type::Standard)
      rd.fail(root["model"], "classify needs a standard model (the family varies N)");
  }

  if (const YAML::Node nm = root["numerics"]) {
    rd.require_map(nm, "numerics", {"dt", "horizon", "velocity", "stop", "max_samples",
                                    "omega", "N_list", "threshold", "refine_iters"});
    if (nm["dt"])
      c.dt = rd.positive(nm["dt"], "dt");
    if (nm["horizon"])
      c.horizon = rd.positive(nm["horizon"], "horizon");
    if (nm["velocity"])
      c.velocity = rd.number(nm["velocity"], "velocity");
    if (nm["stop"]) {
      const std::string s = rd.string(nm["stop"], "stop");
      if (s != "horizon" && s != "energy")
        rd.fail(nm["stop"], "'stop' must be horizon or energy");
      c.energy_stop = s == "energy";
    }
    if (nm["max_samples"]) {
      const long long v = rd.integer(nm["max_samples"], "max_samples");
      if (v < 2)
        rd.fail(nm["max_samples"], "'max_samples' must be at least 2");
      c.max_samples = static_cast<std::size_t>(v);
    }
    if (const YAML::Node om = nm["omega"]) {
      rd.require_map(om, "omega", {"min", "max", "points", "seeded"});
      if (om["min"])
        c.omega.min = rd.positive(om["min"], "min");
      if (om["max"])
        c.omega.max = rd.positive(om["max"], "max");
      if (c.omega.max <= c.omega.min)
        rd.fail(om, "omega 'max' must exceed 'min'");
      if (om["points"]) {
        const long long p = rd.integer(om["points"], "points");
        if (p < 2)
          rd.fail(om["points"], "'points' must be at least 2");
        c.omega.points = static_cast<std::size_t>(p);
      }
      if (om["seeded"])
        c.omega.seeded = rd.boolean(om["seeded"], "seeded");
    }
    if (const YAML::Node nl = nm["N_list"]) {
      if (!nl.IsSequence() || nl.size() < 3)
        rd.fail(nl, "'N_list' must list at least 3 sizes");
      c.N_list.clear();
      for (const auto& v : nl) {
        const long long N = rd.integer(v, "N_list");
        if (N < 1 || (!c.N_list.empty() && N <= c.N_list.back()))
          rd.fail(v, "'N_list' must be positive and strictly increasing");
        c.N_list.push_back(static_cast<int>(N));
      }
    }
    if (nm["threshold"])
      c.threshold = rd.positive(nm["threshold"], "threshold");
    if (nm["refine_iters"]) {
      const long long v = rd.integer(nm["refine_iters"], "refine_iters");
      if (v < 0 || v > 1000)
        rd.fail(nm["refine_iters"], "'refine_iters' must lie in [0, 1000]");
      c.refine_iters = static_cast<int>(v);
    }
  }

  if (const YAML::Node pl = root["planar"]) {
    rd.require_map(pl, "planar", {"speed", "turn_deg", "ramp", "settle", "f", "g",
                                  "mass_spread", "alpha", "cruise_speed", "snapshots"});
    PlanarSpec& p = c.planar;
    if (pl["speed"])
      p.speed = rd.positive(pl["speed"], "speed");
    if (pl["turn_deg"])
      p.turn_deg = rd.number(pl["turn_deg"], "turn_deg");
    if (pl["ramp"])
      p.ramp = rd.positive(pl["ramp"], "ramp");
    if (pl["settle"]) {
      p.settle = rd.number(pl["settle"], "settle");
      if (p.settle < 0.0)
        rd.fail(pl["settle"], "'settle' must be non-negative");
    }
    if (pl["f"])
      p.f = rd.number(pl["f"], "f");
    if (pl["g"])
      p.g = rd.number(pl["g"], "g");
    if (pl["mass_spread"]) {
      p.mass_spread = rd.number(pl["mass_spread"], "mass_spread");
      if (p.mass_spread < 0.0 || p.mass_spread >= 1.0)
        rd.fail(pl["mass_spread"], "'mass_spread' must lie in [0, 1)");
    }
    if (pl["alpha"])
      p.alpha = rd.number(pl["alpha"], "alpha");
    if (pl["cruise_speed"])
      p.cruise_speed = rd.number(pl["cruise_speed"], "cruise_speed");
    if (pl["snapshots"]) {
      const long long s = rd.integer(pl["snapshots"], "snapshots");
      if (s < 0 || s > 1000)
        rd.fail(pl["snapshots"], "'snapshots' must lie in [0, 1000]");
      p.snapshots = static_cast<int>(s);
    }
  }
  return c;
}

Config load_config(const fs::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError(path.string(), 0, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string(), path.parent_path());
}

LinearFlockModel build_model(const ModelSpec& spec, std::uint64_t seed, int followers)
{
  switch (spec.type) {
  case ModelSpec::Type::Standard: {
    StandardExampleParams p;
    p.followers = followers >= 0 ? followers : spec.n;
    p.rho = spec.rho;
    p.r = spec.r;
    p.f = spec.f;
    p.g = spec.g;
    LinearFlockModel m = build_standard_example(p);
    if (spec.spacing == 1.0)
      return m;
    return LinearFlockModel(m.leaders(), m.L_rho(), m.L_r(), m.f(), m.g(),
                            default_offsets(m.agent_count(), spec.spacing));
  }
  case ModelSpec::Type::Random:
    return build_random(spec.n + 1, seed, spec.f, spec.g, spec.density);
  case ModelSpec::Type::Custom:
    return build_custom(spec.rho_weights, spec.r_weights, spec.leaders, spec.f, spec.g,
                        default_offsets(static_cast<int>(spec.rho_weights.size()),
                                        spec.spacing));
  }
  throw std::logic_error("bad model type");
}

namespace {

json model_json(const ModelSpec& m)
{
  json j;
  switch (m.type) {
  case ModelSpec::Type::Standard:
    j = {{"type", "standard"}, {"n", m.n}, {"rho", m.rho}, {"r", m.r},
         {"f", m.f}, {"g", m.g}, {"spacing", m.spacing}};
    break;
  case ModelSpec::Type::Random:
    j = {{"type", "random"}, {"n", m.n}, {"f", m.f}, {"g", m.g},
         {"density", m.density}, {"spacing", m.spacing}};
    break;
  case ModelSpec::Type::Custom: {
    auto weights = [](const NeighborWeights& w) {
      json rows = json::array();
      for (const auto& row : w) {
        json r = json::array();
        for (const auto& nb : row)
          r.push_back({nb.index, nb.weight});
        rows.push_back(r);
      }
      return rows;
    };
    j = {{"type", "custom"}, {"f", m.f}, {"g", m.g}, {"leaders", m.leaders},
         {"spacing", m.spacing}, {"rho_weights", weights(m.rho_weights)},
         {"r_weights", weights(m.r_weights)}};
    if (!m.file.empty())
      j["file"] = m.file;
    break;
  }
  }
  return j;
}

double default_dt(Kind k)
{
  return k == Kind::Classify ? classifier_impulse_defaults().integrate.dt : 0.01;
}

double default_horizon(const Config& c)
{
  if (c.kind == Kind::Classify)
    return classifier_impulse_defaults().integrate.horizon;
  if (c.kind == Kind::PlanarTurn)
    return c.planar.ramp + c.planar.settle;
  return 100.0;
}

std::vector<double> omega_grid(const Config& c, const LinearFlockModel& m)
{
  if (c.omega.seeded)
    return pole_seeded_grid(m, c.omega.points);
  return log_grid(c.omega.min, c.omega.max, c.omega.points);
}

class Artifacts
{
public:
  Artifacts(const Config& c) : dir_(c.output), name_(c.name) { fs::create_directories(dir_); }

  template <class F>
  fs::path csv(const std::string& suffix, F&& fn)
  {
    const fs::path p = dir_ / (name_ + suffix + ".csv");
    io::write_file(p, std::forward<F>(fn));
    paths_.push_back(p);
    return p;
  }

  void plot(plot::Kind kind, const fs::path& csv, const std::string& title)
  {
    plot::Style st;
    st.title = title;
    paths_.push_back(plot::render_file(kind, csv, {}, st));
  }

  fs::path manifest_path() const { return dir_ / (name_ + ".manifest.json"); }
  std::vector<fs::path>& paths() { return paths_; }

private:
  fs::path dir_;
  std::string name_;
  std::vector<fs::path> paths_;
};

std::string title_for(const Config& c)
{
  if (c.model.type == ModelSpec::Type::Standard)
    return fmt::format("{}: N={} rho={} r={} f={} g={}", to_string(c.kind), c.model.n,
                       c.model.rho, c.model.r, c.model.f, c.model.g);
  return fmt::format("{}: {}", to_string(c.kind), c.name);
}

json run_step(const Config& c, double dt, double horizon, Artifacts& art)
{
  const LinearFlockModel m = build_model(c.model, c.seed);
  IntegrateOptions opts;
  opts.dt = dt;
  opts.horizon = horizon;
  opts.max_samples = c.max_samples;
  if (c.energy_stop)
    opts.stop.kind = StopRule::Kind::EnergySettled;
  Trajectory traj = step_response(m, c.velocity, opts);

  // exported in the lab frame: leader moving at `velocity` from the origin
  Trajectory lab = traj;
  for (FlockState& s : lab.states)
    s = galilean_shift(s, 0.0, c.velocity);
  const fs::path p = art.csv("", [&](std::ostream& o) { io::write_trajectory(o, lab); });
  art.plot(plot::Kind::SpaceTime, p, title_for(c));

  return {{"frame", "lab (maxima in the leader frame)"},
          {"max_abs_zN", traj.max_abs_zN},
          {"max_abs_z_any", traj.max_abs_z_any},
          {"argmax_zN", traj.argmax_zN},
          {"end_time", traj.end_time},
          {"steps", traj.steps},
          {"stride", traj.stride},
          {"stopped_early", traj.stopped_early},
          {"warnings", traj.warnings}};
}

json run_sweep(const Config& c, Artifacts& art)
{
  const LinearFlockModel m = build_model(c.model, c.seed);
  const std::vector<double> grid = omega_grid(c, m);
  const ResponseTable table = sweep(m, grid);
  const fs::path p = art.csv("", [&](std::ostream& o) { io::write_response(o, table); });
  std::size_t failed = 0;
  PeakGain best;
  for (const auto& row : table.rows) {
    if (!row.ok()) {
      ++failed;
      continue;
    }
    const double gN = row.gains(row.gains.size() - 1);
    if (gN > best.gain)
      best = {row.omega, gN};
  }
  if (failed < table.rows.size())
    art.plot(plot::Kind::Response, p, title_for(c));
  const PeakGain refined = peak_gain(m, grid, c.refine_iters);
  return {{"grid_points", grid.size()},
          {"grid_min", grid.front()},
          {"grid_max", grid.back()},
          {"failed_points", failed},
          {"grid_peak_omega", best.omega},
          {"grid_peak_gain", best.gain},
          {"refined_peak_omega", refined.omega},
          {"refined_peak_gain", refined.gain}};
}

json run_spectrum(const Config& c, Artifacts& art)
{
  const LinearFlockModel m = build_model(c.model, c.seed);
  const std::vector<Complex> eigs = eigenvalues(companion_matrix(m));
  const fs::path p = art.csv("", [&](std::ostream& o) { io::write_spectrum(o, eigs); });
  art.plot(plot::Kind::Spectrum, p, title_for(c));
  const SpectrumReport r = spectral_summary(eigs);
  return {{"count", eigs.size()},
          {"spectral_abscissa", r.spectral_abscissa},
          {"min_abs_real", r.min_abs_real},
          {"min_modulus", r.min_modulus},
          {"spectral_radius", r.spectral_radius},
          {"near_zero_count", r.near_zero_count}};
}

json run_classify(const Config& c, double dt, double horizon, Artifacts& art)
{
  const FlockFamily fam =
      standard_family(c.model.rho, c.model.r, c.model.f, c.model.g, c.N_list);
  HarmonicOptions h;
  h.grid_points = c.omega.points;
  h.refine_iters = c.refine_iters;
  ImpulseOptions imp = classifier_impulse_defaults();
  imp.integrate.dt = dt;
  imp.integrate.horizon = horizon;
  const Classification cl = classify(fam, c.velocity, c.threshold, h, imp);
  art.csv("", [&](std::ostream& o) { io::write_classification(o, cl); });
  return {{"verdict", to_string(cl.verdict)},
          {"harmonic_slope", cl.harmonic.slope},
          {"impulse_slope", cl.impulse.slope},
          {"harmonic_linear_slope", cl.harmonic.linear_slope},
          {"impulse_linear_slope", cl.impulse.linear_slope},
          {"harmonic_ln_max", cl.harmonic.per_N_values},
          {"impulse_ln_max", cl.impulse.per_N_values}};
}

json run_ledger(const Config& c, double dt, double horizon, Artifacts& art)
{
  const LinearFlockModel m = build_model(c.model, c.seed);
  IntegrateOptions opts;
  opts.dt = dt;
  opts.horizon = horizon;
  opts.max_samples = static_cast<std::size_t>(std::ceil(horizon / dt)) + 2;
  const Trajectory traj = step_response(m, c.velocity, opts);
  const LedgerSeries s = ledger(traj, m);
  art.csv("", [&](std::ostream& o) { io::write_ledger(o, s); });
  return {{"relative_residual", s.relative_residual()},
          {"samples", s.times.size()},
          {"warnings", traj.warnings}};
}

json run_turn(const Config& c, double dt, Artifacts& art)
{
  const PlanarSpec& p = c.planar;
  TurnOptions opts;
  opts.speed = p.speed;
  opts.turn = p.turn_deg * std::numbers::pi / 180.0;
  opts.ramp = p.ramp;
  opts.settle = p.settle;
  opts.f = p.f;
  opts.g = p.g;
  opts.dt = dt;
  opts.planar.alpha = p.alpha;
  opts.planar.cruise_speed = p.cruise_speed;
  if (p.mass_spread > 0.0)
    opts.planar.masses = sample_masses(7, p.mass_spread, c.seed);
  TurnScenario sc = turn_maneuver(opts);
  sc.integrate.max_samples = c.max_samples;
  sc.integrate.snapshot_times.clear();
  const double total = sc.integrate.horizon;
  for (int i = 0; i <= p.snapshots && p.snapshots > 0; ++i)
    sc.integrate.snapshot_times.push_back(total * i / p.snapshots);

  const PlanarTrajectory traj = integrate_planar(sc.model, sc.init, sc.program, sc.integrate);
  art.csv("", [&](std::ostream& o) { io::write_planar(o, traj.states); });
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i)
    art.csv(fmt::format("_snapshot{:02d}", i),
            [&](std::ostream& o) { io::write_snapshot(o, traj.snapshots[i]); });

  double peak = 0.0;
  for (const PlanarState& s : traj.states)
    peak = std::max(peak, formation_error(s, sc.model));
  const double final_err = formation_error(traj.final_state, sc.model);
  const double flock_heading = mean_heading(traj.final_state, sc.model.epsilon_v());
  const double leader_heading = heading(traj.final_state.velocities[0], sc.model.epsilon_v());
  double diff = std::remainder(flock_heading - leader_heading, 2.0 * std::numbers::pi);
  return {{"dt", dt},
          {"horizon", total},
          {"masses", sc.model.masses()},
          {"peak_formation_error", peak},
          {"final_formation_error", final_err},
          {"final_mean_heading_deg", flock_heading * 180.0 / std::numbers::pi},
          {"final_leader_heading_deg", leader_heading * 180.0 / std::numbers::pi},
          {"heading_error_deg", std::abs(diff) * 180.0 / std::numbers::pi}};
}

} // namespace

RunResult run(const Config& c)
{
  const auto start = std::chrono::steady_clock::now();
  const double dt = c.dt.value_or(default_dt(c.kind));
  const double horizon = c.horizon.value_or(default_horizon(c));
  Artifacts art(c);

  json results;
  switch (c.kind) {
  case Kind::StepResponse: results = run_step(c, dt, horizon, art); break;
  case Kind::FrequencySweep: results = run_sweep(c, art); break;
  case Kind::Spectrum: results = run_spectrum(c, art); break;
  case Kind::Classify: results = run_classify(c, dt, horizon, art); break;
  case Kind::Ledger: results = run_ledger(c, dt, horizon, art); break;
  case Kind::PlanarTurn: results = run_turn(c, dt, art); break;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json numerics = {{"dt", dt},
                   {"horizon", horizon},
                   {"velocity", c.velocity},
                   {"stop", c.energy_stop ? "energy" : "horizon"},
                   {"max_samples", c.max_samples},
                   {"omega", {{"min", c.omega.min}, {"max", c.omega.max},
                              {"points", c.omega.points}, {"seeded", c.omega.seeded}}},
                   {"N_list", c.N_list},
                   {"threshold", c.threshold},
                   {"refine_iters", c.refine_iters}};
  if (c.kind == Kind::Classify) {
    const auto d = classifier_impulse_defaults().integrate.stop;
    numerics["impulse_stop"] = {{"energy_ratio", d.energy_ratio},
                                {"quiet_fraction", d.quiet_fraction},
                                {"check_every", d.check_every}};
  }
  const PlanarSpec& p = c.planar;
  json manifest = {
      {"schema_version", 1},
      {"kind", to_string(c.kind)},
      {"name", c.name},
      {"seed", c.seed},
      {"numerics", numerics},
      {"versions",
       {{"flocklab", FLOCKLAB_VERSION},
        {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                              EIGEN_MINOR_VERSION)},
        {"compiler", __VERSION__}}},
      {"threads", omp_get_max_threads()},
      {"wall_time_s", wall},
      {"results", results}};
  if (c.kind == Kind::PlanarTurn)
    manifest["planar"] = {{"speed", p.speed}, {"turn_deg", p.turn_deg}, {"ramp", p.ramp},
                          {"settle", p.settle}, {"f", p.f}, {"g", p.g},
                          {"mass_spread", p.mass_spread}, {"alpha", p.alpha},
                          {"cruise_speed", p.cruise_speed}, {"snapshots", p.snapshots}};
  else
    manifest["model"] = model_json(c.model);

  json files = json::array();
  for (const auto& a : art.paths())
    files.push_back(a.filename().string());
  manifest["artifacts"] = files;

  RunResult out;
  out.manifest = manifest.dump(2) + "\n";
  io::write_file(art.manifest_path(), [&](std::ostream& o) { o << out.manifest; });
  out.artifacts = art.paths();
  out.artifacts.push_back(art.manifest_path());
  return out;
}

std::vector<Config> preset(const std::string& name, const fs::path& output, int scale)
{
  if (scale < 0)
    throw ConfigError("preset", 0, "--scale must be positive");
  const int N = scale > 0 ? scale : 100;
  std::vector<Config> out;
  if (name == "turn") {
    Config c;
    c.kind = Kind::PlanarTurn;
    c.name = "turn";
    c.output = output;
    out.push_back(c);
    return out;
  }
  Kind kind;
  if (name == "fig2")
    kind = Kind::StepResponse;
  else if (name == "fig3")
    kind = Kind::FrequencySweep;
  else if (name == "fig4")
    kind = Kind::Spectrum;
  else
    throw ConfigError("preset", 0, fmt::format("unknown preset '{}'", name));

  for (double rho : {0.45, 0.5, 0.55}) {
    Config c;
    c.kind = kind;
    c.name = fmt::format("{}_rho{}", name, rho);
    c.output = output;
    c.model.n = N;
    c.model.rho = c.model.r = rho;
    c.model.f = -1.0;
    c.model.g = -2.0;
    if (kind == Kind::StepResponse) {
      c.horizon = 1000.0;
      c.max_samples = 1000;
    }
    if (kind == Kind::FrequencySweep)
      c.omega.seeded = true;
    out.push_back(c);
  }
  return out;
}

} // namespace flocklab::experiment
