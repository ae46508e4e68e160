#include "flocklab/errors.hpp"
#include "flocklab/experiment.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using namespace flocklab;
namespace ex = flocklab::experiment;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
  const auto dir = fs::temp_directory_path() / "flocklab_experiment_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

int config_error_line(const std::string& text)
{
  try {
    ex::parse_config(text, "cfg.yaml", ".");
  } catch (const ex::ConfigError& e) {
    return e.line();
  }
  return -1;
}

ex::Config small(ex::Kind kind, const fs::path& out)
{
  ex::Config c;
  c.kind = kind;
  c.name = ex::to_string(kind);
  c.output = out;
  c.model.n = 6;
  c.model.rho = c.model.r = 0.45;
  c.horizon = 5.0;
  c.omega.points = 50;
  c.N_list = {3, 4, 5};
  c.planar.ramp = 5.0;
  c.planar.settle = 5.0;
  c.planar.snapshots = 2;
  return c;
}

int run_cli(const std::string& args)
{
  const std::string cmd = std::string(FLOCKLAB_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Config, ParsesFullSchema)
{
  const auto c = ex::parse_config(R"(version: 1
kind: classify
name: demo
output: results
seed: 7
model: {type: standard, n: 20, rho: 0.45, f: -1, g: -2}
numerics:
  dt: 0.02
  N_list: [10, 20, 40]
  threshold: 0.02
  omega: {points: 300, seeded: true}
)", "cfg.yaml", "/base");
  EXPECT_EQ(c.kind, ex::Kind::Classify);
  EXPECT_EQ(c.name, "demo");
  EXPECT_EQ(c.output, fs::path("/base/results"));
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.model.n, 20);
  EXPECT_EQ(c.model.r, 0.45);
  EXPECT_EQ(c.dt.value(), 0.02);
  EXPECT_FALSE(c.horizon.has_value());
  EXPECT_EQ(c.N_list, (std::vector<int>{10, 20, 40}));
  EXPECT_EQ(c.omega.points, 300u);
  EXPECT_TRUE(c.omega.seeded);
}

TEST(Config, ErrorsCarryLineNumbers)
{
  EXPECT_EQ(config_error_line("kind: spectrum\nmodel:\n  rho: 0.5\n  bogus: 1\n"), 4);
  EXPECT_EQ(config_error_line("kind: teleport\n"), 1);
  EXPECT_EQ(config_error_line("kind: spectrum\nmodel: {rho: 0.5}\nnumerics:\n  dt: fast\n"), 4);
  EXPECT_EQ(config_error_line("kind: spectrum\nversion: 2\n"), 2);
  EXPECT_EQ(config_error_line("kind: classify\nmodel: {type: random, n: 5}\n"), 2);
  EXPECT_GE(config_error_line("kind: [unclosed\n"), 1);
  try {
    ex::parse_config("kind: spectrum\nmodel:\n  rho: 0.5\n  bogus: 1\n", "cfg.yaml", ".");
  } catch (const ex::ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("cfg.yaml:4:", 0), 0u);
  }
}

TEST(Config, CustomModelInline)
{
  const auto c = ex::parse_config(R"(kind: spectrum
model:
  type: custom
  leaders: [0]
  rho_weights: [[], [[0, 1]], [[1, 1]]]
)", "cfg.yaml", ".");
  const auto m = ex::build_model(c.model, c.seed);
  EXPECT_EQ(m.agent_count(), 3);
  EXPECT_EQ(m.L_rho(), m.L_r());
  EXPECT_DOUBLE_EQ(m.L_rho()(2, 1), -1.0);
}

TEST(Run, EveryKindIsRepeatable)
{
  for (auto kind : {ex::Kind::StepResponse, ex::Kind::FrequencySweep, ex::Kind::Spectrum,
                    ex::Kind::Classify, ex::Kind::Ledger, ex::Kind::PlanarTurn}) {
    const auto a = ex::run(small(kind, scratch_dir("a")));
    std::vector<std::string> first;
    for (const auto& p : a.artifacts)
      if (p.extension() == ".csv")
        first.push_back(slurp(p));
    ASSERT_FALSE(first.empty()) << ex::to_string(kind);
    const auto b = ex::run(small(kind, scratch_dir("a")));
    std::size_t i = 0;
    for (const auto& p : b.artifacts)
      if (p.extension() == ".csv") {
        EXPECT_EQ(slurp(p), first[i++]) << p;
      }
  }
}

TEST(Run, ManifestRecordsNumerics)
{
  auto c = small(ex::Kind::StepResponse, scratch_dir("m"));
  c.dt = 0.02;
  c.velocity = 0.3;
  const auto r = ex::run(c);
  const auto j = nlohmann::json::parse(r.manifest);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["kind"], "step-response");
  EXPECT_EQ(j["numerics"]["dt"], 0.02);
  EXPECT_EQ(j["numerics"]["horizon"], 5.0);
  EXPECT_EQ(j["numerics"]["velocity"], 0.3);
  EXPECT_EQ(j["model"]["rho"], 0.45);
  EXPECT_TRUE(j["versions"].contains("eigen"));
  EXPECT_TRUE(fs::exists(r.artifacts.back()));
  EXPECT_EQ(r.artifacts.back().filename(), "step-response.manifest.json");
  EXPECT_EQ(slurp(r.artifacts.back()), r.manifest);
}

TEST(Presets, KnownNamesAndScale)
{
  const auto fig2 = ex::preset("fig2", "out", 20);
  ASSERT_EQ(fig2.size(), 3u);
  EXPECT_EQ(fig2[0].model.n, 20);
  EXPECT_EQ(fig2[1].model.rho, 0.5);
  EXPECT_EQ(ex::preset("turn", "out").front().kind, ex::Kind::PlanarTurn);
  EXPECT_THROW(ex::preset("fig9", "out"), ex::ConfigError);
}

TEST(Cli, ExitCodes)
{
  const auto dir = scratch_dir("cli");
  {
    std::ofstream(dir / "ok.yaml") << "kind: spectrum\nmodel: {n: 5}\noutput: out\n";
    std::ofstream(dir / "bad.yaml") << "kind: spectrum\nmodel: {rho: 2}\n";
    std::ofstream(dir / "typo.yaml") << "kind: spectrum\nmodle: {}\n";
    // destabilizing gains on a custom model blow up during integration
    std::ofstream(dir / "blowup.yaml")
        << "kind: step-response\noutput: out\nnumerics: {horizon: 1000}\n"
           "model:\n  type: custom\n  f: 1\n  g: 2\n  leaders: [0]\n"
           "  rho_weights: [[], [[0, 1]], [[1, 1]]]\n";
  }
  EXPECT_EQ(run_cli("run " + (dir / "ok.yaml").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "spectrum.csv"));
  EXPECT_EQ(run_cli("run " + (dir / "bad.yaml").string()), 2);
  EXPECT_EQ(run_cli("run " + (dir / "typo.yaml").string()), 2);
  EXPECT_EQ(run_cli("run " + (dir / "missing.yaml").string()), 2);
  EXPECT_EQ(run_cli("run " + (dir / "blowup.yaml").string()), 3);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("plot " + (dir / "out" / "spectrum.csv").string() + " --kind spectrum"), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "spectrum.svg"));
  EXPECT_EQ(run_cli("plot " + (dir / "ok.yaml").string() + " --kind spectrum"), 2);
}
