// flocklab: run experiments, presets and plots from the command line.
//
// Exit codes: 0 success, 2 configuration/input error, 3 numeric failure,
// 1 anything else (I/O).

#include "flocklab/errors.hpp"
#include "flocklab/experiment.hpp"
#include "flocklab/io.hpp"
#include "flocklab/kernels.hpp"
#include "flocklab/plot.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace fl = flocklab;
namespace ex = flocklab::experiment;

namespace {

void report(const ex::RunResult& r)
{
  for (const auto& p : r.artifacts)
    std::cout << p.string() << '\n';
}

int guarded(const std::function<void()>& fn)
{
  try {
    fn();
    return 0;
  } catch (const ex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const fl::ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return 2;
  } catch (const fl::io::CsvError& e) {
    std::cerr << "csv error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const fl::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"flocklab: leader-follower flock experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment from a YAML config");
  run->add_option("config", config_path, "Config file")->required();

  std::string preset_name;
  std::string out_dir = "out";
  int scale = 0;
  auto* preset = app.add_subcommand("preset", "Run a built-in preset");
  preset->add_option("name", preset_name, "fig2 | fig3 | fig4 | turn")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "turn"}));
  preset->add_option("--out", out_dir, "Output directory");
  preset->add_option("--scale", scale, "Flock size N (followers) for fig2-4")
      ->check(CLI::PositiveNumber);

  std::string csv_path;
  std::string kind;
  std::string svg_path;
  double spacing = 1.0;
  auto* plot = app.add_subcommand("plot", "Render a CSV as SVG");
  plot->add_option("csv", csv_path, "Input CSV")->required();
  plot->add_option("--kind", kind, "spacetime | response | spectrum")
      ->required()
      ->check(CLI::IsMember({"spacetime", "response", "spectrum"}));
  plot->add_option("-o,--output", svg_path, "Output SVG (default: next to the CSV)");
  plot->add_option("--spacing", spacing, "Offset spacing for spacetime plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  fl::kernels::configure_threads();

  if (*run)
    return guarded([&] { report(ex::run(ex::load_config(config_path))); });
  if (*preset)
    return guarded([&] {
      for (const auto& cfg : ex::preset(preset_name, out_dir, scale))
        report(ex::run(cfg));
    });
  return guarded([&] {
    fl::plot::Style st;
    st.offset_spacing = spacing;
    std::cout << fl::plot::render_file(fl::plot::parse_kind(kind), csv_path, svg_path, st)
                     .string()
              << '\n';
  });
}
