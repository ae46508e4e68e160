#pragma once

// Standalone SVG renderings of the exported CSVs. Every function is a pure
// function of the table: no timestamps or other run-dependent content.

#include "flocklab/io.hpp"

#include <filesystem>
#include <string>

namespace flocklab::plot {

struct Style
{
  double width = 720.0;
  double height = 540.0;
  std::string title;
  /// Space-time only: plotted position is z_k - offset_spacing * k, which
  /// restores the formation geometry of the default offsets. 0 plots raw z.
  double offset_spacing = 1.0;
  std::size_t max_points = 2000; ///< per series; longer series are decimated
};

/// Data ranges actually drawn (after transforms, before padding).
struct Extent
{
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  std::size_t series = 0;
};

struct Figure
{
  std::string svg;
  Extent extent;
};

enum class Kind
{
  SpaceTime,
  Response,
  Spectrum,
};

/// Throws std::invalid_argument for an unknown name.
Kind parse_kind(const std::string& name);

/// One polyline per agent, position horizontal and time vertical (upward).
/// Throws io::CsvError on a table without rows or without z columns.
Figure space_time(const io::CsvTable& table, const Style& style = {});

/// |a_N(omega)| on log-log axes from the gain column of a response CSV.
Figure response(const io::CsvTable& table, const Style& style = {});

/// Eigenvalues as points in the complex plane, imaginary axis marked.
Figure spectrum(const io::CsvTable& table, const Style& style = {});

Figure render(Kind kind, const io::CsvTable& table, const Style& style = {});

/// Reads `csv`, renders, writes `svg` (default: csv with .svg extension).
/// Returns the path written.
std::filesystem::path render_file(Kind kind, const std::filesystem::path& csv,
                                  std::filesystem::path svg = {},
                                  const Style& style = {});

} // namespace flocklab::plot
