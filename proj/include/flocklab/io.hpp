#pragma once

// CSV import/export for every tabular artifact. Numbers are written in the
// shortest form that round-trips exactly, so identical inputs give
// byte-identical files.

#include "flocklab/energy_ledger.hpp"
#include "flocklab/frequency_response.hpp"
#include "flocklab/linear_dynamics.hpp"
#include "flocklab/planar.hpp"
#include "flocklab/spectrum.hpp"
#include "flocklab/stability.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace flocklab::io {

std::string format_number(double x);

struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers; ///< 1-based source line per row
};

/// Throws CsvError carrying the offending line number.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::istream& in);

class CsvError : public std::runtime_error
{
public:
  CsvError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// t,z0,...,zN,zdot0,...,zdotN
void write_trajectory(std::ostream& out, const Trajectory& traj);
/// re,im
void write_spectrum(std::ostream& out, const std::vector<Complex>& eigs);
/// omega,re_a0,im_a0,...,re_aN,im_aN,gain_aN; failed points are omitted
void write_response(std::ostream& out, const ResponseTable& table);
/// N,ln_max_harmonic,ln_max_impulse followed by a '#' summary line
void write_classification(std::ostream& out, const Classification& c);
/// t,lhs,rhs,residual
void write_ledger(std::ostream& out, const LedgerSeries& series);
/// t,x0,y0,...,xN,yN,vx0,vy0,...,vxN,vyN
void write_planar(std::ostream& out, const std::vector<PlanarState>& states);
/// agent,x,y,vx,vy for one snapshot
void write_snapshot(std::ostream& out, const PlanarState& state);

/// Opens `path` for writing (creating parent directories) and calls fn.
template <class F>
void write_file(const std::filesystem::path& path, F&& fn);

} // namespace flocklab::io

#include <fstream>

template <class F>
void flocklab::io::write_file(const std::filesystem::path& path, F&& fn)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  fn(out);
  if (!out)
    throw std::runtime_error("failed writing " + path.string());
}
