#include "flocklab/kernels.hpp"

#include "flocklab/errors.hpp"

#include <cstdlib>
#include <string>

namespace flocklab::kernels {

int configure_threads()
{
  if (const char* env = std::getenv("FLOCKLAB_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0)
        omp_set_num_threads(cap);
    }
    catch (const std::exception&) {
      // unparsable values leave the OpenMP default in place
    }
  }
  return omp_get_max_threads();
}

namespace {

ResponsePoint evaluate(const ResponseSolver& solver, double omega)
{
  ResponsePoint p;
  p.omega = omega;
  try {
    p.amplitudes = solver.solve(omega);
    p.gains = p.amplitudes.cwiseAbs();
  }
  catch (const NumericError& e) {
    p.amplitudes.resize(0);
    p.gains.resize(0);
    p.error = e.what();
  }
  return p;
}

double evaluate_gain(const ResponseSolver& solver, double omega)
{
  try {
    return solver.gain(omega);
  }
  catch (const NumericError&) {
    return -1.0;
  }
}

} // namespace

namespace serial {

std::vector<ResponsePoint> response_sweep(const ResponseSolver& solver,
                                          std::span<const double> grid)
{
  std::vector<ResponsePoint> rows(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    rows[i] = evaluate(solver, grid[i]);
  return rows;
}

std::vector<double> gain_sweep(const ResponseSolver& solver,
                               std::span<const double> grid)
{
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    out[i] = evaluate_gain(solver, grid[i]);
  return out;
}

} // namespace serial

namespace parallel {

std::vector<ResponsePoint> response_sweep(const ResponseSolver& solver,
                                          std::span<const double> grid)
{
  std::vector<ResponsePoint> rows(grid.size());
  const auto n = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i)
    rows[static_cast<std::size_t>(i)] =
        evaluate(solver, grid[static_cast<std::size_t>(i)]);
  return rows;
}

std::vector<double> gain_sweep(const ResponseSolver& solver,
                               std::span<const double> grid)
{
  std::vector<double> out(grid.size());
  const auto n = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        evaluate_gain(solver, grid[static_cast<std::size_t>(i)]);
  return out;
}

} // namespace parallel

} // namespace flocklab::kernels
